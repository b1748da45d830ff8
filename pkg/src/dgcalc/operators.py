"""Linear constant-coefficient differential operators between bundles.

An operator is a matrix over Q[d1..dn] acting on column vectors of unknown
functions; row i gives the i-th component of the output.  Bundles carry a
positive rational weight per component, used as the symmetrization factor in
the pairing that defines the formal adjoint (off-diagonal components of a
symmetric tensor typically get weight 2).

Names on operators and bundles are labels for files and reports only;
equality compares structure (nvars, component labels and weights, matrix).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .engine import FreeElem, minimize_generators, module_equal, syzygies
from .poly import ParseError, Poly, parse, serialize


class ShapeMismatch(ValueError):
    """Operator composition or comparison with incompatible shapes."""


class NotFactorable(ValueError):
    """Left factorization failed; carries the first offending row."""

    def __init__(self, row_index: int, remainder: FreeElem):
        super().__init__(
            f"row {row_index} does not lie in the row module of the divisor; "
            f"remainder {remainder}"
        )
        self.row_index = row_index
        self.remainder = remainder


class OpFormatError(ValueError):
    """Malformed operator file or dict."""


class Bundle:
    """A named list of components with positive rational weights.

    Two bundles are equal when their component labels and weights agree;
    the name is carried along but never compared, so an operator and its
    double adjoint come out identical.
    """

    __slots__ = ("name", "labels", "weights")

    def __init__(self, name: str, components: Iterable[tuple[str, Fraction]]):
        comps = [(str(lbl), Fraction(w)) for lbl, w in components]
        if not comps:
            raise ValueError("bundle needs at least one component")
        labels = [lbl for lbl, _ in comps]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate component labels in bundle {name!r}")
        for lbl, w in comps:
            if w <= 0:
                raise ValueError(f"component {lbl!r} has non-positive weight {w}")
        self.name = name
        self.labels = tuple(labels)
        self.weights = tuple(w for _, w in comps)

    @staticmethod
    def simple(name: str, dim: int) -> "Bundle":
        return Bundle(name, ((str(i + 1), Fraction(1)) for i in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def components(self) -> tuple[tuple[str, Fraction], ...]:
        return tuple(zip(self.labels, self.weights))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bundle):
            return NotImplemented
        return self.labels == other.labels and self.weights == other.weights

    def __hash__(self) -> int:
        return hash((self.labels, self.weights))

    def __repr__(self) -> str:
        return f"Bundle({self.name!r}, dim={self.dim})"


class LinDiffOp:
    """Matrix of polynomials in d1..dn mapping source sections to target
    sections.  Rows are indexed by target components, columns by source."""

    __slots__ = ("name", "nvars", "source", "target", "matrix", "_hash")

    def __init__(
        self,
        name: str,
        nvars: int,
        source: Bundle,
        target: Bundle,
        matrix: Sequence[Sequence[Poly]],
    ):
        mat = tuple(tuple(row) for row in matrix)
        if len(mat) != target.dim:
            raise ShapeMismatch(
                f"{name}: {len(mat)} rows but target has {target.dim} components"
            )
        for row in mat:
            if len(row) != source.dim:
                raise ShapeMismatch(
                    f"{name}: row width {len(row)} but source has {source.dim} components"
                )
            for p in row:
                if p.nvars != nvars:
                    raise ShapeMismatch(f"{name}: entry nvars {p.nvars} != {nvars}")
        self.name = name
        self.nvars = nvars
        self.source = source
        self.target = target
        self.matrix = mat
        self._hash: int | None = None

    # -- structure -----------------------------------------------------------

    def rows(self) -> list[FreeElem]:
        return [FreeElem(row) for row in self.matrix]

    def columns(self) -> list[FreeElem]:
        return [FreeElem(row[j] for row in self.matrix) for j in range(self.source.dim)]

    def order(self) -> int:
        return max((p.degree() for row in self.matrix for p in row), default=-1)

    def row_degrees(self) -> tuple[int, ...]:
        return tuple(max(p.degree() for p in row) for row in self.matrix)

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.matrix for p in row)

    def with_name(self, name: str) -> "LinDiffOp":
        return LinDiffOp(name, self.nvars, self.source, self.target, self.matrix)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinDiffOp):
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.source == other.source
            and self.target == other.target
            and self.matrix == other.matrix
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, self.source, self.target, self.matrix))
        return self._hash

    def __repr__(self) -> str:
        return (
            f"LinDiffOp({self.name!r}, {self.target.dim}x{self.source.dim}, "
            f"nvars={self.nvars}, order={self.order()})"
        )

    def entry_strs(self) -> list[list[str]]:
        return [[serialize(p) for p in row] for row in self.matrix]


# -- algebra -------------------------------------------------------------------


def compose(a: LinDiffOp, b: LinDiffOp) -> LinDiffOp:
    """a after b.  Constant coefficients make this the matrix product."""
    if a.nvars != b.nvars:
        raise ShapeMismatch("compose: operators over different variable counts")
    if a.source.dim != b.target.dim:
        raise ShapeMismatch(
            f"compose: {a.name} expects {a.source.dim} components, "
            f"{b.name} produces {b.target.dim}"
        )
    n = a.nvars
    rows = []
    for i in range(a.target.dim):
        row = []
        for j in range(b.source.dim):
            s = Poly.zero(n)
            for k in range(a.source.dim):
                if not a.matrix[i][k].is_zero() and not b.matrix[k][j].is_zero():
                    s = s + a.matrix[i][k] * b.matrix[k][j]
            row.append(s)
        rows.append(row)
    return LinDiffOp(f"compose({a.name},{b.name})", n, b.source, a.target, rows)


def scale(a: LinDiffOp, c, name: str | None = None) -> LinDiffOp:
    c = Fraction(c)
    rows = [[p * c for p in row] for row in a.matrix]
    return LinDiffOp(name or f"scale({a.name},{c})", a.nvars, a.source, a.target, rows)


def adjoint(a: LinDiffOp) -> LinDiffOp:
    """Formal adjoint for the weighted L2 pairing: transpose the matrix,
    flip the sign of every d, and move the weights across.  Involutive."""
    sw = a.source.weights
    tw = a.target.weights
    rows = []
    for i in range(a.source.dim):
        row = []
        for j in range(a.target.dim):
            row.append(a.matrix[j][i].negate_vars() * (tw[j] / sw[i]))
        rows.append(row)
    return LinDiffOp(f"adjoint({a.name})", a.nvars, a.target, a.source, rows)


def is_self_adjoint(a: LinDiffOp) -> bool:
    return adjoint(a) == a


def cc(a: LinDiffOp, *, name: str | None = None) -> LinDiffOp:
    """Compatibility conditions: a minimal generating set for the relations
    among the rows of `a`, packaged as an operator on a's target."""
    raw = syzygies(a.rows())
    gens = minimize_generators(raw) if raw else []
    k = len(gens)
    if k == 0:
        # no relations: the zero operator on a one-dimensional dummy target
        zero_row = [[Poly.zero(a.nvars) for _ in range(a.target.dim)]]
        tgt = Bundle.simple(f"cc[{a.target.name}]", 1)
        return LinDiffOp(name or f"cc({a.name})", a.nvars, a.target, tgt, zero_row)
    tgt = Bundle.simple(f"cc[{a.target.name}]", k)
    rows = [list(g.entries) for g in gens]
    return LinDiffOp(name or f"cc({a.name})", a.nvars, a.target, tgt, rows)


def factor_through(a: LinDiffOp, b: LinDiffOp) -> LinDiffOp:
    """Find Q with a == compose(Q, b), i.e. divide each row of `a` by the
    rows of `b`.  Raises NotFactorable when a row leaves the row module."""
    from .engine import divide_with_cofactors

    if a.nvars != b.nvars:
        raise ShapeMismatch("factor: operators over different variable counts")
    if a.source.dim != b.source.dim:
        raise ShapeMismatch(
            f"factor: {a.name} has source dim {a.source.dim}, "
            f"{b.name} has {b.source.dim}"
        )
    brows = b.rows()
    qrows = []
    for i, row in enumerate(a.rows()):
        q, rem = divide_with_cofactors(row, brows)
        if not rem.is_zero():
            raise NotFactorable(i, rem)
        qrows.append(list(q))
    out = LinDiffOp(
        f"factor({a.name},{b.name})", a.nvars, b.target, a.target, qrows
    )
    if compose(out, b).matrix != a.matrix:
        raise RuntimeError("internal error: factorization identity failed")
    return out


def order_profile(a: LinDiffOp) -> tuple[int, ...]:
    """Sorted multiset of row orders."""
    return tuple(sorted(a.row_degrees()))


def symbol_at(a: LinDiffOp, covector: Sequence) -> list[list[Fraction]]:
    """Evaluate every entry at a rational covector (d_i -> xi_i)."""
    xi = [Fraction(v) for v in covector]
    if len(xi) != a.nvars:
        raise ShapeMismatch(f"covector has {len(xi)} entries, expected {a.nvars}")
    return [[p.evaluate(xi) for p in row] for row in a.matrix]


def image_module_equal(a: LinDiffOp, b: LinDiffOp) -> bool:
    """Same image as maps into a common target: compare column modules."""
    if a.nvars != b.nvars or a.target.dim != b.target.dim:
        return False
    return module_equal(a.columns(), b.columns())


# -- serialization ---------------------------------------------------------------


def bundle_to_dict(b: Bundle) -> dict:
    return {
        "name": b.name,
        "components": [
            {"label": lbl, "weight": str(w)} for lbl, w in b.components
        ],
    }


def bundle_from_dict(d: dict) -> Bundle:
    try:
        comps = [
            (c["label"], Fraction(c["weight"])) for c in d["components"]
        ]
        return Bundle(d.get("name", "bundle"), comps)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise OpFormatError(f"bad bundle: {exc}") from exc


def operator_to_dict(a: LinDiffOp, provenance: str | None = None) -> dict:
    d = {
        "name": a.name,
        "nvars": a.nvars,
        "source": bundle_to_dict(a.source),
        "target": bundle_to_dict(a.target),
        "matrix": a.entry_strs(),
    }
    if provenance:
        d["provenance"] = provenance
    return d


def operator_from_dict(d: dict) -> LinDiffOp:
    if not isinstance(d, dict):
        raise OpFormatError("operator document must be a JSON object")
    for key in ("nvars", "source", "target", "matrix"):
        if key not in d:
            raise OpFormatError(f"missing field {key!r}")
    nvars = d["nvars"]
    if not isinstance(nvars, int) or nvars < 1:
        raise OpFormatError(f"bad nvars: {nvars!r}")
    source = bundle_from_dict(d["source"])
    target = bundle_from_dict(d["target"])
    mat = d["matrix"]
    if not isinstance(mat, list) or not all(isinstance(r, list) for r in mat):
        raise OpFormatError("matrix must be a list of rows")
    rows = []
    for i, row in enumerate(mat):
        prow = []
        for j, cell in enumerate(row):
            if not isinstance(cell, str):
                raise OpFormatError(f"matrix[{i}][{j}] is not a string")
            try:
                prow.append(parse(cell, nvars))
            except ParseError as exc:
                raise OpFormatError(f"matrix[{i}][{j}]: {exc}") from exc
        rows.append(prow)
    try:
        return LinDiffOp(d.get("name", "operator"), nvars, source, target, rows)
    except ShapeMismatch as exc:
        raise OpFormatError(str(exc)) from exc


def operator_json(a: LinDiffOp, provenance: str | None = None) -> str:
    return json.dumps(operator_to_dict(a, provenance), indent=2) + "\n"


def save_operator(a: LinDiffOp, path, provenance: str | None = None) -> None:
    Path(path).write_text(operator_json(a, provenance))


def load_operator(path) -> LinDiffOp:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OpFormatError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OpFormatError(f"{path}: invalid JSON: {exc}") from exc
    return operator_from_dict(doc)
