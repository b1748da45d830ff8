"""A zoo of classical linear differential operators, built exactly.

Everything is expressed over Q[d1..dn] acting on components of symmetric
tensors, vectors, scalars or curvature-type tensors.  Metrics are constant
(Euclidean or Minkowski), so linearized curvature operators have constant
coefficients.  Symmetric 2-tensor bundles carry weight 2 on off-diagonal
components, which makes formal adjoints come out in their classical form.

Index conventions: components of a symmetric tensor are pairs (i,j) with
i <= j in lexicographic order; curvature components are pairs of pairs
(P,Q) with P <= Q, cut down modulo the cyclic identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb

from .operators import Bundle, LinDiffOp, adjoint, compose, scale
from .poly import Poly


# -- metrics -----------------------------------------------------------------


@dataclass(frozen=True)
class Metric:
    """A constant symmetric nondegenerate metric on R^n."""

    name: str
    tag: str
    n: int
    matrix: tuple[tuple[Fraction, ...], ...]

    @property
    def inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        return _invert(self.matrix)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij  # 1-indexed
        return self.matrix[i - 1][j - 1]

    def inv(self, i: int, j: int) -> Fraction:
        return self.inverse[i - 1][j - 1]


@lru_cache(maxsize=None)
def _invert(matrix: tuple[tuple[Fraction, ...], ...]) -> tuple[tuple[Fraction, ...], ...]:
    n = len(matrix)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c]), None)
        if piv is None:
            raise ValueError("metric is degenerate")
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return tuple(tuple(row[n:]) for row in aug)


def euclidean(n: int) -> Metric:
    if n < 1:
        raise ValueError("need n >= 1")
    mat = tuple(
        tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)
    )
    return Metric(name="euclidean", tag="e", n=n, matrix=mat)


def minkowski(n: int) -> Metric:
    """Signature (+,...,+,-): the last coordinate is time."""
    if n < 2:
        raise ValueError("need n >= 2")
    mat = tuple(
        tuple(Fraction((-1 if i == n - 1 else 1) * int(i == j)) for j in range(n))
        for i in range(n)
    )
    return Metric(name="minkowski", tag="m", n=n, matrix=mat)


METRICS = {"euclidean": euclidean, "minkowski": minkowski}


# -- bundles -------------------------------------------------------------------


def sym_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]


def sym_bundle(n: int, name: str = "sym2") -> Bundle:
    return Bundle(
        name,
        (
            (f"{i}{j}", Fraction(1 if i == j else 2))
            for i, j in sym_pairs(n)
        ),
    )


def vector_bundle(n: int, name: str = "vector") -> Bundle:
    return Bundle(name, ((str(i), Fraction(1)) for i in range(1, n + 1)))


def scalar_bundle(name: str = "scalar") -> Bundle:
    return Bundle(name, (("1", Fraction(1)),))


def _sym_index(n: int) -> dict[tuple[int, int], int]:
    return {pq: k for k, pq in enumerate(sym_pairs(n))}


def _rows_to_matrix(rows: list[dict[int, Poly]], width: int, nvars: int
                    ) -> list[list[Poly]]:
    zero = Poly.zero(nvars)
    return [[row.get(j, zero) for j in range(width)] for row in rows]


# -- curvature component bookkeeping --------------------------------------------


class RiemannBasis:
    """Independent components of a curvature-type tensor R_{kl,ij}:
    antisymmetric in (k,l) and (i,j), symmetric under pair swap, and
    reduced modulo the cyclic identity by dropping, for every a<b<c<d,
    the component ((a,d),(b,c)) = ((a,c),(b,d)) - ((a,b),(c,d))."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("need n >= 2")
        self.n = n
        antis = list(combinations(range(1, n + 1), 2))
        dropped = {
            ((a, d), (b, c))
            for a, b, c, d in combinations(range(1, n + 1), 4)
        }
        self.pairs: list[tuple[tuple[int, int], tuple[int, int]]] = [
            (p, q)
            for ii, p in enumerate(antis)
            for q in antis[ii:]
            if (p, q) not in dropped
        ]
        self.index = {pq: k for k, pq in enumerate(self.pairs)}
        expected = n * n * (n * n - 1) // 12
        if len(self.pairs) != expected:
            raise RuntimeError(
                f"internal error: {len(self.pairs)} curvature components, "
                f"expected {expected}"
            )

    @property
    def size(self) -> int:
        return len(self.pairs)

    def labels(self) -> list[str]:
        return [f"{p[0]}{p[1]},{q[0]}{q[1]}" for p, q in self.pairs]

    def resolve(self, k: int, l: int, i: int, j: int) -> dict[int, Fraction]:
        """Express R_{kl,ij} over the kept components."""
        if k == l or i == j:
            return {}
        s = Fraction(1)
        if k > l:
            k, l = l, k
            s = -s
        if i > j:
            i, j = j, i
            s = -s
        p, q = (k, l), (i, j)
        if p > q:
            p, q = q, p
        idx = self.index.get((p, q))
        if idx is not None:
            return {idx: s}
        # dropped component: p=(a,d), q=(b,c) with a<b<c<d; use the cyclic
        # identity R_{ad,bc} = R_{ac,bd} - R_{ab,cd}
        (a, d), (b, c) = p, q
        out: dict[int, Fraction] = {}
        for coeff, (k2, l2, i2, j2) in (
            (s, (a, c, b, d)),
            (-s, (a, b, c, d)),
        ):
            for idx2, c2 in self.resolve(k2, l2, i2, j2).items():
                v = out.get(idx2, Fraction(0)) + coeff * c2
                if v:
                    out[idx2] = v
                else:
                    out.pop(idx2, None)
        return out


def riemann_bundle(n: int, name: str) -> Bundle:
    rb = RiemannBasis(n)
    return Bundle(name, ((lbl, Fraction(1)) for lbl in rb.labels()))


# -- first order: Killing-type operators ----------------------------------------


@lru_cache(maxsize=None)
def killing(metric: Metric) -> LinDiffOp:
    """Lie derivative of the metric: Omega_ij = w_rj di xi^r + w_ir dj xi^r."""
    n = metric.n
    rows: list[dict[int, Poly]] = []
    for i, j in sym_pairs(n):
        row: dict[int, Poly] = {}
        for r in range(1, n + 1):
            p = metric[r, j] * Poly.var(n, i) + metric[i, r] * Poly.var(n, j)
            if not p.is_zero():
                row[r - 1] = p
        rows.append(row)
    return LinDiffOp(
        f"killing_{metric.tag}{n}",
        n,
        vector_bundle(n),
        sym_bundle(n),
        _rows_to_matrix(rows, n, n),
    )


def _trace_row(metric: Metric) -> dict[int, Poly]:
    # w^{uv} Omega_uv as an operator on the vector field: 2 d_u xi^u
    n = metric.n
    return {u: 2 * Poly.var(n, u + 1) for u in range(n)}


@lru_cache(maxsize=None)
def conformal_killing(metric: Metric) -> LinDiffOp:
    """Trace-free part of the Killing operator; the redundant (n,n)
    component is dropped, leaving n(n+1)/2 - 1 rows."""
    n = metric.n
    kill = killing(metric)
    trace = _trace_row(metric)
    idx = _sym_index(n)
    rows: list[dict[int, Poly]] = []
    labels = []
    weights = []
    src_bundle = sym_bundle(n)
    for i, j in sym_pairs(n)[:-1]:
        k = idx[(i, j)]
        row = {c: p for c, p in enumerate(kill.matrix[k]) if not p.is_zero()}
        wij = metric[i, j]
        if wij:
            for c, p in trace.items():
                v = row.get(c, Poly.zero(n)) - Fraction(wij, n) * p
                if v.is_zero():
                    row.pop(c, None)
                else:
                    row[c] = v
        rows.append(row)
        labels.append(src_bundle.labels[k])
        weights.append(src_bundle.weights[k])
    tgt = Bundle(f"sym2tf({n})", zip(labels, weights))
    return LinDiffOp(
        f"conformal_killing_{metric.tag}{n}",
        n,
        vector_bundle(n),
        tgt,
        _rows_to_matrix(rows, n, n),
    )


@lru_cache(maxsize=None)
def cauchy(metric: Metric) -> LinDiffOp:
    """Symmetrized gradient (small strain): -1/2 times the Killing adjoint."""
    return scale(
        adjoint(killing(metric)), Fraction(-1, 2),
        name=f"cauchy_{metric.tag}{metric.n}",
    )


@lru_cache(maxsize=None)
def weyl_killing(metric: Metric) -> LinDiffOp:
    """Conformal Killing rows together with the gradient of the trace;
    the gauge system whose solutions are conformal fields with constant
    divergence rescaling."""
    n = metric.n
    ck = conformal_killing(metric)
    trace = _trace_row(metric)
    rows = [list(r) for r in ck.matrix]
    for i in range(1, n + 1):
        di = Poly.var(n, i)
        extra: dict[int, Poly] = {c: di * p for c, p in trace.items()}
        rows.append([extra.get(c, Poly.zero(n)) for c in range(n)])
    labels = list(ck.target.labels) + [f"t{i}" for i in range(1, n + 1)]
    weights = list(ck.target.weights) + [Fraction(1)] * n
    tgt = Bundle(f"sym2tf+t({n})", zip(labels, weights))
    return LinDiffOp(
        f"weyl_killing_{metric.tag}{n}", n, vector_bundle(n), tgt, rows
    )


# -- linearized curvature ---------------------------------------------------------


@lru_cache(maxsize=None)
def riemann_lin(metric: Metric) -> LinDiffOp:
    """Linearized curvature of a metric perturbation Omega, one row per
    independent curvature component:

        K_{kl,ij} = di dk O_jl + dj dl O_ik - di dl O_jk - dj dk O_il.

    The matrix itself does not involve the metric; the metric fixes n and
    the naming.  Second order, n^2(n^2-1)/12 rows."""
    n = metric.n
    rb = RiemannBasis(n)
    idx = _sym_index(n)
    rows: list[dict[int, Poly]] = []
    for (k, l), (i, j) in rb.pairs:
        row: dict[int, Poly] = {}
        for sign, (da, db), (oa, ob) in (
            (1, (i, k), (j, l)),
            (1, (j, l), (i, k)),
            (-1, (i, l), (j, k)),
            (-1, (j, k), (i, l)),
        ):
            c = idx[(min(oa, ob), max(oa, ob))]
            p = Poly.var(n, da) * Poly.var(n, db) * sign
            v = row.get(c, Poly.zero(n)) + p
            if v.is_zero():
                row.pop(c, None)
            else:
                row[c] = v
        rows.append(row)
    return LinDiffOp(
        f"riemann_{metric.tag}{n}",
        n,
        sym_bundle(n),
        riemann_bundle(n, f"riem({n})"),
        _rows_to_matrix(rows, len(idx), n),
    )


def _add_to(row: dict[int, Poly], col: int, p: Poly) -> None:
    v = row.get(col)
    v = p if v is None else v + p
    if v.is_zero():
        row.pop(col, None)
    else:
        row[col] = v


def _ricci_row(metric: Metric, i: int, j: int) -> dict[int, Poly]:
    """2 R_ij = w^{rs} dr ds O_ij + di dj O^tr - w^{rs}(dr di O_sj + dr dj O_si),
    halved."""
    n = metric.n
    idx = _sym_index(n)
    inv = metric.inverse
    row: dict[int, Poly] = {}
    # wave operator on O_ij
    lap = Poly.zero(n)
    for r in range(1, n + 1):
        for s in range(1, n + 1):
            c = inv[r - 1][s - 1]
            if c:
                lap = lap + c * Poly.var(n, r) * Poly.var(n, s)
    _add_to(row, idx[(min(i, j), max(i, j))], lap)
    # di dj of the trace
    dij = Poly.var(n, i) * Poly.var(n, j)
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            c = inv[u - 1][v - 1]
            if c:
                _add_to(row, idx[(min(u, v), max(u, v))], c * dij)
    # cross terms
    for r in range(1, n + 1):
        for s in range(1, n + 1):
            c = inv[r - 1][s - 1]
            if not c:
                continue
            _add_to(row, idx[(min(s, j), max(s, j))],
                    -c * Poly.var(n, r) * Poly.var(n, i))
            _add_to(row, idx[(min(s, i), max(s, i))],
                    -c * Poly.var(n, r) * Poly.var(n, j))
    return {c: p * Fraction(1, 2) for c, p in row.items()}


def _scalar_row(metric: Metric) -> dict[int, Poly]:
    """R = w^{rs} dr ds O^tr - w^{ru} w^{sv} dr ds O_uv."""
    n = metric.n
    idx = _sym_index(n)
    inv = metric.inverse
    row: dict[int, Poly] = {}
    lap = Poly.zero(n)
    for r in range(1, n + 1):
        for s in range(1, n + 1):
            if inv[r - 1][s - 1]:
                lap = lap + inv[r - 1][s - 1] * Poly.var(n, r) * Poly.var(n, s)
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            c = inv[u - 1][v - 1]
            if c:
                _add_to(row, idx[(min(u, v), max(u, v))], c * lap)
    for r in range(1, n + 1):
        for u in range(1, n + 1):
            cru = inv[r - 1][u - 1]
            if not cru:
                continue
            for s in range(1, n + 1):
                for v in range(1, n + 1):
                    csv = inv[s - 1][v - 1]
                    if not csv:
                        continue
                    _add_to(
                        row,
                        idx[(min(u, v), max(u, v))],
                        -cru * csv * Poly.var(n, r) * Poly.var(n, s),
                    )
    return row


@lru_cache(maxsize=None)
def ricci_lin(metric: Metric) -> LinDiffOp:
    n = metric.n
    rows = [_ricci_row(metric, i, j) for i, j in sym_pairs(n)]
    return LinDiffOp(
        f"ricci_{metric.tag}{n}",
        n,
        sym_bundle(n),
        sym_bundle(n, f"ric({n})"),
        _rows_to_matrix(rows, n * (n + 1) // 2, n),
    )


def _index_shift(mat: tuple[tuple[Fraction, ...], ...], n: int
                 ) -> list[list[Fraction]]:
    """Component matrix of A_uv -> m^{ku} m^{lv} A_uv on symmetric pairs.
    With `mat` the inverse metric this raises both indices; with the metric
    itself it lowers them."""
    pairs = sym_pairs(n)
    idx = _sym_index(n)
    out = [[Fraction(0)] * len(pairs) for _ in pairs]
    for (k, l), r in idx.items():
        for u in range(1, n + 1):
            for v in range(1, n + 1):
                c = mat[k - 1][u - 1] * mat[l - 1][v - 1]
                if c:
                    out[r][idx[(min(u, v), max(u, v))]] += c
    return out


def _apply_shift(shift: list[list[Fraction]], rows: list[dict[int, Poly]],
                 nvars: int) -> list[dict[int, Poly]]:
    out: list[dict[int, Poly]] = []
    for srow in shift:
        acc: dict[int, Poly] = {}
        for m, c in enumerate(srow):
            if not c:
                continue
            for col, p in rows[m].items():
                _add_to(acc, col, c * p)
        out.append(acc)
    return out


@lru_cache(maxsize=None)
def scalar_lin(metric: Metric) -> LinDiffOp:
    n = metric.n
    rows = [_scalar_row(metric)]
    return LinDiffOp(
        f"scalar_{metric.tag}{n}",
        n,
        sym_bundle(n),
        scalar_bundle(f"scal({n})"),
        _rows_to_matrix(rows, n * (n + 1) // 2, n),
    )


@lru_cache(maxsize=None)
def einstein_lin(metric: Metric) -> LinDiffOp:
    """Trace-reversed Ricci with both output indices raised by the metric:
    the raising is what makes the operator equal its formal adjoint for an
    indefinite metric, where covariant components alone pick up stray
    signs.  Written out directly from the Ricci and scalar rows so the
    compose identities stay genuine checks elsewhere."""
    n = metric.n
    scal = _scalar_row(metric)
    lower: list[dict[int, Poly]] = []
    for i, j in sym_pairs(n):
        row = dict(_ricci_row(metric, i, j))
        wij = metric[i, j]
        if wij:
            for c, p in scal.items():
                _add_to(row, c, -Fraction(wij, 2) * p)
        lower.append(row)
    rows = _apply_shift(_index_shift(metric.inverse, n), lower, n)
    return LinDiffOp(
        f"einstein_{metric.tag}{n}",
        n,
        sym_bundle(n),
        sym_bundle(n, f"ein({n})"),
        _rows_to_matrix(rows, n * (n + 1) // 2, n),
    )


@lru_cache(maxsize=None)
def c_map(metric: Metric) -> LinDiffOp:
    """Zeroth order: X -> X - (1/2) w tr X with the output indices raised;
    sends the Ricci operator to the Einstein operator."""
    n = metric.n
    rows = _apply_shift(
        _index_shift(metric.inverse, n),
        _trace_adjust_rows(metric, Fraction(-1, 2)),
        n,
    )
    return LinDiffOp(
        f"cmap_{metric.tag}{n}", n, sym_bundle(n), sym_bundle(n, f"adj({n})"),
        _rows_to_matrix(rows, n * (n + 1) // 2, n),
    )


@lru_cache(maxsize=None)
def c_map_inverse(metric: Metric) -> LinDiffOp:
    """Inverse of c_map: lower the indices, then X -> X - 1/(n-2) w tr X.
    Needs n != 2."""
    n = metric.n
    if n == 2:
        raise ValueError("the trace adjustment is not invertible for n = 2")
    lowered = _index_shift(metric.matrix, n)
    adjust = _trace_adjust_rows(metric, Fraction(-1, n - 2))
    rows = []
    for arow in adjust:
        acc: dict[int, Poly] = {}
        for m, p in arow.items():
            for col, c in enumerate(lowered[m]):
                if c:
                    _add_to(acc, col, p * c)
        rows.append(acc)
    return LinDiffOp(
        f"cmapinv_{metric.tag}{n}", n, sym_bundle(n), sym_bundle(n, f"adj({n})"),
        _rows_to_matrix(rows, n * (n + 1) // 2, n),
    )


def _trace_adjust_rows(metric: Metric, coeff: Fraction) -> list[dict[int, Poly]]:
    n = metric.n
    idx = _sym_index(n)
    inv = metric.inverse
    rows: list[dict[int, Poly]] = []
    for i, j in sym_pairs(n):
        row: dict[int, Poly] = {idx[(i, j)]: Poly.const(n, 1)}
        wij = metric[i, j]
        if wij:
            for u in range(1, n + 1):
                for v in range(1, n + 1):
                    c = inv[u - 1][v - 1]
                    if c:
                        _add_to(row, idx[(min(u, v), max(u, v))],
                                Poly.const(n, coeff * wij * c))
        rows.append(row)
    return rows


# -- Weyl ------------------------------------------------------------------------


def _riem_comp_row(metric: Metric, k: int, l: int, i: int, j: int
                   ) -> dict[int, Poly]:
    """G_{kl,ij} = 1/2 (di dl O_jk + dj dk O_il - di dk O_jl - dj dl O_ik);
    contracting with w^{ki} returns minus the Ricci rows."""
    n = metric.n
    idx = _sym_index(n)
    row: dict[int, Poly] = {}
    half = Fraction(1, 2)
    for sign, (da, db), (oa, ob) in (
        (1, (i, l), (j, k)),
        (1, (j, k), (i, l)),
        (-1, (i, k), (j, l)),
        (-1, (j, l), (i, k)),
    ):
        _add_to(row, idx[(min(oa, ob), max(oa, ob))],
                sign * half * Poly.var(n, da) * Poly.var(n, db))
    return row


@lru_cache(maxsize=None)
def _weyl_component_rows(metric: Metric) -> list[dict[int, Poly]]:
    """Every curvature-basis component of the linearized Weyl tensor:

        C = G + 1/(n-2) (w ^ Ric) - Scal/(2(n-1)(n-2)) (w ^ w)

    with (h^k)_{kl,ij} = h_ki k_lj + h_lj k_ki - h_kj k_li - h_li k_kj."""
    n = metric.n
    rb = RiemannBasis(n)
    ric = {
        (i, j): _ricci_row(metric, i, j)
        for i in range(1, n + 1)
        for j in range(i, n + 1)
    }

    def ric_row(a: int, b: int) -> dict[int, Poly]:
        return ric[(min(a, b), max(a, b))]

    scal = _scalar_row(metric)
    c1 = Fraction(1, n - 2)
    c2 = Fraction(1, (n - 1) * (n - 2))
    rows = []
    for (k, l), (i, j) in rb.pairs:
        row = dict(_riem_comp_row(metric, k, l, i, j))
        for sgn, (ma, mb), (ra, rb2) in (
            (1, (k, i), (l, j)),
            (1, (l, j), (k, i)),
            (-1, (k, j), (l, i)),
            (-1, (l, i), (k, j)),
        ):
            w = metric[ma, mb]
            if w:
                for c, p in ric_row(ra, rb2).items():
                    _add_to(row, c, sgn * c1 * w * p)
        wfac = metric[k, i] * metric[l, j] - metric[k, j] * metric[l, i]
        if wfac:
            for c, p in scal.items():
                _add_to(row, c, -c2 * wfac * p)
        rows.append(row)
    return rows


@lru_cache(maxsize=None)
def weyl_component_selection(metric: Metric) -> list[int]:
    """Indices of curvature-basis components that stay independent on the
    trace-free subspace, chosen greedily in basis order."""
    n = metric.n
    rb = RiemannBasis(n)
    f1 = rb.size
    # trace map rows over the curvature basis
    trows: list[dict[int, Fraction]] = []
    inv = metric.inverse
    for l in range(1, n + 1):
        for j in range(l, n + 1):
            acc: dict[int, Fraction] = {}
            for k in range(1, n + 1):
                for i in range(1, n + 1):
                    c = inv[k - 1][i - 1]
                    if not c:
                        continue
                    for idx2, c2 in rb.resolve(k, l, i, j).items():
                        v = acc.get(idx2, Fraction(0)) + c * c2
                        if v:
                            acc[idx2] = v
                        else:
                            acc.pop(idx2, None)
            trows.append(acc)
    null = _nullspace(trows, f1)
    # greedy row selection from the nullspace basis matrix
    picked: list[int] = []
    ech: list[list[Fraction]] = []
    piv: list[int] = []
    for r in range(f1):
        vec = [col[r] for col in null]
        # reduce against current echelon
        for row, pc in zip(ech, piv):
            if vec[pc]:
                f = vec[pc] / row[pc]
                vec = [a - f * b for a, b in zip(vec, row)]
        pc = next((c for c, a in enumerate(vec) if a), None)
        if pc is not None:
            ech.append(vec)
            piv.append(pc)
            picked.append(r)
        if len(picked) == len(null):
            break
    return picked


def _nullspace(rows: list[dict[int, Fraction]], width: int
               ) -> list[list[Fraction]]:
    """Basis of {v : rows . v = 0} as dense columns, deterministic."""
    mat = [[row.get(c, Fraction(0)) for c in range(width)] for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(width):
        pr = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * width
        v[fc] = Fraction(1)
        for rr, pc in enumerate(pivots):
            v[pc] = -mat[rr][fc]
        basis.append(v)
    return basis


@lru_cache(maxsize=None)
def weyl_lin(metric: Metric) -> LinDiffOp:
    """Linearized Weyl tensor on an independent set of trace-free
    components; defined for n >= 4 (it vanishes identically below)."""
    n = metric.n
    if n < 4:
        raise ValueError("the Weyl tensor vanishes identically for n < 4")
    rb = RiemannBasis(n)
    all_rows = _weyl_component_rows(metric)
    picked = weyl_component_selection(metric)
    expected = n * (n + 1) * (n + 2) * (n - 3) // 12
    if len(picked) != expected:
        raise RuntimeError(
            f"internal error: {len(picked)} independent Weyl components, "
            f"expected {expected}"
        )
    labels = rb.labels()
    tgt = Bundle(f"weyl({n})", ((labels[r], Fraction(1)) for r in picked))
    rows = [all_rows[r] for r in picked]
    return LinDiffOp(
        f"weyl_{metric.tag}{n}",
        n,
        sym_bundle(n),
        tgt,
        _rows_to_matrix(rows, n * (n + 1) // 2, n),
    )


# -- vector calculus ----------------------------------------------------------------


def grad(n: int) -> LinDiffOp:
    rows = [[Poly.var(n, i)] for i in range(1, n + 1)]
    return LinDiffOp(f"grad{n}", n, scalar_bundle(), vector_bundle(n), rows)


def div(n: int) -> LinDiffOp:
    rows = [[Poly.var(n, i) for i in range(1, n + 1)]]
    return LinDiffOp(f"div{n}", n, vector_bundle(n), scalar_bundle("scalar"), rows)


def curl() -> LinDiffOp:
    n = 3
    d1, d2, d3 = (Poly.var(3, i) for i in (1, 2, 3))
    z = Poly.zero(3)
    rows = [[z, -d3, d2], [d3, z, -d1], [-d2, d1, z]]
    return LinDiffOp("curl3", 3, vector_bundle(3), vector_bundle(3, "vector'"), rows)


def exterior_derivative(n: int, r: int) -> LinDiffOp:
    """d on r-forms with components indexed by increasing multi-indices."""
    if not 0 <= r < n:
        raise ValueError(f"need 0 <= r < n, got r={r}, n={n}")
    if n > 9:
        raise ValueError("multi-index labels only support n <= 9")
    src_sets = list(combinations(range(1, n + 1), r))
    tgt_sets = list(combinations(range(1, n + 1), r + 1))
    src = Bundle(
        f"forms{r}({n})",
        ((("".join(map(str, s)) or "0"), Fraction(1)) for s in src_sets),
    )
    tgt = Bundle(
        f"forms{r + 1}({n})",
        (("".join(map(str, s)), Fraction(1)) for s in tgt_sets),
    )
    src_idx = {s: c for c, s in enumerate(src_sets)}
    rows = []
    for big in tgt_sets:
        row: dict[int, Poly] = {}
        for pos, k in enumerate(big):
            rest = tuple(x for x in big if x != k)
            row[src_idx[rest]] = Poly.var(n, k) * ((-1) ** pos)
        rows.append(row)
    return LinDiffOp(
        f"extd{n}_{r}", n, src, tgt, _rows_to_matrix(rows, len(src_sets), n)
    )


def box_weyl(metric: Metric) -> LinDiffOp:
    """The dalembertian applied after the linearized Weyl tensor; the
    composite that factors through the linearized Ricci tensor."""
    w = weyl_lin(metric)
    out = compose(dalembertian(metric, w.target), w)
    return out.with_name(f"box_weyl_{metric.tag}{metric.n}")


def dalembertian(metric: Metric, bundle: Bundle | None = None) -> LinDiffOp:
    """The metric trace of second derivatives, acting componentwise."""
    n = metric.n
    if bundle is None:
        bundle = scalar_bundle()
    inv = metric.inverse
    lap = Poly.zero(n)
    for r in range(1, n + 1):
        for s in range(1, n + 1):
            if inv[r - 1][s - 1]:
                lap = lap + inv[r - 1][s - 1] * Poly.var(n, r) * Poly.var(n, s)
    z = Poly.zero(n)
    rows = [
        [lap if i == j else z for j in range(bundle.dim)]
        for i in range(bundle.dim)
    ]
    out_bundle = Bundle(bundle.name, bundle.components)
    return LinDiffOp(f"box_{metric.tag}{n}", n, bundle, out_bundle, rows)


# -- elasticity -----------------------------------------------------------------------


def lame(lam, mu, n: int) -> LinDiffOp:
    """Elastostatics on displacement: (lam+mu) grad div + mu laplacian."""
    lam, mu = Fraction(lam), Fraction(mu)
    if mu == 0:
        raise ValueError("mu must be nonzero")
    lap = Poly.zero(n)
    for i in range(1, n + 1):
        lap = lap + Poly.var(n, i) * Poly.var(n, i)
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            p = (lam + mu) * Poly.var(n, i) * Poly.var(n, j)
            if i == j:
                p = p + mu * lap
            row.append(p)
        rows.append(row)
    return LinDiffOp(
        f"lame{n}", n, vector_bundle(n), vector_bundle(n, "force"), rows
    )


def hooke2d(lam, mu) -> LinDiffOp:
    """Plane stress-strain law: sigma = (lam/2) tr(O) w + mu O, n = 2."""
    lam, mu = Fraction(lam), Fraction(mu)
    if mu == 0 or lam + mu == 0:
        raise ValueError("need mu != 0 and lam + mu != 0")
    half = Fraction(1, 2)
    c = lam * half
    mat = [
        [c + mu, Fraction(0), c],
        [Fraction(0), mu, Fraction(0)],
        [c, Fraction(0), c + mu],
    ]
    rows = [[Poly.const(2, x) for x in row] for row in mat]
    return LinDiffOp(
        "hooke2d", 2, sym_bundle(2, "strain"), sym_bundle(2, "stress"), rows
    )


def hooke2d_inverse(lam, mu) -> LinDiffOp:
    """Strain from stress: mu O = sigma - lam/(2(lam+mu)) tr(sigma) w."""
    lam, mu = Fraction(lam), Fraction(mu)
    if mu == 0 or lam + mu == 0:
        raise ValueError("need mu != 0 and lam + mu != 0")
    c = Fraction(lam, 2 * (lam + mu))
    mat = [
        [1 - c, Fraction(0), -c],
        [Fraction(0), Fraction(1), Fraction(0)],
        [-c, Fraction(0), 1 - c],
    ]
    rows = [[Poly.const(2, Fraction(x) / mu) for x in row] for row in mat]
    return LinDiffOp(
        "hooke2d_inv", 2, sym_bundle(2, "stress"), sym_bundle(2, "strain"), rows
    )


# -- planar Cosserat media --------------------------------------------------------


def cosserat_spencer() -> LinDiffOp:
    """First Spencer operator of the planar Cosserat group action, on
    (u1, u2, r): the six first-jet components."""
    d1, d2 = Poly.var(2, 1), Poly.var(2, 2)
    z = Poly.zero(2)
    one = Poly.const(2, 1)
    rows = [
        [d1, z, z],
        [d2, z, -one],
        [z, d1, one],
        [z, d2, z],
        [z, z, d1],
        [z, z, d2],
    ]
    src = Bundle("displacement+rotation", (("u1", 1), ("u2", 1), ("r", 1)))
    tgt = Bundle(
        "jets", (("11", 1), ("12", 1), ("21", 1), ("22", 1), ("r1", 1), ("r2", 1))
    )
    return LinDiffOp("cosserat_spencer", 2, src, tgt, rows)


def cosserat_equilibrium() -> LinDiffOp:
    """Force and couple balance on (stress, couple stress); minus the
    adjoint of the Spencer operator."""
    return scale(adjoint(cosserat_spencer()), -1, name="cosserat_equilibrium")


def cosserat_parametrization() -> LinDiffOp:
    """Airy-type potentials for the planar Cosserat equilibrium."""
    d1, d2 = Poly.var(2, 1), Poly.var(2, 2)
    z = Poly.zero(2)
    one = Poly.const(2, 1)
    rows = [
        [d2, z, z],
        [-d1, z, z],
        [z, -d2, z],
        [z, d1, z],
        [one, z, d2],
        [z, -one, -d1],
    ]
    src = Bundle("potentials", (("p1", 1), ("p2", 1), ("p3", 1)))
    tgt = cosserat_spencer().target
    return LinDiffOp("cosserat_parametrization", 2, src, tgt, rows)


@dataclass(frozen=True)
class Cosserat2D:
    """The planar Cosserat triple: jet operator, its balance equations,
    and potentials for the latter."""

    spencer_D1: LinDiffOp
    equilibrium: LinDiffOp
    parametrization: LinDiffOp


def cosserat2d() -> Cosserat2D:
    return Cosserat2D(
        spencer_D1=cosserat_spencer(),
        equilibrium=cosserat_equilibrium(),
        parametrization=cosserat_parametrization(),
    )


# -- dimension bookkeeping -----------------------------------------------------------


@dataclass(frozen=True)
class DimTable:
    """Closed-form dimension counts used across the examples."""

    n: int

    @property
    def f1(self) -> int:
        n = self.n
        return n * n * (n * n - 1) // 12

    @property
    def f1hat(self) -> int:
        n = self.n
        return n * (n + 1) * (n + 2) * (n - 3) // 12

    @property
    def group_isometry(self) -> int:
        return self.n * (self.n + 1) // 2

    @property
    def group_homothety(self) -> int:
        return self.group_isometry + 1

    @property
    def group_conformal(self) -> int:
        return (self.n + 1) * (self.n + 2) // 2

    def jet_dim(self, m: int, q: int) -> int:
        return m * comb(self.n + q, self.n)

    def sym_dim(self, q: int, m: int = 1) -> int:
        return m * comb(self.n + q - 1, self.n - 1)

    def spencer_full_dim(self, r: int, q: int, m: int) -> int:
        n = self.n
        total = comb(n, r) * self.jet_dim(m, q)
        for i in range(1, r + 1):
            total += (-1) ** i * comb(n, r - i) * self.sym_dim(q + i, m)
        return total


def dims(n: int) -> DimTable:
    return DimTable(n)


def diagram1_table() -> dict:
    """Spencer/Janet dimension split for the three planar geometric group
    actions at jet order 3 on two unknowns; the rows of each group sum
    columnwise to the full complex."""
    full = (20, 30, 12)
    groups = [
        {"name": "isometry", "dim": 3, "spencer": (3, 6, 3), "janet": (17, 24, 9)},
        {"name": "homothety", "dim": 4, "spencer": (4, 8, 4), "janet": (16, 22, 8)},
        {"name": "conformal", "dim": 6, "spencer": (6, 12, 6), "janet": (14, 18, 6)},
    ]
    return {"n": 2, "unknowns": 2, "jet_order": 3, "full": full, "groups": groups}


# -- registry for the command line ----------------------------------------------------


@dataclass(frozen=True)
class ZooEntry:
    key: str
    needs_metric: bool = False
    needs_n: bool = False
    needs_lame: bool = False
    needs_r: bool = False
    fixed_n: int | None = None
    summary: str = ""


ZOO = {
    "killing": ZooEntry("killing", needs_metric=True, summary="Lie derivative of the metric"),
    "conformal_killing": ZooEntry("conformal_killing", needs_metric=True,
                                  summary="trace-free Killing operator"),
    "cauchy": ZooEntry("cauchy", needs_metric=True, summary="symmetrized gradient"),
    "weyl_killing": ZooEntry("weyl_killing", needs_metric=True,
                             summary="conformal Killing plus trace gradient"),
    "riemann": ZooEntry("riemann", needs_metric=True, summary="linearized curvature tensor"),
    "ricci": ZooEntry("ricci", needs_metric=True, summary="linearized Ricci tensor"),
    "scalar": ZooEntry("scalar", needs_metric=True, summary="linearized scalar curvature"),
    "einstein": ZooEntry("einstein", needs_metric=True, summary="linearized Einstein tensor"),
    "c_map": ZooEntry("c_map", needs_metric=True, summary="trace flip: Ricci to Einstein"),
    "c_map_inverse": ZooEntry("c_map_inverse", needs_metric=True,
                              summary="trace flip back: Einstein to Ricci"),
    "weyl": ZooEntry("weyl", needs_metric=True, summary="linearized Weyl tensor (n >= 4)"),
    "dalembertian": ZooEntry("dalembertian", needs_metric=True,
                             summary="metric second-order trace on scalars"),
    "box_weyl": ZooEntry("box_weyl", needs_metric=True,
                         summary="dalembertian after the linearized Weyl tensor"),
    "grad": ZooEntry("grad", needs_n=True, summary="gradient"),
    "div": ZooEntry("div", needs_n=True, summary="divergence"),
    "curl": ZooEntry("curl", fixed_n=3, summary="curl in three variables"),
    "exterior_derivative": ZooEntry("exterior_derivative", needs_n=True, needs_r=True,
                                    summary="d on r-forms"),
    "lame": ZooEntry("lame", needs_n=True, needs_lame=True,
                     summary="elastostatics operator"),
    "hooke2d": ZooEntry("hooke2d", needs_lame=True, fixed_n=2,
                        summary="plane stress-strain law"),
    "hooke2d_inverse": ZooEntry("hooke2d_inverse", needs_lame=True, fixed_n=2,
                                summary="plane strain from stress"),
    "cosserat_spencer": ZooEntry("cosserat_spencer", fixed_n=2,
                                 summary="planar Cosserat first Spencer operator"),
    "cosserat_equilibrium": ZooEntry("cosserat_equilibrium", fixed_n=2,
                                     summary="planar Cosserat balance equations"),
    "cosserat_parametrization": ZooEntry("cosserat_parametrization", fixed_n=2,
                                         summary="potentials for Cosserat balance"),
}


def build(name: str, *, n: int | None = None, metric: str = "euclidean",
          lam=1, mu=1, r: int = 0) -> LinDiffOp:
    """Construct a zoo operator by name; the CLI calls straight into this."""
    entry = ZOO.get(name)
    if entry is None:
        raise KeyError(f"unknown zoo operator {name!r}")
    if entry.fixed_n is not None:
        n = entry.fixed_n
    if entry.needs_metric or entry.needs_n:
        if n is None:
            raise ValueError(f"{name} needs --n")
    if entry.needs_metric:
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}")
        g = METRICS[metric](n)
        fn = {
            "killing": killing,
            "conformal_killing": conformal_killing,
            "cauchy": cauchy,
            "weyl_killing": weyl_killing,
            "riemann": riemann_lin,
            "ricci": ricci_lin,
            "scalar": scalar_lin,
            "einstein": einstein_lin,
            "c_map": c_map,
            "c_map_inverse": c_map_inverse,
            "weyl": weyl_lin,
            "dalembertian": dalembertian,
            "box_weyl": box_weyl,
        }[name]
        return fn(g)
    if name == "grad":
        return grad(n)
    if name == "div":
        return div(n)
    if name == "curl":
        return curl()
    if name == "exterior_derivative":
        return exterior_derivative(n, r)
    if name == "lame":
        return lame(lam, mu, n)
    if name == "hooke2d":
        return hooke2d(lam, mu)
    if name == "hooke2d_inverse":
        return hooke2d_inverse(lam, mu)
    if name == "cosserat_spencer":
        return cosserat_spencer()
    if name == "cosserat_equilibrium":
        return cosserat_equilibrium()
    if name == "cosserat_parametrization":
        return cosserat_parametrization()
    raise KeyError(f"unhandled zoo operator {name!r}")
