"""Submodules of free modules over Q[d1..dn]: Groebner bases, syzygies,
membership, minimal generating sets, ranks and free resolutions.

Free-module elements are tuples of Poly sharing one nvars.  The term order
is fixed: degrevlex on monomials, position-over-term with lower position
winning ties (so all comparisons look at the monomial first).  Syzygies are
computed by running Buchberger on rows augmented with unit tracking columns
under a block order that makes every genuine term beat every tracking term;
elements whose genuine block dies yield syzygy generators.

Everything here is deterministic: pair selection, reducer choice and output
ordering are all fixed by the term order and insertion order, and reduced
Groebner bases are mathematically unique, so results do not depend on
generator permutations or thread count.
"""

from __future__ import annotations

import heapq
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

from .poly import (
    Monomial,
    Poly,
    mono_div,
    mono_divides,
    mono_key,
    mono_lcm,
    mono_mul,
    poly_vector_str,
)

BUDGET_ENV = "DGCALC_BUDGET_DEGREE"
DEFAULT_BUDGET = 12


class BudgetExceeded(RuntimeError):
    """A Groebner run needed an S-pair above the degree budget.

    Raise instead of silently truncating: a partial basis is not a basis.
    The budget is controlled by the DGCALC_BUDGET_DEGREE environment
    variable (default 12).
    """


def _budget() -> int:
    raw = os.environ.get(BUDGET_ENV, "")
    try:
        return int(raw) if raw else DEFAULT_BUDGET
    except ValueError:
        return DEFAULT_BUDGET


# -- free module elements ----------------------------------------------------


class FreeElem:
    """An element of the free module D^(1 x width), D = Q[d1..dn]."""

    __slots__ = ("entries", "_hash")

    def __init__(self, entries: Iterable[Poly]):
        entries = tuple(entries)
        if not entries:
            raise ValueError("free module elements need positive width")
        nv = entries[0].nvars
        for p in entries:
            if p.nvars != nv:
                raise ValueError("mixed nvars inside one element")
        self.entries = entries
        self._hash: int | None = None

    @staticmethod
    def from_strs(nvars: int, texts: Sequence[str]) -> "FreeElem":
        from .poly import parse

        return FreeElem(parse(t, nvars) for t in texts)

    @property
    def width(self) -> int:
        return len(self.entries)

    @property
    def nvars(self) -> int:
        return self.entries[0].nvars

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.entries)

    def degree(self) -> int:
        return max(p.degree() for p in self.entries)

    def is_homogeneous(self) -> bool:
        """All nonzero entries homogeneous of one common total degree."""
        degs = set()
        for p in self.entries:
            if p.is_zero():
                continue
            if not p.is_homogeneous():
                return False
            degs.add(p.degree())
        return len(degs) <= 1

    def normalized(self) -> "FreeElem":
        """Scale to primitive integer coefficients with positive leading
        coefficient in the module order.  Canonical up to nothing: equal
        elements up to a rational factor normalize identically."""
        terms = _elem_to_terms(self)
        if not terms:
            return self
        ints, _ = _terms_to_int(terms)
        lead = max(ints, key=_term_key_plain)
        if ints[lead] < 0:
            ints = {t: -c for t, c in ints.items()}
        return _int_to_elem(ints, self.width, self.nvars)

    def dot(self, rows: Sequence["FreeElem"]) -> "FreeElem":
        """Row-vector times matrix: sum_i entries[i] * rows[i]."""
        if len(rows) != self.width:
            raise ValueError("dot width mismatch")
        width = rows[0].width
        out = [Poly.zero(self.nvars) for _ in range(width)]
        for c, row in zip(self.entries, rows):
            if c.is_zero():
                continue
            for j, q in enumerate(row.entries):
                if not q.is_zero():
                    out[j] = out[j] + c * q
        return FreeElem(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeElem):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.entries)
        return self._hash

    def __str__(self) -> str:
        return poly_vector_str(self.entries)

    def __repr__(self) -> str:
        return f"FreeElem{self}"


@dataclass(frozen=True)
class ModuleOrder:
    """Term order on free modules.  Only one is implemented: degrevlex on
    monomials, then lower position first, monomial compared first."""

    base: str = "degrevlex"
    position_rule: str = "top_lower_first"

    def key(self, position: int, monomial: Monomial) -> tuple:
        return (mono_key(monomial), -position)


DEFAULT_ORDER = ModuleOrder()

Term = tuple[int, Monomial]  # (position, monomial)

_MKEY_CACHE: dict[Monomial, tuple] = {}


def _mkey(m: Monomial) -> tuple:
    k = _MKEY_CACHE.get(m)
    if k is None:
        k = (sum(m), tuple(-e for e in reversed(m)))
        _MKEY_CACHE[m] = k
    return k


def _term_key_plain(t: Term) -> tuple:
    return (_mkey(t[1]), -t[0])


def _elem_to_terms(e: FreeElem) -> dict[Term, Fraction]:
    out: dict[Term, Fraction] = {}
    for pos, p in enumerate(e.entries):
        for m, c in p.terms.items():
            out[(pos, m)] = c
    return out


def _terms_to_int(terms: dict[Term, Fraction]) -> tuple[dict[Term, int], Fraction]:
    """Clear denominators and divide out integer content.  Returns the
    integer term dict and the factor by which the input was multiplied."""
    if not terms:
        return {}, Fraction(1)
    den = 1
    for c in terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = {t: int(c * den) for t, c in terms.items()}
    g = 0
    for v in ints.values():
        g = math.gcd(g, v)
    if g > 1:
        ints = {t: v // g for t, v in ints.items()}
    return ints, Fraction(den, g if g > 1 else 1)


def _terms_to_int_den(terms: dict[Term, Fraction]) -> tuple[dict[Term, int], int]:
    """Clear denominators only; content is kept.  Needed when the element is
    augmented with tracking columns that must stay aligned with the input."""
    if not terms:
        return {}, 1
    den = 1
    for c in terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    return {t: int(c * den) for t, c in terms.items()}, den


def _int_to_elem(ints: dict[Term, int], width: int, nvars: int) -> FreeElem:
    cols: list[dict[Monomial, Fraction]] = [dict() for _ in range(width)]
    for (pos, m), c in ints.items():
        cols[pos][m] = Fraction(c)
    return FreeElem(Poly(nvars, col) for col in cols)


def _int_to_elem_scaled(
    ints: dict[Term, int], width: int, nvars: int, scale: Fraction
) -> FreeElem:
    cols: list[dict[Monomial, Fraction]] = [dict() for _ in range(width)]
    for (pos, m), c in ints.items():
        cols[pos][m] = c * scale
    return FreeElem(Poly(nvars, col) for col in cols)


# -- the Buchberger run ------------------------------------------------------


class _Run:
    """One Buchberger computation over integer term dicts.

    `split` partitions positions into a genuine block [0, split) and a
    tracking block [split, width); genuine terms always outrank tracking
    terms.  A plain run uses split == width.  Pair pruning uses the
    Gebauer-Moeller chain criteria; the equal-lcm collapse is optional and
    stays off during tracking runs so no syzygy generator is lost.
    """

    def __init__(
        self,
        width: int,
        nvars: int,
        split: int,
        budget: int,
        prune: bool = True,
        collapse_equal_lcm: bool = True,
        threads: int = 1,
    ):
        self.width = width
        self.nvars = nvars
        self.split = split
        self.budget = budget
        self.prune = prune
        self.collapse = collapse_equal_lcm
        self.threads = max(1, threads)
        self.basis: list[dict[Term, int]] = []
        self.lts: list[tuple[Term, int]] = []
        self.by_pos: dict[int, list[int]] = {}
        self.pairs: list[tuple[int, tuple, int, int, int]] = []  # heap
        self.alive: dict[tuple[int, int], Monomial] = {}
        self.harvest: list[dict[Term, int]] = []

    # term order with the block flag in front
    def _key(self, t: Term) -> tuple:
        return (t[0] < self.split, _mkey(t[1]), -t[0])

    def _lt(self, h: dict[Term, int]) -> Term:
        return max(h, key=self._key)

    def _find_reducer(self, t: Term) -> int:
        pos, m = t
        for idx in self.by_pos.get(pos, ()):  # insertion order: deterministic
            if mono_divides(self.lts[idx][0][1], m):
                return idx
        return -1

    def reduce_full(self, h: dict[Term, int]) -> tuple[dict[Term, int], Fraction]:
        """Pseudo-reduce every reducible term.  Returns (remainder, scale)
        with remainder == scale * input  -  combination of basis elements."""
        scale = Fraction(1)
        if not h:
            return h, scale
        # heapq is a min-heap; _negkey inverts the term order so the pop
        # order runs from the largest term downward
        heap = [(self._negkey(t), t) for t in h]
        heapq.heapify(heap)
        done: set[Term] = set()
        steps = 0
        while heap:
            _, t = heapq.heappop(heap)
            if t in done or t not in h:
                continue
            idx = self._find_reducer(t)
            if idx < 0:
                done.add(t)
                continue
            g = self.basis[idx]
            (gpos, gm), lc = self.lts[idx]
            c = h[t]
            gam = math.gcd(lc, c)
            a = lc // gam
            b = c // gam
            if a < 0:
                a, b = -a, -b
            if a != 1:
                scale = scale * a
                for k in h:
                    h[k] *= a
            shift = mono_div(t[1], gm)
            for (p2, m2), gc in g.items():
                k2 = (p2, mono_mul(m2, shift))
                v = h.get(k2, 0) - b * gc
                if v:
                    if k2 not in h:
                        heapq.heappush(heap, (self._negkey(k2), k2))
                    h[k2] = v
                else:
                    h.pop(k2, None)
            steps += 1
            if steps % 16 == 0 and h:
                g0 = 0
                for v in h.values():
                    g0 = math.gcd(g0, v)
                if g0 > 1:
                    for k in h:
                        h[k] //= g0
                    scale = scale / g0
        return h, scale

    def _negkey(self, t: Term) -> tuple:
        deg, rev = _mkey(t[1])
        return (t[0] >= self.split, -deg, tuple(-x for x in rev), t[0])

    def _content_normalize(self, h: dict[Term, int]) -> dict[Term, int]:
        g = 0
        for v in h.values():
            g = math.gcd(g, v)
        if g > 1:
            h = {t: v // g for t, v in h.items()}
        lead = self._lt(h)
        if h[lead] < 0:
            h = {t: -v for t, v in h.items()}
        return h

    def add_input(self, h: dict[Term, int]) -> None:
        self._process(h)

    def _real_part_dead(self, h: dict[Term, int]) -> bool:
        return all(pos >= self.split for pos, _ in h)

    def _process(self, h: dict[Term, int]) -> None:
        h, _ = self.reduce_full(h)
        if not h:
            return
        if self._real_part_dead(h):
            if self.split < self.width:
                self.harvest.append(self._content_normalize(h))
            return
        h = self._content_normalize(h)
        self._add_basis(h)

    def _add_basis(self, h: dict[Term, int]) -> None:
        t = len(self.basis)
        lt = self._lt(h)
        self.basis.append(h)
        self.lts.append((lt, h[lt]))
        pos = lt[0]
        peers = self.by_pos.setdefault(pos, [])
        # new pairs against same-position elements, then prune
        cand: dict[int, Monomial] = {}
        for i in peers:
            cand[i] = mono_lcm(self.lts[i][0][1], lt[1])
        if self.prune and cand:
            # chain criterion among the new pairs: drop (i,t) when another
            # new pair's lcm strictly divides its lcm
            drop: set[int] = set()
            items = sorted(cand.items())
            for i, li in items:
                for j, lj in items:
                    if i != j and lj != li and mono_divides(lj, li):
                        drop.add(i)
                        break
            for i in drop:
                del cand[i]
            if self.collapse:
                seen: dict[Monomial, int] = {}
                for i in sorted(cand):
                    L = cand[i]
                    if L in seen:
                        del cand[i]
                    else:
                        seen[L] = i
            # chain criterion against existing pairs
            for (i, j), L in list(self.alive.items()):
                if self.lts[i][0][0] != pos:
                    continue
                if mono_divides(lt[1], L):
                    lit = cand.get(i) or mono_lcm(self.lts[i][0][1], lt[1])
                    ljt = cand.get(j) or mono_lcm(self.lts[j][0][1], lt[1])
                    if lit != L and ljt != L:
                        del self.alive[(i, j)]
        for i, L in sorted(cand.items()):
            self.alive[(i, t)] = L
            heapq.heappush(self.pairs, (sum(L), _mkey(L), pos, i, t))
        peers.append(t)

    def _spair(self, i: int, j: int) -> dict[Term, int]:
        (pi, mi), ci = self.lts[i]
        (pj, mj), cj = self.lts[j]
        L = mono_lcm(mi, mj)
        gam = math.gcd(ci, cj)
        a = cj // gam
        b = ci // gam
        si = mono_div(L, mi)
        sj = mono_div(L, mj)
        h: dict[Term, int] = {}
        for (p, m), c in self.basis[i].items():
            k = (p, mono_mul(m, si))
            h[k] = h.get(k, 0) + a * c
        for (p, m), c in self.basis[j].items():
            k = (p, mono_mul(m, sj))
            v = h.get(k, 0) - b * c
            if v:
                h[k] = v
            else:
                h.pop(k, None)
        return h

    def run(self) -> None:
        if self.threads > 1 and self.split == self.width:
            self._run_batched()
            return
        while self.pairs:
            deg, _, _, i, j = heapq.heappop(self.pairs)
            if (i, j) not in self.alive:
                continue
            del self.alive[(i, j)]
            if deg > self.budget:
                raise BudgetExceeded(
                    f"S-pair of degree {deg} exceeds budget {self.budget}; "
                    f"raise {BUDGET_ENV} to go further"
                )
            self._process(self._spair(i, j))

    def _run_batched(self) -> None:
        """Reduce all minimal-degree pairs concurrently, then fold results in
        deterministically.  The reduced basis at the end is the unique one,
        so the outcome matches the sequential run byte for byte."""
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            while self.pairs:
                batch: list[tuple[int, int]] = []
                deg0 = self.pairs[0][0]
                if deg0 > self.budget:
                    raise BudgetExceeded(
                        f"S-pair of degree {deg0} exceeds budget {self.budget}; "
                        f"raise {BUDGET_ENV} to go further"
                    )
                while self.pairs and self.pairs[0][0] == deg0:
                    _, _, _, i, j = heapq.heappop(self.pairs)
                    if (i, j) in self.alive:
                        del self.alive[(i, j)]
                        batch.append((i, j))
                spolys = list(pool.map(lambda ij: self._spair(*ij), batch))
                for h in spolys:  # folding must stay ordered
                    self._process(h)

    def interreduced_basis(self) -> list[dict[Term, int]]:
        """Mutually reduce the basis; the result is the reduced GB up to
        scaling, sorted by (leading position, leading monomial)."""
        elems = list(self.basis)
        changed = True
        while changed:
            changed = False
            # drop elements whose lead is divisible by another lead
            keep: list[dict[Term, int]] = []
            lts = [self._lt(h) for h in elems]
            for a, h in enumerate(elems):
                (pa, ma) = lts[a]
                dominated = False
                for b, (pb, mb) in enumerate(lts):
                    if a == b or pa != pb:
                        continue
                    if mono_divides(mb, ma) and (mb != ma or b < a):
                        dominated = True
                        break
                if not dominated:
                    keep.append(h)
            if len(keep) != len(elems):
                changed = True
            elems = keep
            # tail-reduce each against the others
            out: list[dict[Term, int]] = []
            for a, h in enumerate(elems):
                others = elems[:a] + elems[a + 1 :]
                sub = _Run(self.width, self.nvars, self.split, self.budget)
                for o in others:
                    sub._add_basis(dict(o))
                r, _ = sub.reduce_full(dict(h))
                r = self._content_normalize(r)
                if r != h:
                    changed = True
                if r:
                    out.append(r)
            elems = out
        elems.sort(key=lambda h: (self._lt(h)[0], _mkey(self._lt(h)[1])))
        return elems


# -- public Groebner interface ------------------------------------------------


class GroebnerBasis:
    """Reduced Groebner basis of a row module, with a reduction service.

    Generators are monic, mutually reduced, and sorted by leading position
    then leading monomial; this basis is unique for the module, so equality
    of bases is equality of modules.
    """

    def __init__(self, order: ModuleOrder, width: int, nvars: int,
                 generators: tuple[FreeElem, ...]):
        self.order = order
        self.width = width
        self.nvars = nvars
        self.generators = generators
        self._run = _Run(width, nvars, width, _budget())
        for g in generators:
            ints, _ = _terms_to_int(_elem_to_terms(g))
            self._run._add_basis(ints)

    def normal_form(self, elem: FreeElem) -> FreeElem:
        if elem.width != self.width:
            raise ValueError("element width does not match basis width")
        terms = _elem_to_terms(elem)
        ints, mult = _terms_to_int(terms)
        if not ints:
            return elem
        h, scale = self._run.reduce_full(dict(ints))
        if not h:
            return FreeElem(Poly.zero(self.nvars) for _ in range(self.width))
        return _int_to_elem_scaled(h, self.width, self.nvars, 1 / (scale * mult))

    def contains(self, elem: FreeElem) -> bool:
        return self.normal_form(elem).is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroebnerBasis):
            return NotImplemented
        return (
            self.width == other.width
            and self.nvars == other.nvars
            and self.generators == other.generators
        )

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)


_GB_CACHE: dict[tuple, GroebnerBasis] = {}
_SYZ_CACHE: dict[tuple, tuple[FreeElem, ...]] = {}
_MIN_CACHE: dict[tuple, tuple[FreeElem, ...]] = {}


def _as_elems(rows: Sequence) -> list[FreeElem]:
    out = []
    for r in rows:
        out.append(r if isinstance(r, FreeElem) else FreeElem(r))
    if not out:
        raise ValueError("empty generator list: width is undetermined")
    w = out[0].width
    for e in out:
        if e.width != w:
            raise ValueError("generators of mixed width")
    return out


def reduced_groebner(rows: Sequence, *, threads: int = 1) -> GroebnerBasis:
    elems = _as_elems(rows)
    width, nvars = elems[0].width, elems[0].nvars
    key = (tuple(elems), _budget())
    hit = _GB_CACHE.get(key)
    if hit is not None:
        return hit
    run = _Run(width, nvars, width, _budget(), threads=threads)
    for e in elems:
        ints, _ = _terms_to_int(_elem_to_terms(e))
        if ints:
            run.add_input(ints)
    run.run()
    gens = []
    for h in run.interreduced_basis():
        lt = run._lt(h)
        gens.append(_int_to_elem_scaled(h, width, nvars, Fraction(1, h[lt])))
    gb = GroebnerBasis(DEFAULT_ORDER, width, nvars, tuple(gens))
    _GB_CACHE[key] = gb
    return gb


def normal_form(elem: FreeElem, gb: GroebnerBasis) -> FreeElem:
    return gb.normal_form(elem)


def module_contains(gens: Sequence, elem: FreeElem, *, threads: int = 1) -> bool:
    return reduced_groebner(gens, threads=threads).contains(elem)


def module_equal(gens_a: Sequence, gens_b: Sequence, *, threads: int = 1) -> bool:
    a = _as_elems(gens_a)
    b = _as_elems(gens_b)
    if a[0].width != b[0].width or a[0].nvars != b[0].nvars:
        return False
    gba = reduced_groebner(a, threads=threads)
    gbb = reduced_groebner(b, threads=threads)
    # reduced bases are unique, so one comparison settles it
    return gba == gbb


def syzygies(rows: Sequence, *, prune: bool = True) -> list[FreeElem]:
    """Generators of the relation module {c : sum_i c_i * rows_i = 0}.

    Output width equals len(rows).  The list generates the full syzygy
    module; it is not minimized here.  Each returned relation is verified
    against the input before being handed back.
    """
    elems = _as_elems(rows)
    k = len(elems)
    width, nvars = elems[0].width, elems[0].nvars
    key = (tuple(elems), _budget(), prune)
    hit = _SYZ_CACHE.get(key)
    if hit is not None:
        return list(hit)
    run = _Run(width + k, nvars, width, _budget(), prune=prune,
               collapse_equal_lcm=False)
    for i, e in enumerate(elems):
        ints, den = _terms_to_int_den(_elem_to_terms(e))
        # tracking column scaled identically, so relations hold for the
        # rows exactly as given, not for rescaled ones
        ints[(width + i, (0,) * nvars)] = den
        run.add_input(ints)
    run.run()
    out: list[FreeElem] = []
    zero = Poly.zero(nvars)
    for h in run.harvest:
        shifted = {(pos - width, m): c for (pos, m), c in h.items()}
        s = _int_to_elem(shifted, k, nvars)
        check = s.dot(elems)
        if not check.is_zero():
            raise RuntimeError("internal error: harvested relation fails to annihilate")
        out.append(s)
    _SYZ_CACHE[key] = tuple(out)
    return out


# -- minimal generating sets ---------------------------------------------------


class _Echelon:
    """Sparse echelon form over Q for dict-vectors keyed by (pos, monomial)."""

    def __init__(self):
        self.rows: dict[Term, dict[Term, Fraction]] = {}

    def reduce(self, v: dict[Term, Fraction]) -> dict[Term, Fraction]:
        v = dict(v)
        while v:
            t = max(v, key=_term_key_plain)
            row = self.rows.get(t)
            if row is None:
                return v
            c = v[t]
            for k, rc in row.items():
                s = v.get(k, Fraction(0)) - c * rc
                if s:
                    v[k] = s
                else:
                    v.pop(k, None)
        return v

    def insert(self, v: dict[Term, Fraction]) -> bool:
        """Insert if independent; returns True when the vector was new."""
        v = self.reduce(v)
        if not v:
            return False
        t = max(v, key=_term_key_plain)
        c = v[t]
        self.rows[t] = {k: val / c for k, val in v.items()}
        return True


def _monomials_of_degree(nvars: int, deg: int) -> list[Monomial]:
    if deg == 0:
        return [(0,) * nvars]
    out = []
    for combo in combinations_with_replacement(range(nvars), deg):
        m = [0] * nvars
        for i in combo:
            m[i] += 1
        out.append(tuple(m))
    return out


def _elem_to_fraction_terms(e: FreeElem) -> dict[Term, Fraction]:
    return _elem_to_terms(e)


def _shift_terms(terms: dict[Term, Fraction], m: Monomial) -> dict[Term, Fraction]:
    return {(pos, mono_mul(mm, m)): c for (pos, mm), c in terms.items()}


def minimize_generators(gens: Sequence, *, threads: int = 1) -> list[FreeElem]:
    """Drop redundant generators greedily.

    Input is normalized, deduplicated and sorted by (degree, text); each
    element contained in the module of all the others is removed.  For
    homogeneous inputs the containment test is plain linear algebra degree
    by degree, which also makes the surviving count the graded minimal
    number of generators, independent of the representative choice.
    """
    elems = [e.normalized() for e in _as_elems(gens)]
    elems = [e for e in elems if not e.is_zero()]
    if not elems:
        return []
    seen: set[FreeElem] = set()
    uniq: list[FreeElem] = []
    for e in elems:
        if e not in seen:
            seen.add(e)
            uniq.append(e)
    uniq.sort(key=lambda e: (e.degree(), str(e)))
    key = (tuple(uniq), _budget())
    hit = _MIN_CACHE.get(key)
    if hit is not None:
        return list(hit)
    if all(e.is_homogeneous() for e in uniq):
        kept = _minimize_homogeneous(uniq)
    else:
        kept = _minimize_general(uniq, threads)
    _MIN_CACHE[key] = tuple(kept)
    return kept


def _minimize_homogeneous(elems: list[FreeElem]) -> list[FreeElem]:
    nvars = elems[0].nvars
    by_deg: dict[int, list[FreeElem]] = {}
    for e in elems:
        by_deg.setdefault(e.degree(), []).append(e)
    kept: list[FreeElem] = []
    for d in sorted(by_deg):
        block = by_deg[d]
        fixed = _Echelon()
        for g in kept:  # all strictly lower degree by construction
            delta = d - g.degree()
            base = _elem_to_fraction_terms(g)
            for m in _monomials_of_degree(nvars, delta):
                fixed.insert(_shift_terms(base, m))
        reduced = [fixed.reduce(_elem_to_fraction_terms(e)) for e in block]
        alive = [i for i, v in enumerate(reduced) if v]
        # leave-one-out dependence within the degree block
        for i in list(alive):
            ech = _Echelon()
            for j in alive:
                if j != i:
                    ech.insert(dict(reduced[j]))
            if not ech.reduce(dict(reduced[i])):
                alive.remove(i)
        kept.extend(block[i] for i in alive)
    return kept


def _minimize_general(elems: list[FreeElem], threads: int) -> list[FreeElem]:
    alive = list(elems)
    i = 0
    while i < len(alive):
        others = alive[:i] + alive[i + 1 :]
        if others and reduced_groebner(others, threads=threads).contains(alive[i]):
            alive.pop(i)
        else:
            i += 1
    return alive


# -- division with cofactors ----------------------------------------------------


def divide_with_cofactors(
    elem: FreeElem, gens: Sequence
) -> tuple[tuple[Poly, ...], FreeElem]:
    """Write elem = sum_i q_i * gens_i + remainder with the remainder in
    normal form.  Exact: the identity is verified before returning."""
    elems = _as_elems(gens)
    k = len(elems)
    width, nvars = elems[0].width, elems[0].nvars
    if elem.width != width:
        raise ValueError("element width does not match generator width")
    run = _tracking_gb(tuple(elems))
    ints, mult = _terms_to_int(_elem_to_terms(elem))
    if not ints:
        return tuple(Poly.zero(nvars) for _ in range(k)), elem
    h, scale = run.reduce_full(dict(ints))
    factor = 1 / (scale * mult)
    rem_cols: list[dict[Monomial, Fraction]] = [dict() for _ in range(width)]
    q_cols: list[dict[Monomial, Fraction]] = [dict() for _ in range(k)]
    for (pos, m), c in h.items():
        if pos < width:
            rem_cols[pos][m] = c * factor
        else:
            q_cols[pos - width][m] = -c * factor
    remainder = FreeElem(Poly(nvars, col) for col in rem_cols)
    quot = tuple(Poly(nvars, col) for col in q_cols)
    recon = [Poly.zero(nvars) for _ in range(width)]
    for q, g in zip(quot, elems):
        for j, ge in enumerate(g.entries):
            recon[j] = recon[j] + q * ge
    for j in range(width):
        if recon[j] + remainder.entries[j] != elem.entries[j]:
            raise RuntimeError("internal error: division identity failed")
    return quot, remainder


_TRACK_CACHE: dict[tuple, _Run] = {}


def _tracking_gb(elems: tuple[FreeElem, ...]) -> _Run:
    """Groebner basis of the rows with tracking columns recording how each
    basis element is built from the inputs; used for cofactor extraction."""
    key = (elems, _budget())
    hit = _TRACK_CACHE.get(key)
    if hit is not None:
        return hit
    k = len(elems)
    width, nvars = elems[0].width, elems[0].nvars
    run = _Run(width + k, nvars, width, _budget(), collapse_equal_lcm=False)
    for i, e in enumerate(elems):
        ints, den = _terms_to_int_den(_elem_to_terms(e))
        ints[(width + i, (0,) * nvars)] = den
        run.add_input(ints)
    run.run()
    _TRACK_CACHE[key] = run
    return run


# -- rank ------------------------------------------------------------------------


def _poly_div_exact(num: Poly, den: Poly) -> Poly:
    """Exact division in Q[d1..dn]; raises if the division is not exact.
    Only called where fraction-free elimination guarantees exactness."""
    if num.is_zero():
        return num
    if den.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    nvars = num.nvars
    dm, dc = den.leading_term()
    q: dict[Monomial, Fraction] = {}
    rem = num
    while not rem.is_zero():
        m, c = rem.leading_term()
        if not mono_divides(dm, m):
            raise ArithmeticError("inexact polynomial division")
        qm = mono_div(m, dm)
        qc = c / dc
        q[qm] = qc
        rem = rem - Poly(nvars, {qm: qc}) * den
    return Poly(nvars, q)


def fraction_rank(rows: Sequence) -> int:
    """Rank over the fraction field Q(d1..dn), by fraction-free elimination."""
    if not rows:
        return 0
    elems = _as_elems(rows)
    nvars = elems[0].nvars
    m = [list(e.entries) for e in elems]
    nrows, ncols = len(m), elems[0].width
    rank = 0
    prev = Poly.const(nvars, 1)
    for col in range(ncols):
        piv_row = -1
        for r in range(rank, nrows):
            if not m[r][col].is_zero():
                piv_row = r
                break
        if piv_row < 0:
            continue
        m[rank], m[piv_row] = m[piv_row], m[rank]
        piv = m[rank][col]
        for r in range(rank + 1, nrows):
            if all(m[r][j].is_zero() for j in range(col, ncols)):
                continue
            mr = m[r]
            for j in range(ncols):
                if j == col:
                    continue
                mr[j] = _poly_div_exact(piv * mr[j] - mr[col] * m[rank][j], prev)
            mr[col] = Poly.zero(nvars)
        prev = piv
        rank += 1
        if rank == nrows:
            break
    return rank


# -- resolutions -------------------------------------------------------------------


@dataclass(frozen=True)
class Resolution:
    """A chain of matrices over D with each step the minimized relations of
    the previous one.  steps[0] is the presentation as handed in; the module
    being resolved lives in D^(1 x source_width)."""

    nvars: int
    source_width: int
    steps: tuple[tuple[FreeElem, ...], ...]
    complete: bool

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.steps)

    @property
    def orders(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(e.degree() for e in s)) for s in self.steps)

    @property
    def euler_characteristic(self) -> int:
        chi = self.source_width
        sign = -1
        for d in self.dims:
            chi += sign * d
            sign = -sign
        return chi


def euler_characteristic(res: Resolution) -> int:
    return res.euler_characteristic


def resolve_module(rows: Sequence, *, max_steps: int | None = None,
                   threads: int = 1) -> Resolution:
    """Iterate minimized syzygies until they vanish.  The generic rank of
    the presented module equals the Euler characteristic once complete."""
    elems = _as_elems(rows)
    nvars = elems[0].nvars
    if max_steps is None:
        max_steps = nvars + 1
    steps: list[tuple[FreeElem, ...]] = [tuple(elems)]
    complete = False
    current = elems
    while len(steps) < max_steps + 1:
        raw = syzygies(current)
        if not raw:
            complete = True
            break
        syz = minimize_generators(raw, threads=threads)
        if not syz:
            complete = True
            break
        for s in syz:
            if not s.dot(current).is_zero():
                raise RuntimeError("internal error: resolution step does not compose to zero")
        steps.append(tuple(syz))
        current = syz
    return Resolution(nvars, elems[0].width, tuple(steps), complete)
