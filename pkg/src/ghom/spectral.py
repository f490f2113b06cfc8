"""Spectral sequence of a based filtration, through exact couples.

Every module below is a subquotient of a chain group ``C_n`` of the total
complex, so the maps ``i`` and ``j`` are the identity on representatives and
``k`` is the boundary.  Modules are keyed by ``(p, n)`` with ``n = p + q``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from ghom.abelian import ChainComplex, GradedGroup, IntMatrix, Lattice, Subquotient, SubquotientMap
from ghom.abelian.snf import echelon
from ghom.bredon import BredonChainComplex, assemble
from ghom.coeff import GradedCoefficientSystem
from ghom.errors import ExactnessFailure, IllDefinedDerivedMap, IllDefinedMorphism, ValidationError
from ghom.gcomplex import SubcomplexPair


class FilteredComplex:
    """Chain complex with a filtration degree on every basis element.

    ``F_p C_n`` is spanned by the basis elements of filtration degree at most
    ``p``; ``F_p = 0`` for ``p < 0``.  ``rows`` optionally records the row
    complexes of a graded assembly (row ``q`` in total degree ``p + q``).
    """

    def __init__(self, chain: ChainComplex, filtration: Mapping[int, Sequence[int]],
                 rows: Mapping[int, ChainComplex] | None = None):
        self.chain = chain
        self.filtration = {n: list(filtration.get(n, [])) for n in range(chain.top + 1)}
        for n, f in self.filtration.items():
            if len(f) != chain.rank(n):
                raise ValidationError(f"filtration of degree {n} has {len(f)} entries, "
                                      f"expected {chain.rank(n)}")
            if any(p < 0 for p in f):
                raise ValidationError("filtration degrees must be non-negative")
        self.rows = dict(rows) if rows is not None else None
        for n in range(1, chain.top + 1):
            d = chain.d(n)
            for j, pj in enumerate(self.filtration[n]):
                for i, pi in enumerate(self.filtration[n - 1]):
                    if d[i, j] and pi > pj:
                        raise ValidationError("boundary does not respect the filtration")

    @classmethod
    def from_bredon(cls, C: BredonChainComplex) -> "FilteredComplex":
        return cls(C.chain, {p: [p] * C.rank(p) for p in range(C.top + 1)}, rows={0: C.chain})

    @property
    def top(self) -> int:
        return self.chain.top

    @cached_property
    def length(self) -> int:
        return max((p for f in self.filtration.values() for p in f), default=0)

    def rank(self, n: int) -> int:
        return self.chain.rank(n)

    def F(self, p: int, n: int) -> Lattice:
        f = self.filtration.get(n, [])
        return Lattice.coordinate(self.rank(n), [i for i, x in enumerate(f) if x <= p])

    def d(self, n: int) -> IntMatrix:
        return self.chain.d(n)

    def boundaries_of(self, L: Lattice, n: int) -> Lattice:
        """``d(L)`` for ``L`` inside ``C_n``, a lattice in ``C_{n-1}``."""
        if n < 1 or n > self.top:
            return Lattice.zero(self.rank(n - 1))
        return L.image(self.d(n))

    def cycles(self, n: int) -> Lattice:
        if n < 1:
            return Lattice.full(self.rank(n))
        return Lattice.full(self.rank(n)).preimage(self.d(n), Lattice.zero(self.rank(n - 1)))

    def Z(self, r: int, p: int, n: int) -> Lattice:
        """``{x in F_p C_n : d x in F_{p-r}}``."""
        Fp = self.F(p, n)
        if n < 1:
            return Fp
        return Fp.preimage(self.d(n), self.F(p - r, n - 1))


def solve(gens: Sequence[Sequence[int]], v: Sequence[int]) -> list[int] | None:
    """Integer coefficients ``c`` with ``sum c_i gens_i = v``, or None."""
    dim = len(v)
    k = len(gens)
    rows = [list(g) + [int(i == j) for j in range(k)] for i, g in enumerate(gens)]
    a, r = echelon(rows, dim + k, upto=dim, reduce_above=False)
    w = list(v) + [0] * k
    for row in a[:r]:
        col = next(j for j in range(dim) if row[j])
        if w[col] % row[col]:
            return None
        c = w[col] // row[col]
        if c:
            w = [x - c * y for x, y in zip(w, row)]
    if any(w[:dim]):
        return None
    return [-x for x in w[dim:]]


def _zero(n_amb: int) -> Subquotient:
    return Subquotient.zero(n_amb)


class ExactCouple:
    """Level-``r`` couple: ``D[(p, n)]``, ``E[(p, n)]`` and the maps ``i``, ``j``, ``k``.

    Bidegrees: ``i: D_{p,n} -> D_{p+1,n}``, ``j: D_{p,n} -> E_{p-r+1,n}``,
    ``k: E_{p,n} -> D_{p-1,n-1}``.
    """

    def __init__(self, fc: FilteredComplex, r: int, D: dict, E: dict):
        self.fc = fc
        self.r = r
        self.D = D
        self.E = E
        self.p_range = range(-1, 2 * fc.length + 6)

    def d_mod(self, p: int, n: int) -> Subquotient:
        if 0 <= n <= self.fc.top and (p, n) in self.D:
            return self.D[(p, n)]
        if 0 <= n <= self.fc.top and p >= self.p_range.stop:
            return self.D[(self.p_range.stop - 1, n)]
        return _zero(self.fc.rank(n))

    def e_mod(self, p: int, n: int) -> Subquotient:
        if 0 <= n <= self.fc.top and (p, n) in self.E:
            return self.E[(p, n)]
        if 0 <= n <= self.fc.top and p >= self.p_range.stop:
            full = Lattice.full(self.fc.rank(n))
            return Subquotient(full, full)
        return _zero(self.fc.rank(n))

    def i(self, p: int, n: int) -> SubquotientMap:
        src, tgt = self.d_mod(p, n), self.d_mod(p + 1, n)
        return self._map(src, tgt, [list(b) for b in src.num.basis], "i", p, n)

    def k(self, p: int, n: int) -> SubquotientMap:
        src, tgt = self.e_mod(p, n), self.d_mod(p - 1, n - 1)
        imgs = [self.fc.d(n).apply(b) if n >= 1 else [] for b in src.num.basis]
        return self._map(src, tgt, imgs, "k", p, n)

    def j(self, p: int, n: int) -> SubquotientMap:
        """``j^r``: lift along ``i^{r-1}`` to filtration ``p - r + 1``, then project."""
        src = self.d_mod(p, n)
        q = p - self.r + 1
        tgt = self.e_mod(q, n)
        if self.r == 1:
            return self._map(src, tgt, [list(b) for b in src.num.basis], "j", p, n)
        low = self.fc.F(q, n).intersect(self.fc.cycles(n))
        gens = [list(b) for b in low.basis] + [list(b) for b in src.den.basis]
        imgs = []
        for v in src.num.basis:
            c = solve(gens, v)
            if c is None:
                raise IllDefinedDerivedMap(f"no preimage under i for j at ({p}, {n - p})")
            imgs.append(low.combine(c[:low.rank]))
        return self._map(src, tgt, imgs, "j", p, n)

    def d(self, p: int, n: int) -> SubquotientMap:
        """``d^r = j^r k^r : E_{p,n} -> E_{p-r,n-1}``."""
        return self.j(p - 1, n - 1).compose(self.k(p, n))

    def _map(self, src, tgt, imgs, name, p, n) -> SubquotientMap:
        try:
            return SubquotientMap(src, tgt, imgs)
        except IllDefinedMorphism as exc:
            raise IllDefinedDerivedMap(
                f"{name}^{self.r} is not well defined at (p, q) = ({p}, {n - p})") from exc

    def check_exactness(self) -> int:
        """Verify im = ker at every D and E node; returns the number of nodes."""
        count = 0
        top = self.fc.top
        for n in range(top + 1):
            for p in self.p_range:
                r = self.r
                # at D_{p,n}: im k (from E_{p+1,n+1}) = ker i ; im i (from D_{p-1,n}) = ker j
                nodes = [
                    (f"D[{p},{n - p}] (k, i)", self._incoming_k(p, n), self.i(p, n)),
                    (f"D[{p},{n - p}] (i, j)", self.i(p - 1, n), self.j(p, n)),
                    (f"E[{p},{n - p}] (j, k)", self.j(p + r - 1, n), self.k(p, n)),
                ]
                for where, incoming, outgoing in nodes:
                    count += 1
                    if incoming.image_lattice() != outgoing.kernel_lattice():
                        raise ExactnessFailure(f"exact couple fails at {where} on page {r}",
                                               location=where)
        return count

    def _incoming_k(self, p: int, n: int) -> SubquotientMap:
        if n + 1 > self.fc.top:
            return SubquotientMap(_zero(0), self.d_mod(p, n), [], check=False)
        return self.k(p + 1, n + 1)


def exact_couple(fc: FilteredComplex) -> ExactCouple:
    D, E = {}, {}
    for n in range(fc.top + 1):
        for p in range(-1, 2 * fc.length + 6):
            Fp = fc.F(p, n)
            bnd = fc.boundaries_of(fc.F(p, n + 1), n + 1)
            D[(p, n)] = Subquotient(Fp.intersect(fc.cycles(n)), bnd)
            E[(p, n)] = Subquotient(fc.Z(1, p, n), bnd + fc.F(p - 1, n))
    return ExactCouple(fc, 1, D, E)


def derive(c: ExactCouple, check: bool = True) -> ExactCouple:
    fc = c.fc
    D, E = {}, {}
    nxt = ExactCouple(fc, c.r + 1, D, E)
    for n in range(fc.top + 1):
        for p in nxt.p_range:
            old = c.d_mod(p, n)
            D[(p, n)] = Subquotient(c.d_mod(p - 1, n).num + old.den, old.den)
            if (p, n) in c.E:
                dp = c.d(p, n)
                incoming = c.d(p + c.r, n + 1) if n + 1 <= fc.top else None
                den = incoming.image_lattice() if incoming else c.E[(p, n)].den
                E[(p, n)] = Subquotient(dp.kernel_lattice(), den)
    if check:
        nxt.check_exactness()
    return nxt


@dataclass
class Page:
    r: int
    E: dict[tuple[int, int], Subquotient]  # keyed by (p, q)
    d: dict[tuple[int, int], SubquotientMap]

    def invariants(self) -> dict[tuple[int, int], tuple]:
        return {pq: sq.invariants() for pq, sq in self.E.items()}

    def nonzero(self) -> dict[tuple[int, int], tuple]:
        return {pq: inv for pq, inv in self.invariants().items() if inv != (0, ())}


def page_of(c: ExactCouple) -> Page:
    E, d = {}, {}
    for (p, n), sq in c.E.items():
        if 0 <= p <= c.fc.length:
            E[(p, n - p)] = sq
            d[(p, n - p)] = c.d(p, n)
    return Page(c.r, E, d)


def direct_page(fc: FilteredComplex, r: int) -> Page:
    """``Z^r_p / (Z^{r-1}_{p-1} + d Z^{r-1}_{p+r-1})`` computed straight from chains."""
    E = {}
    for n in range(fc.top + 1):
        for p in range(fc.length + 1):
            num = fc.Z(r, p, n)
            den = fc.Z(r - 1, p - 1, n) + fc.boundaries_of(fc.Z(r - 1, p + r - 1, n + 1), n + 1)
            E[(p, n - p)] = Subquotient(num, den)
    return Page(r, E, {})


def compare_pages(direct: Page, derived: Page) -> bool:
    """Identity on representatives must be a well-defined isomorphism at every entry."""
    for pq, sq in direct.E.items():
        other = derived.E.get(pq)
        if other is None:
            if not sq.is_zero():
                return False
            continue
        try:
            f = SubquotientMap.identity(sq, other)
        except IllDefinedMorphism:
            return False
        if not f.is_isomorphism():
            return False
    return True


def filtration_of_homology(fc: FilteredComplex, n: int, s: int) -> Subquotient:
    """``Phi^s H_n``: classes with a representative in ``F_s``."""
    Z = fc.cycles(n)
    B = fc.boundaries_of(Lattice.full(fc.rank(n + 1)), n + 1)
    return Subquotient(Z.intersect(fc.F(s, n)) + B, B)


@dataclass
class SSReport:
    pages: list[Page]
    stable_at: int
    einf: Page
    phi: dict[int, list[Subquotient]]
    convergence: bool
    e2_matches_rows: bool
    direct_matches: bool
    homology: GradedGroup = field(default_factory=GradedGroup)

    def page(self, r: int) -> Page:
        return self.pages[min(r, len(self.pages)) - 1]


def _convergence(fc: FilteredComplex, einf: Page) -> bool:
    for n in range(fc.top + 1):
        Z = fc.cycles(n)
        B = fc.boundaries_of(Lattice.full(fc.rank(n + 1)), n + 1)
        for p in range(fc.length + 1):
            top_l = Z.intersect(fc.F(p, n))
            low = Z.intersect(fc.F(p - 1, n)) + B.intersect(fc.F(p, n))
            S = Subquotient(top_l, low)
            phi = Subquotient(top_l + B, Z.intersect(fc.F(p - 1, n)) + B)
            target = einf.E.get((p, n - p))
            try:
                a = SubquotientMap.identity(S, target)
                b = SubquotientMap.identity(S, phi)
            except IllDefinedMorphism:
                return False
            if not (a.is_isomorphism() and b.is_isomorphism()):
                return False
    return True


def _e2_rows(fc: FilteredComplex, e2: Page) -> bool:
    if fc.rows is None:
        return True
    for (p, q), sq in e2.E.items():
        row = fc.rows.get(q)
        expected = (0, ()) if row is None or p > row.top else row.homology(p).invariants()
        if sq.invariants() != expected:
            return False
    return True


def run(fc: FilteredComplex, r_max: int | None = None, check: bool = True) -> SSReport:
    """Iterate the couple to the stable page and evaluate the convergence checks."""
    stable = fc.length + 2
    last = max(stable, 2) if r_max is None else max(r_max, 2)
    c = exact_couple(fc)
    if check:
        c.check_exactness()
    pages = [page_of(c)]
    for _ in range(1, last):
        c = derive(c, check)
        pages.append(page_of(c))
    direct_ok = all(compare_pages(direct_page(fc, pg.r), pg) for pg in pages)
    einf = pages[-1] if len(pages) >= stable else page_of(_derive_to(c, stable))
    phi = {n: [filtration_of_homology(fc, n, s) for s in range(-1, fc.length + 1)]
           for n in range(fc.top + 1)}
    return SSReport(pages, stable, einf, phi, _convergence(fc, einf), _e2_rows(fc, pages[1]),
                    direct_ok, fc.chain.graded_homology())


def _derive_to(c: ExactCouple, r: int) -> ExactCouple:
    while c.r < r:
        c = derive(c, check=False)
    return c


# -- graded coefficient systems -------------------------------------------------

def graded_assemble(pair: SubcomplexPair, GM: GradedCoefficientSystem) -> FilteredComplex:
    """Total complex of the rows, row ``q`` shifted to total degree ``p + q``."""
    rows = {}
    for q, M in sorted(GM.rows.items()):
        if q < 0:
            raise ValidationError(f"row {q}: graded rows must have non-negative index")
        rows[q] = assemble(pair, M).chain
    top = max((q + C.top for q, C in rows.items()), default=-1)
    ranks, filt, bd = [], {}, {}
    for n in range(top + 1):
        parts = [(q, n - q) for q in sorted(rows) if 0 <= n - q <= rows[q].top]
        ranks.append(sum(rows[q].rank(p) for q, p in parts))
        filt[n] = [p for q, p in parts for _ in range(rows[q].rank(p))]
    for n in range(1, top + 1):
        blocks = []
        for q in sorted(rows):
            p = n - q
            C = rows[q]
            blocks.append(C.d(p) if 1 <= p <= C.top else
                          IntMatrix.zeros(C.rank(p - 1), C.rank(p)))
        bd[n] = IntMatrix.block_diagonal(blocks)
    return FilteredComplex(ChainComplex(ranks, bd), filt, rows=rows)


def aq_homology(pair: SubcomplexPair, GM: GradedCoefficientSystem, q: int) -> GradedGroup:
    M = GM.row(q)
    if M is None:
        return GradedGroup()
    return assemble(pair, M).chain.graded_homology()
