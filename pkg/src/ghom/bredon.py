"""Bredon chains, homology, induced maps and the long exact sequence of a pair.

The chain group in degree ``p`` is the direct sum over simplex orbits ``[s]``
outside ``A`` of ``M(G/G_s)``, with ``s`` the orbit representative.  An
element ``x (x) t'`` for a non-representative ``t'`` with ``h t' = t`` is
identified with ``eps * M(mu(h^-1, G_t)) x (x) t``, where ``eps`` compares
the order of ``t'`` moved by ``h`` with the preferred order of ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from ghom.abelian import (
    ChainComplex,
    GradedGroup,
    IntMatrix,
    Lattice,
    ModuleMorphism,
    Presentation,
    Subquotient,
    SubquotientMap,
    field_homology,
    homology_subquotient,
    induced_on_homology,
)
from ghom.abelian.modules import exact_at
from ghom.coeff import CoefficientSystem, constant_system
from ghom.errors import (
    BasepointNotFixed,
    BasepointNotVertex,
    BoundarySquaredNonzero,
    ExactnessFailure,
    NotAChainMap,
    NotEquivariant,
    NotExcisable,
)
from ghom.gcomplex import (
    EquivariantSimplicialMap,
    GSimplicialComplex,
    Simplex,
    SimplexOrbit,
    SubcomplexPair,
    balanced_product,
    inclusion,
    orbit_point,
    permutation_sign,
)
from ghom.groups import FiniteGroup, Subgroup

AligningChoice = Callable[[Sequence[int]], int]


class BredonChainComplex:
    """Based chain complex of a pair with coefficients in a system.

    ``basis[p]`` lists ``(representative, generator index)``; every basis
    element of degree ``p`` has filtration degree ``p``.
    """

    def __init__(self, pair: SubcomplexPair, system: CoefficientSystem,
                 choose_aligning: AligningChoice | None = None, check: bool = True):
        self.pair = pair
        self.system = system
        X = pair.total
        self.complex = X
        self._choose = choose_aligning
        top = X.dim
        self.orbits: list[list[SimplexOrbit]] = [pair.relative_orbits(p) for p in range(top + 1)]
        self.offsets: list[dict[Simplex, int]] = []
        self.basis: list[list[tuple[Simplex, int]]] = []
        for p in range(top + 1):
            off, basis = {}, []
            for orb in self.orbits[p]:
                off[orb.representative] = len(basis)
                basis.extend((orb.representative, i) for i in range(system.rank(orb.stabilizer)))
            self.offsets.append(off)
            self.basis.append(basis)
        ranks = [len(b) for b in self.basis]
        bd = {p: self._assemble_boundary(p) for p in range(1, top + 1)}
        if check:
            for p in range(2, top + 1):
                if not (bd[p - 1] @ bd[p]).is_zero():
                    raise BoundarySquaredNonzero(
                        f"boundary squared is nonzero in degree {p} of {X.name or 'complex'}")
        self.chain = ChainComplex(ranks, bd, check=False)

    # -- element bookkeeping ------------------------------------------------
    def rank(self, p: int) -> int:
        return len(self.basis[p]) if 0 <= p < len(self.basis) else 0

    @property
    def top(self) -> int:
        return len(self.basis) - 1

    def d(self, p: int) -> IntMatrix:
        return self.chain.d(p)

    def boundary(self, p: int) -> ModuleMorphism:
        return ModuleMorphism(Presentation.free(self.rank(p)), Presentation.free(self.rank(p - 1)),
                              self.d(p))

    def filtration_degree(self, p: int, i: int) -> int:
        return p

    def basis_label(self, p: int, i: int) -> str:
        rep, k = self.basis[p][i]
        return f"e{k}*{self.complex.label(rep)}"

    def _aligner(self, seq: Sequence[int]) -> int:
        X = self.complex
        if self._choose is None:
            return X.aligning_element(seq)
        return self._choose(X.aligning_elements(seq))

    def place(self, seq: Sequence[int], x: Sequence[int]) -> list[int] | None:
        """Coordinates of ``x (x) seq`` in the basis of degree ``len(seq) - 1``.

        ``seq`` is an ordered simplex and ``x`` lies in ``M(G/G_seq)``.
        Returns None when the simplex lies in the subcomplex (the element is
        zero in relative chains).
        """
        X = self.complex
        t_prime = Simplex(seq)
        if t_prime in self.pair.sub:
            return None
        p = len(seq) - 1
        orb = X.orbit_of(t_prime)
        t = orb.representative
        h = self._aligner(seq)
        moved = tuple(X.vertex_set.act[h][v] for v in seq)
        eps = permutation_sign(moved, X.order[t])
        G = X.group
        y = self.system.mu(G.inv(h), orb.stabilizer).apply(list(x))
        out = [0] * self.rank(p)
        o = self.offsets[p][t]
        for i, v in enumerate(y):
            out[o + i] = eps * v
        return out

    def _assemble_boundary(self, p: int) -> IntMatrix:
        X = self.complex
        M = self.system
        cols = []
        for orb in self.orbits[p]:
            s = orb.representative
            Gs = orb.stabilizer
            blocks = []
            for k in range(p + 1):
                face = X.face(s, k)
                if Simplex(face) in self.pair.sub:
                    continue
                kap = M.kappa(X.stabilizer(face), Gs)
                blocks.append((k, face, kap))
            for j in range(M.rank(Gs)):
                col = [0] * self.rank(p - 1)
                for k, face, kap in blocks:
                    v = self.place(face, kap.column(j))
                    sign = -1 if k % 2 else 1
                    for i, x in enumerate(v):
                        if x:
                            col[i] += sign * x
                cols.append(col)
        return IntMatrix.from_columns(cols, self.rank(p - 1))

    def positions(self, other: "BredonChainComplex", p: int) -> list[int]:
        """Positions in ``self`` of the basis of ``other`` (same complex and system)."""
        index = {b: i for i, b in enumerate(self.basis[p])}
        return [index[b] for b in other.basis[p]]


def assemble(pair: SubcomplexPair | GSimplicialComplex, M: CoefficientSystem,
             choose_aligning: AligningChoice | None = None) -> BredonChainComplex:
    """Bredon chain complex of ``pair`` (a complex means the pair ``(X, empty)``)."""
    if isinstance(pair, GSimplicialComplex):
        pair = SubcomplexPair.absolute(pair)
    return BredonChainComplex(pair, M, choose_aligning)


# -- homology -------------------------------------------------------------------

@dataclass
class HomologyResult:
    groups: GradedGroup
    subquotients: dict[int, Subquotient]
    cycles: dict[int, list[tuple[int, list[int]]]] = field(default_factory=dict)

    def __getitem__(self, n: int):
        return self.groups[n]

    def format(self, n: int) -> str:
        return self.groups.format(n)


def homology(C: BredonChainComplex | ChainComplex, degrees: Iterable[int] | None = None
             ) -> HomologyResult:
    chain = C.chain if isinstance(C, BredonChainComplex) else C
    degrees = range(chain.top + 1) if degrees is None else degrees
    subs, groups, cycles = {}, {}, {}
    for n in degrees:
        H = chain.homology(n) if 0 <= n <= chain.top else Subquotient.zero(0)
        subs[n] = H
        groups[n] = H.invariants()
        cycles[n] = H.generators()
    return HomologyResult(GradedGroup(groups), subs, cycles)


def bredon_homology(pair: SubcomplexPair | GSimplicialComplex, M: CoefficientSystem
                    ) -> HomologyResult:
    return homology(assemble(pair, M))


def homology_mod_p(C: BredonChainComplex | ChainComplex, p: int) -> dict[int, int]:
    """Dimensions of homology with coefficients in the prime field of order ``p``."""
    chain = C.chain if isinstance(C, BredonChainComplex) else C
    return {n: field_homology(chain.d(n + 1), chain.d(n), p) for n in range(chain.top + 1)}


def resolve_vertex(X: GSimplicialComplex, v) -> int:
    if isinstance(v, str):
        labels = X.vertex_set.point_labels
        if labels and v in labels:
            return labels.index(v)
        if v.isdigit():
            v = int(v)
        else:
            raise BasepointNotVertex(f"{v!r} is not a vertex")
    if not isinstance(v, int) or v not in X.vertices:
        raise BasepointNotVertex(f"{v!r} is not a vertex")
    return v


def basepoint_pair(X: GSimplicialComplex, v0) -> SubcomplexPair:
    v = resolve_vertex(X, v0)
    orbit = {Simplex([X.vertex_set.act[g][v]]) for g in X.group.elements}
    return SubcomplexPair(X, orbit)


def reduced_homology(X: GSimplicialComplex, v0, M: CoefficientSystem) -> HomologyResult:
    """Homology of ``(X, G v0)``."""
    return homology(assemble(basepoint_pair(X, v0), M))


# -- chain maps -------------------------------------------------------------------

@dataclass
class ChainMap:
    source: BredonChainComplex
    target: BredonChainComplex
    matrices: dict[int, IntMatrix]

    def __getitem__(self, p: int) -> IntMatrix:
        return self.matrices[p]

    def morphism(self, p: int) -> ModuleMorphism:
        return ModuleMorphism(Presentation.free(self.source.rank(p)),
                              Presentation.free(self.target.rank(p)), self.matrices[p])

    def on_homology(self) -> dict[int, SubquotientMap]:
        return induced_on_homology(self.matrices, self.source.chain, self.target.chain)


def induced_chain_map(f: EquivariantSimplicialMap, source: BredonChainComplex,
                      target: BredonChainComplex) -> ChainMap:
    """Chain map of ``f: (X, A) -> (Y, B)``; degenerate images go to zero."""
    X, Y = f.source, f.target
    if source.complex is not X or target.complex is not Y:
        raise NotEquivariant("chain complexes were not assembled on the map's complexes")
    for a in source.pair.sub:
        if f.image(a) not in target.pair.sub:
            raise NotEquivariant(f"{X.label(a)} lies in A but its image is outside B")
    M = source.system
    mats = {}
    for p in range(source.top + 1):
        cols = []
        for orb in source.orbits[p]:
            s = orb.representative
            seq = tuple(f.vertex_map[v] for v in X.order[s])
            degenerate = len(set(seq)) < len(seq)
            kap = None if degenerate else M.kappa(Y.stabilizer(seq), orb.stabilizer)
            for j in range(M.rank(orb.stabilizer)):
                col = None
                if not degenerate:
                    col = target.place(seq, kap.column(j))
                cols.append(col if col is not None else [0] * target.rank(p))
        mats[p] = IntMatrix.from_columns(cols, target.rank(p))
    for p in range(1, source.top + 1):
        if target.d(p) @ mats[p] != mats[p - 1] @ source.d(p):
            raise NotAChainMap(f"induced map does not commute with the boundary in degree {p}")
    return ChainMap(source, target, mats)


# -- long exact sequences -----------------------------------------------------

@dataclass
class ShortExactSequence:
    """``0 -> C(A) -> C(X) -> C(X, A) -> 0`` for based complexes.

    ``sub_positions[p]`` and ``quot_positions[p]`` list where the bases of
    ``C_p(A)`` and ``C_p(X, A)`` sit in the basis of ``C_p(X)``.
    """

    sub: ChainComplex
    total: ChainComplex
    quotient: ChainComplex
    sub_positions: dict[int, list[int]]
    quot_positions: dict[int, list[int]]
    labels: tuple[str, str, str] = ("A", "X", "X,A")

    @property
    def top(self) -> int:
        return self.total.top


def pair_sequence(pair: SubcomplexPair, M: CoefficientSystem) -> ShortExactSequence:
    CX = assemble(SubcomplexPair.absolute(pair.total), M)
    CA = assemble(SubcomplexPair.absolute(pair.sub_complex()), M)
    CXA = assemble(pair, M)
    return _sequence(CA, CX, CXA, ("A", "X", "X,A"))


def triple_sequence(X: GSimplicialComplex, B: Iterable[Iterable[int]],
                    A: Iterable[Iterable[int]], M: CoefficientSystem) -> ShortExactSequence:
    """``0 -> C(B, A) -> C(X, A) -> C(X, B) -> 0`` for subcomplexes ``A <= B <= X``."""
    B = frozenset(Simplex(b) for b in B)
    A = frozenset(Simplex(a) for a in A)
    CBA = assemble(SubcomplexPair(X.restrict(B), A), M)
    CXA = assemble(SubcomplexPair(X, A), M)
    CXB = assemble(SubcomplexPair(X, B), M)
    return _sequence(CBA, CXA, CXB, ("B,A", "X,A", "X,B"))


def _sequence(Cs: BredonChainComplex, Ct: BredonChainComplex, Cq: BredonChainComplex,
              labels) -> ShortExactSequence:
    top = Ct.top
    sub_pos = {p: Ct.positions(Cs, p) if p <= Cs.top else [] for p in range(top + 1)}
    quot_pos = {p: Ct.positions(Cq, p) for p in range(top + 1)}
    return ShortExactSequence(Cs.chain, Ct.chain, Cq.chain, sub_pos, quot_pos, labels)


def _select(v: Sequence[int], positions: Sequence[int]) -> list[int]:
    return [v[i] for i in positions]


def _spread(v: Sequence[int], positions: Sequence[int], n: int) -> list[int]:
    out = [0] * n
    for x, i in zip(v, positions):
        out[i] = x
    return out


def _homology(C: ChainComplex, n: int) -> Subquotient:
    if n < 0 or n > C.top:
        return Subquotient.zero(C.rank(n))
    return homology_subquotient(C.d(n + 1), C.d(n))


@dataclass
class SequenceMaps:
    """Maps of the long exact sequence in one degree ``n``."""

    n: int
    incl: SubquotientMap      # H_n(sub) -> H_n(total)
    proj: SubquotientMap      # H_n(total) -> H_n(quotient)
    connecting: SubquotientMap  # H_n(quotient) -> H_{n-1}(sub)


def long_exact_sequence(ses: ShortExactSequence) -> list[SequenceMaps]:
    out = []
    for n in range(ses.top + 2):
        Hs, Ht, Hq = _homology(ses.sub, n), _homology(ses.total, n), _homology(ses.quotient, n)
        Hs1 = _homology(ses.sub, n - 1)
        nt = ses.total.rank(n)
        sp = ses.sub_positions.get(n, [])
        qp = ses.quot_positions.get(n, [])
        incl = SubquotientMap(Hs, Ht, [_spread(b, sp, nt) for b in Hs.num.basis], check=False)
        proj = SubquotientMap(Ht, Hq, [_select(b, qp) for b in Ht.num.basis], check=False)
        images = []
        for z in Hq.num.basis:
            lifted = _spread(z, qp, nt)
            bz = ses.total.d(n).apply(lifted) if n >= 1 else []
            images.append(_select(bz, ses.sub_positions.get(n - 1, [])) if n >= 1 else [])
        conn = SubquotientMap(Hq, Hs1, images, check=False)
        out.append(SequenceMaps(n, incl, proj, conn))
    return out


@dataclass
class ExactnessReport:
    ok: bool
    nodes_checked: int
    failures: list[str]

    def __bool__(self) -> bool:
        return self.ok


def check_sequence(ses: ShortExactSequence, raise_on_failure: bool = False) -> ExactnessReport:
    """Compare image and kernel lattices at every node of the long exact sequence."""
    maps = long_exact_sequence(ses)
    ls, lt, lq = ses.labels
    failures = []
    count = 0
    for m in maps:
        n = m.n
        nxt_conn = maps[n + 1].connecting if n + 1 < len(maps) else None
        nodes = [(f"H_{n}({ls})", nxt_conn, m.incl),
                 (f"H_{n}({lt})", m.incl, m.proj),
                 (f"H_{n}({lq})", m.proj, m.connecting)]
        for where, incoming, outgoing in nodes:
            count += 1
            if incoming is None:
                im = outgoing.source.den
            else:
                if not all(outgoing.source.num.contains(v) for v in incoming.images):
                    failures.append(f"{where}: incoming map does not land in cycles")
                    continue
                im = incoming.image_lattice()
            if im != outgoing.kernel_lattice():
                failures.append(f"{where}: image and kernel differ")
    report = ExactnessReport(not failures, count, failures)
    if failures and raise_on_failure:
        raise ExactnessFailure(failures[0], location=failures[0].split(":")[0])
    return report


def exactness_check(pair: SubcomplexPair, M: CoefficientSystem,
                    raise_on_failure: bool = False) -> ExactnessReport:
    return check_sequence(pair_sequence(pair, M), raise_on_failure)


def connecting_map(pair: SubcomplexPair, M: CoefficientSystem, n: int) -> SubquotientMap:
    """``H_n(X, A) -> H_{n-1}(A)`` by the snake construction."""
    ses = pair_sequence(pair, M)
    maps = long_exact_sequence(ses)
    if n < len(maps):
        return maps[n].connecting
    return SubquotientMap(Subquotient.zero(0), _homology(ses.sub, n - 1), [], check=False)


# -- excision, additivity, balanced products -------------------------------------

@dataclass
class IsomorphismReport:
    ok: bool
    per_degree: dict[int, bool]
    source: GradedGroup
    target: GradedGroup

    def __bool__(self) -> bool:
        return self.ok


def _iso_report(cm: ChainMap) -> IsomorphismReport:
    hmaps = cm.on_homology()
    per = {n: f.is_isomorphism() for n, f in hmaps.items()}
    src = GradedGroup({n: f.source.invariants() for n, f in hmaps.items()})
    tgt = GradedGroup({n: f.target.invariants() for n, f in hmaps.items()})
    return IsomorphismReport(all(per.values()), per, src, tgt)


def excision_check(X: GSimplicialComplex, A: Iterable[Iterable[int]],
                   U: Iterable[Iterable[int]], M: CoefficientSystem) -> IsomorphismReport:
    """Check that ``(X - U, A - U) -> (X, A)`` induces an isomorphism."""
    A = frozenset(Simplex(a) for a in A)
    U = frozenset(Simplex(u) for u in U)
    G = X.group
    for u in U:
        if u not in A:
            raise NotExcisable(f"{X.label(u)} is excised but does not lie in A")
        if any(X.translate(g, u) not in U for g in G.elements):
            raise NotExcisable(f"excised set is not G-stable at {X.label(u)}")
    for s in X.registration:
        if s not in U and any(u < s for u in U):
            raise NotExcisable(f"excised set is not open: {X.label(s)} has an excised face")
    pair = SubcomplexPair(X, A)
    small = X.restrict([s for s in X.registration if s not in U])
    small_pair = SubcomplexPair(small, A - U)
    f = EquivariantSimplicialMap(small, X, tuple(range(X.vertex_set.size)))
    cm = induced_chain_map(f, assemble(small_pair, M), assemble(pair, M))
    return _iso_report(cm)


def _direct_sum(C1: ChainComplex, C2: ChainComplex) -> ChainComplex:
    top = max(C1.top, C2.top)
    ranks = [C1.rank(n) + C2.rank(n) for n in range(top + 1)]
    bd = {n: IntMatrix.block_diagonal([C1.d(n), C2.d(n)]) for n in range(1, top + 1)}
    return ChainComplex(ranks, bd)


def additivity_check(X1: GSimplicialComplex, X2: GSimplicialComplex,
                     M: CoefficientSystem) -> IsomorphismReport:
    """``H(X1) (+) H(X2) -> H(X1 + X2)`` induced by the two inclusions."""
    from ghom.gcomplex import disjoint_union

    U = disjoint_union(X1, X2)
    m = X1.vertex_set.size
    C1, C2, CU = assemble(X1, M), assemble(X2, M), assemble(U, M)
    i1 = induced_chain_map(EquivariantSimplicialMap(X1, U, tuple(range(m))), C1, CU)
    i2 = induced_chain_map(
        EquivariantSimplicialMap(X2, U, tuple(range(m, m + X2.vertex_set.size))), C2, CU)
    S = _direct_sum(C1.chain, C2.chain)
    mats = {}
    for n in range(S.top + 1):
        a = i1.matrices.get(n, IntMatrix.zeros(CU.rank(n), C1.rank(n)))
        b = i2.matrices.get(n, IntMatrix.zeros(CU.rank(n), C2.rank(n)))
        mats[n] = IntMatrix.from_columns(a.columns() + b.columns(), CU.rank(n))
    hmaps = induced_on_homology(mats, S, CU.chain)
    per = {n: f.is_isomorphism() for n, f in hmaps.items()}
    return IsomorphismReport(all(per.values()), per,
                             GradedGroup({n: f.source.invariants() for n, f in hmaps.items()}),
                             GradedGroup({n: f.target.invariants() for n, f in hmaps.items()}))


def kernel_of_projection_check(H: Subgroup, Y: GSimplicialComplex, y0: int,
                               M: CoefficientSystem | None = None,
                               embedding: Sequence[int] | None = None) -> IsomorphismReport:
    """Compare ``ker H(G x_H Y -> G/H)`` with ``H(G x_H Y, G [e, y0])``."""
    G = H.group
    K = Y.group
    emb_inv = None
    if embedding is not None:
        emb_inv = {g: k for k, g in enumerate(embedding)}
    for h in H.members:
        k = h if emb_inv is None else emb_inv[h]
        if Y.vertex_set.act[k][y0] != y0:
            raise BasepointNotFixed(f"basepoint {Y.vertex_set.label(y0)} is moved by "
                                    f"{G.label(h)}")
    M = M or constant_system(G)
    X = balanced_product(H, Y, embedding)
    P = orbit_point(G, H)
    n = Y.vertex_set.size
    pi = EquivariantSimplicialMap(X, P, tuple(v // n for v in range(X.vertex_set.size)))
    CX = assemble(X, M)
    CP = assemble(P, M)
    hp = induced_chain_map(pi, CX, CP).on_homology()
    base = basepoint_pair(X, y0)
    CR = assemble(base, M)
    per = {}
    src, tgt = {}, {}
    for d in range(CX.top + 1):
        ker = hp[d].kernel()
        HR = CR.chain.homology(d)
        qpos = CX.positions(CR, d)
        # ker -> H(X) -> H(X, G[e, y0])
        f = SubquotientMap(ker, HR, [_select(b, qpos) for b in ker.num.basis])
        per[d] = f.is_isomorphism()
        src[d], tgt[d] = ker.invariants(), HR.invariants()
    return IsomorphismReport(all(per.values()), per, GradedGroup(src), GradedGroup(tgt))


def representative_change(C: BredonChainComplex, C2: BredonChainComplex) -> dict[int, IntMatrix]:
    """Basis isomorphisms ``P_p : C2_p -> C_p`` between two assemblies of one pair.

    The complexes must have the same simplices but may use other
    orbit representatives and orders.
    """
    out = {}
    M = C.system
    for p in range(C.top + 1):
        cols = []
        for orb in C2.orbits[p]:
            s = orb.representative
            for j in range(M.rank(orb.stabilizer)):
                e = [int(i == j) for i in range(M.rank(orb.stabilizer))]
                cols.append(C.place(C2.complex.order[s], e))
        out[p] = IntMatrix.from_columns(cols, C.rank(p))
    return out
