"""Covariant coefficient systems on the orbit category and their extension to G-sets.

Values are free modules ``Z^k``; a system is known by the rank at each
subgroup of its support and the matrix it assigns to each orbit morphism.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from ghom.abelian import IntMatrix, ModuleMorphism, Presentation
from ghom.errors import (
    FunctorialityViolation,
    IllDefinedMatrix,
    MissingValue,
    NotEquivariant,
    SystemMissingStabilizer,
)
from ghom.groups import (
    FiniteGroup,
    FiniteGSet,
    OrbitMorphism,
    Subgroup,
    compose,
    conjugacy_class,
    conjugate_subgroup,
    enumerate_morphisms,
    identity_morphism,
    make_kappa,
    make_mu,
    orbits_and_stabilizers,
)


class CoefficientSystem:
    """Functor from the orbit category (restricted to ``support``) to free modules.

    ``support=None`` means the system is defined on every subgroup.
    """

    def __init__(self, group: FiniteGroup, rank: Callable[[Subgroup], int],
                 matrix: Callable[[OrbitMorphism], IntMatrix], name: str = "",
                 support: Iterable[Subgroup] | None = None):
        self.group = group
        self.name = name
        self._rank = rank
        self._matrix = matrix
        self.support = None if support is None else frozenset(support)
        self._memo: dict[OrbitMorphism, IntMatrix] = {}

    def __repr__(self) -> str:
        return f"CoefficientSystem({self.name!r})"

    def defined_on(self, H: Subgroup) -> bool:
        return self.support is None or H in self.support

    def rank(self, H: Subgroup) -> int:
        if not self.defined_on(H):
            raise SystemMissingStabilizer(f"system {self.name!r} has no value at G/{H}")
        return self._rank(H)

    def value(self, H: Subgroup) -> Presentation:
        return Presentation.free(self.rank(H))

    def on_morphism(self, f: OrbitMorphism) -> IntMatrix:
        mat = self._memo.get(f)
        if mat is None:
            self.rank(f.source)
            self.rank(f.target)
            mat = self._matrix(f)
            self._memo[f] = mat
        return mat

    def morphism(self, f: OrbitMorphism) -> ModuleMorphism:
        return ModuleMorphism(self.value(f.source), self.value(f.target), self.on_morphism(f))

    def mu(self, g: int, H: Subgroup) -> IntMatrix:
        return self.on_morphism(make_mu(g, H))

    def kappa(self, K: Subgroup, H: Subgroup) -> IntMatrix:
        return self.on_morphism(make_kappa(K, H))

    def subgroups(self, subgroups: Iterable[Subgroup] | None = None) -> list[Subgroup]:
        if subgroups is not None:
            return list(subgroups)
        if self.support is not None:
            return sorted(self.support, key=lambda s: (s.order, s.members))
        return list(self.group.subgroups)

    def check_functoriality(self, subgroups: Iterable[Subgroup] | None = None) -> int:
        """Verify identities and composites over all morphisms between ``subgroups``.

        Returns the number of composable pairs checked.
        """
        subs = self.subgroups(subgroups)
        mors = {(H, K): enumerate_morphisms(H, K) for H in subs for K in subs}
        for H in subs:
            k = self.rank(H)
            if self.on_morphism(identity_morphism(H)) != IntMatrix.identity(k):
                raise FunctorialityViolation(f"identity of G/{H} is not sent to the identity")
        for (H, K), fs in mors.items():
            for f in fs:
                m = self.on_morphism(f)
                if m.shape != (self.rank(K), self.rank(H)):
                    raise IllDefinedMatrix(f"matrix of {describe(f)} has shape {m.shape}")
        count = 0
        for H, K, L in itertools.product(subs, repeat=3):
            for f1 in mors[(H, K)]:
                m1 = self.on_morphism(f1)
                for f2 in mors[(K, L)]:
                    count += 1
                    if self.on_morphism(compose(f2, f1)) != self.on_morphism(f2) @ m1:
                        raise FunctorialityViolation(
                            f"system {self.name!r}: M(f2 o f1) != M(f2) M(f1) for "
                            f"f1 = {describe(f1)}, f2 = {describe(f2)}")
        return count


def describe(f: OrbitMorphism) -> str:
    G = f.source.group
    return f"G/{f.source} -> G/{f.target} (eH -> {G.label(f.image)}K)"


def _as_rank(M) -> int:
    if isinstance(M, int):
        return M
    if M.relations.rows and not M.relations.is_zero():
        raise IllDefinedMatrix("coefficient values must be free modules")
    return M.generator_count


def constant_system(G: FiniteGroup, M: Presentation | int = 1, name: str = "constant") -> CoefficientSystem:
    k = _as_rank(M)
    ident = IntMatrix.identity(k)
    return CoefficientSystem(G, lambda H: k, lambda f: ident, name=name)


def free_orbit_system(G: FiniteGroup, name: str = "free-orbit") -> CoefficientSystem:
    """Value ``Z[G/H]`` at ``G/H``; morphisms act by the underlying coset maps."""

    def matrix(f: OrbitMorphism) -> IntMatrix:
        images = f.as_map()
        rows = len(f.target.cosets)
        return IntMatrix([[int(images[j] == i) for j in range(len(images))] for i in range(rows)],
                         rows, len(images))

    return CoefficientSystem(G, lambda H: len(H.cosets), matrix, name=name)


def coinvariant_system(S: FiniteGSet, name: str = "coinvariants") -> CoefficientSystem:
    """``G/H -> Z[H-orbits of S]``, with ``eH -> gK`` sending ``Hx`` to ``K g^-1 x``."""
    G = S.group

    def orbit_reps(H: Subgroup) -> list[int]:
        seen, reps = set(), []
        for x in S.points:
            if x not in seen:
                reps.append(x)
                seen.update(S.act[h][x] for h in H.members)
        return reps

    def orbit_index(H: Subgroup, x: int) -> int:
        reps = orbit_reps(H)
        m = min(S.act[h][x] for h in H.members)
        return reps.index(m)

    def matrix(f: OrbitMorphism) -> IntMatrix:
        src = orbit_reps(f.source)
        rows = len(orbit_reps(f.target))
        ginv = G.inv(f.image)
        cols = []
        for x in src:
            col = [0] * rows
            col[orbit_index(f.target, S.act[ginv][x])] = 1
            cols.append(col)
        return IntMatrix.from_columns(cols, rows)

    return CoefficientSystem(G, lambda H: len(orbit_reps(H)), matrix, name=name)


def change_of_basis(M: CoefficientSystem, bases: Mapping[Subgroup, IntMatrix],
                    name: str | None = None) -> CoefficientSystem:
    """Isomorphic system ``P_K M(f) P_H^-1``; ``bases[H]`` holds ``(P_H, P_H^-1)``."""

    def matrix(f):
        P, _ = bases[f.target]
        _, Qinv = bases[f.source]
        return P @ M.on_morphism(f) @ Qinv

    return CoefficientSystem(M.group, M.rank, matrix, name=name or M.name,
                             support=bases.keys() if M.support is None else M.support)


# -- user systems ---------------------------------------------------------------

@dataclass
class SystemSpec:
    """Generating data for a user coefficient system, as read from a file section."""

    name: str
    values: list[tuple[Subgroup, int]] = field(default_factory=list)
    kappas: list[tuple[Subgroup, Subgroup, IntMatrix]] = field(default_factory=list)
    mus: list[tuple[int, Subgroup, IntMatrix]] = field(default_factory=list)


def load_user_system(spec: SystemSpec, G: FiniteGroup) -> CoefficientSystem:
    """Build a system from values at class representatives and generating matrices.

    ``mu`` matrices default to the identity for group generators that are not
    listed; ``kappa`` matrices must cover every covering pair of the support up
    to conjugation.  Everything else is derived by composition and the result
    is checked for functoriality on all composable pairs.
    """
    ranks: dict[Subgroup, int] = {}
    for H, k in spec.values:
        for K in conjugacy_class(H):
            if ranks.get(K, k) != k:
                raise IllDefinedMatrix(f"conflicting ranks in the conjugacy class of {H}")
            ranks[K] = k
    support = sorted(ranks, key=lambda s: (s.order, s.members))
    if not support:
        raise MissingValue(f"system {spec.name!r} declares no values")

    def need(H: Subgroup, what: str) -> int:
        if H not in ranks:
            raise MissingValue(f"{what} refers to G/{H}, which has no value in {spec.name!r}")
        return ranks[H]

    gen_mu: dict[tuple[int, Subgroup], IntMatrix] = {}
    extra_mu: list[tuple[int, Subgroup, IntMatrix]] = []
    for g, H, m in spec.mus:
        k = need(H, "mu")
        if m.shape != (k, k):
            raise IllDefinedMatrix(f"mu {G.label(g)} {H}: expected a {k}x{k} matrix, got {m.shape}")
        if g in G.generators:
            gen_mu[(g, H)] = m
        else:
            extra_mu.append((g, H, m))
    given_kappa: dict[tuple[Subgroup, Subgroup], IntMatrix] = {}
    for H, K, m in spec.kappas:
        kH, kK = need(H, "kappa"), need(K, "kappa")
        if not H <= K:
            raise IllDefinedMatrix(f"kappa {H} {K}: {H} is not contained in {K}")
        if m.shape != (kK, kH):
            raise IllDefinedMatrix(f"kappa {H} {K}: expected a {kK}x{kH} matrix, got {m.shape}")
        given_kappa[(H, K)] = m

    def gen(s: int, H: Subgroup) -> IntMatrix:
        return gen_mu.get((s, H), IntMatrix.identity(ranks[H]))

    # mu(g, H) for every g by words in the generators: mu(st, H) = mu(t, H) mu(s, H^t)
    mu: dict[Subgroup, dict[int, IntMatrix]] = {H: {0: IntMatrix.identity(ranks[H])} for H in support}
    frontier = [0]
    conj = {(H, t): conjugate_subgroup(H, t) for H in support for t in G.elements}
    while frontier:
        nxt = []
        for t in frontier:
            for s in G.generators:
                g = G.mul(s, t)
                fresh = g not in mu[support[0]]
                for H in support:
                    m = mu[H][t] @ gen(s, conj[(H, t)])
                    if fresh:
                        mu[H][g] = m
                    elif mu[H][g] != m:
                        raise FunctorialityViolation(
                            f"system {spec.name!r}: mu({G.label(g)}, {H}) depends on the word "
                            f"used to write {G.label(g)}")
                if fresh:
                    nxt.append(g)
        frontier = nxt
    for H in support:
        for g in G.elements:
            r = H.left_coset_rep(g)
            if mu[H][g] != mu[H][r]:
                raise FunctorialityViolation(
                    f"system {spec.name!r}: mu({G.label(g)}, {H}) != mu({G.label(r)}, {H}) "
                    f"although both name the same morphism")
    for g, H, m in extra_mu:
        if mu[H][g] != m:
            raise FunctorialityViolation(
                f"system {spec.name!r}: listed mu({G.label(g)}, {H}) disagrees with the "
                f"value derived from the generators")

    kappa: dict[tuple[Subgroup, Subgroup], IntMatrix] = {}

    def get_kappa(H: Subgroup, K: Subgroup) -> IntMatrix:
        if H == K:
            return IntMatrix.identity(ranks[H])
        key = (H, K)
        if key in kappa:
            return kappa[key]
        if key in given_kappa:
            kappa[key] = given_kappa[key]
            return kappa[key]
        for (H0, K0), m0 in given_kappa.items():
            for t in G.elements:
                if conj[(H0, t)] == H and conj[(K0, t)] == K:
                    # kappa(K, H) = mu(t, K0)^-1 kappa(K0, H0) mu(t, H0)
                    kappa[key] = mu[K][G.inv(t)] @ m0 @ mu[H0][t]
                    return kappa[key]
        middle = [L for L in support if H < L < K]
        if not middle:
            raise MissingValue(f"system {spec.name!r} has no kappa for G/{H} -> G/{K}")
        L = middle[0]
        kappa[key] = get_kappa(L, K) @ get_kappa(H, L)
        return kappa[key]

    def matrix(f: OrbitMorphism) -> IntMatrix:
        # f = mu(g, K) o kappa(K^g, H)
        g = f.image
        Kg = conjugate_subgroup(f.target, g)
        return mu[f.target][g] @ get_kappa(f.source, Kg)

    system = CoefficientSystem(G, lambda H: ranks[H], matrix, name=spec.name, support=support)
    system.check_functoriality()
    return system


def system_to_spec(M: CoefficientSystem, subgroups: Iterable[Subgroup], name: str) -> SystemSpec:
    """Generating data of ``M`` on the conjugation closure of ``subgroups``."""
    G = M.group
    support: list[Subgroup] = []
    for H in subgroups:
        for K in conjugacy_class(H):
            if K not in support:
                support.append(K)
    support.sort(key=lambda s: (s.order, s.members))
    spec = SystemSpec(name)
    reps: list[Subgroup] = []
    for H in support:
        if not any(H in conjugacy_class(R) for R in reps):
            reps.append(H)
            spec.values.append((H, M.rank(H)))
    for H in support:
        for s in G.generators:
            spec.mus.append((s, H, M.mu(s, H)))
    for H, K in itertools.permutations(support, 2):
        if H < K and not any(H < L < K for L in support):
            spec.kappas.append((H, K, M.kappa(K, H)))
    return spec


@dataclass
class GradedCoefficientSystem:
    """Finitely many rows ``q -> CoefficientSystem``."""

    rows: dict[int, CoefficientSystem]
    name: str = "graded"

    def row(self, q: int) -> CoefficientSystem | None:
        return self.rows.get(q)


# -- extension to G-sets -------------------------------------------------------

class OrbitModule:
    """``M[s]`` identified with ``M(G/G_r)`` for the least point ``r`` of the orbit."""

    def __init__(self, M: CoefficientSystem, S: FiniteGSet, s: int):
        self.system = M
        self.gset = S
        G = S.group
        self.orbit = sorted({S.act[g][s] for g in G.elements})
        self.representative = self.orbit[0]
        self.stabilizer = S.stabilizer(self.representative)
        self.presentation = M.value(self.stabilizer)
        self._aligner = {}
        for g in G.elements:
            self._aligner.setdefault(S.act[g][self.representative], g)
        self._s = s

    def aligning_element(self, t: int) -> int:
        """Least ``c`` with ``c * representative == t``."""
        return self._aligner[t]

    def canonicalize_point(self, t: int, x: Sequence[int]) -> list[int]:
        """Class of ``x (x) t`` with ``x in M(G/G_t)``, as a vector of ``M(G/G_r)``."""
        c = self._aligner[t]
        return self.system.mu(c, self.stabilizer).apply(list(x))

    def canonicalize(self, g: int, x: Sequence[int]) -> list[int]:
        """Class of ``x (x) g s`` with ``x in M(G/G_s^g)``."""
        return self.canonicalize_point(self.gset.act[g][self._s], x)


def orbit_module(M: CoefficientSystem, S: FiniteGSet, s: int) -> tuple[Presentation, OrbitModule]:
    om = OrbitModule(M, S, s)
    return om.presentation, om


@dataclass(frozen=True)
class GSetModule:
    """``M(S)`` as a free module with basis ``(orbit representative, generator index)``."""

    presentation: Presentation
    basis: tuple[tuple[int, int], ...]
    offsets: dict
    orbit_modules: dict

    def terms(self, vec: Sequence[int]) -> list[tuple[int, list[int]]]:
        out = []
        for rep, om in self.orbit_modules.items():
            o = self.offsets[rep]
            k = om.presentation.generator_count
            part = list(vec[o:o + k])
            if any(part):
                out.append((rep, part))
        return out


def apply_to_gset(M: CoefficientSystem, S: FiniteGSet) -> GSetModule:
    basis, offsets, oms = [], {}, {}
    for orbit, rep, _ in orbits_and_stabilizers(S):
        om = OrbitModule(M, S, rep)
        offsets[rep] = len(basis)
        oms[rep] = om
        basis.extend((rep, i) for i in range(om.presentation.generator_count))
    return GSetModule(Presentation.free(len(basis)), tuple(basis), offsets, oms)


def apply_to_map(M: CoefficientSystem, S: FiniteGSet, T: FiniteGSet,
                 f: Sequence[int]) -> ModuleMorphism:
    """``M(f)`` for an equivariant map of G-sets given as a point list."""
    G = S.group
    for g in G.elements:
        for x in S.points:
            if f[S.act[g][x]] != T.act[g][f[x]]:
                raise NotEquivariant(f"f(g x) != g f(x) at g = {G.label(g)}, x = {x}")
    src, tgt = apply_to_gset(M, S), apply_to_gset(M, T)
    n_t = tgt.presentation.generator_count
    cols = []
    for rep, om in src.orbit_modules.items():
        y = f[rep]
        Gy = T.stabilizer(y)
        k = M.kappa(Gy, om.stabilizer)
        tom = tgt.orbit_modules[min(T.act[g][y] for g in G.elements)]
        block = M.mu(tom.aligning_element(y), tom.stabilizer) @ k
        o = tgt.offsets[tom.representative]
        for j in range(block.cols):
            col = [0] * n_t
            for i in range(block.rows):
                col[o + i] = block[i, j]
            cols.append(col)
    return ModuleMorphism(src.presentation, tgt.presentation, IntMatrix.from_columns(cols, n_t))
