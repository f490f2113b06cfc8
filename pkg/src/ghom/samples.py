"""Bundled examples and random inputs for tests and demonstrations."""

from __future__ import annotations

import random
from importlib import resources

from ghom.abelian import IntMatrix
from ghom.coeff import (
    CoefficientSystem,
    change_of_basis,
    coinvariant_system,
    load_user_system,
    system_to_spec,
)
from ghom.fileformat import InputDocument, load
from ghom.gcomplex import GSimplicialComplex, close, validate
from ghom.groups import (
    FiniteGroup,
    FiniteGSet,
    Subgroup,
    cyclic_group,
    dihedral_group,
    group_from_permutations,
    symmetric_group,
)


def example_names() -> list[str]:
    root = resources.files("ghom") / "data"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".ghom"))


def example(name: str) -> InputDocument:
    if not name.endswith(".ghom"):
        name += ".ghom"
    return load(name)


def valid_examples() -> list[InputDocument]:
    """Every bundled example whose complex passes validation."""
    docs = [example(n) for n in example_names()]
    return [d for d in docs if validate(d.complex).ok]


def small_groups() -> list[FiniteGroup]:
    return [group_from_permutations(1, []), cyclic_group(2), cyclic_group(3), cyclic_group(4),
            symmetric_group(3), dihedral_group(4)]


def gset_of_cosets(subgroups: list[Subgroup]) -> FiniteGSet:
    """Disjoint union of the coset spaces ``G/H`` for the listed subgroups."""
    G = subgroups[0].group
    tables = [FiniteGSet.cosets(H) for H in subgroups]
    rows = []
    for g in G.elements:
        row, off = [], 0
        for T in tables:
            row.extend(off + x for x in T.act[g])
            off += T.size
        rows.append(tuple(row))
    return FiniteGSet(G, tuple(rows))


def random_complex(rng: random.Random, G: FiniteGroup | None = None,
                   max_orbits: int = 4, max_dim: int = 2, seeds: int = 4) -> GSimplicialComplex:
    """Random valid complex: vertex orbits ``G/H``, seeds kept only if the result validates."""
    G = G or rng.choice(small_groups())
    subs = list(G.subgroups)
    orbit_subs = [rng.choice(subs) for _ in range(rng.randint(1, max_orbits))]
    V = gset_of_cosets(orbit_subs)
    kept: list[tuple[int, ...]] = []
    X = close([], V)
    for _ in range(seeds):
        size = rng.randint(2, min(max_dim + 1, V.size)) if V.size >= 2 else 1
        cand = tuple(rng.sample(range(V.size), size))
        Y = close(kept + [cand], V)
        if validate(Y).ok:
            kept.append(cand)
            X = Y
    return X


def random_unimodular(rng: random.Random, n: int, steps: int = 4) -> tuple[IntMatrix, IntMatrix]:
    """Random ``(P, P^-1)`` built from elementary operations."""
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    Q = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-2, -1, 1, 2])
        # P <- E P with E = I + c e_ij ; Q <- Q E^-1
        P[i] = [a + c * b for a, b in zip(P[i], P[j])]
        for row in Q:
            row[j] -= c * row[i]
    if n and rng.random() < 0.5:
        k = rng.randrange(n)
        P[k] = [-x for x in P[k]]
        for row in Q:
            row[k] = -row[k]
    return IntMatrix(P, n, n), IntMatrix(Q, n, n)


def random_system(rng: random.Random, G: FiniteGroup, support: list[Subgroup] | None = None,
                  name: str = "random") -> CoefficientSystem:
    """Coinvariants of a random G-set in random bases, reloaded from its generating data."""
    subs = list(G.subgroups)
    S = gset_of_cosets([rng.choice(subs) for _ in range(rng.randint(1, 3))])
    M = coinvariant_system(S)
    support = list(G.subgroups) if support is None else support
    bases = {H: random_unimodular(rng, M.rank(H)) for H in G.subgroups}
    twisted = change_of_basis(M, bases)
    return load_user_system(system_to_spec(twisted, support, name), G)
