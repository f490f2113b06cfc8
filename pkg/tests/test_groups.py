import itertools
import random

import pytest

from ghom.errors import (
    ClosureExceedsLimit,
    NoIdentity,
    NoInverse,
    NonAssociative,
    NotAPermutation,
    NotASubgroupPair,
    NotComposable,
)
from ghom.groups import (
    FiniteGSet,
    compose,
    conjugate_subgroup,
    cyclic_group,
    dihedral_group,
    enumerate_morphisms,
    group_from_permutations,
    group_from_table,
    identity_morphism,
    make_kappa,
    make_mu,
    orbits_and_stabilizers,
    parse_cycles,
    symmetric_group,
)


@pytest.fixture(scope="module")
def S3():
    return group_from_permutations(3, [parse_cycles("(0 1)", 3), parse_cycles("(0 1 2)", 3)])


def test_tables():
    assert group_from_table([[0]]).order == 1
    Z2 = group_from_table([[0, 1], [1, 0]])
    assert Z2.order == 2 and Z2.inv(1) == 1


def test_table_errors():
    with pytest.raises(NoIdentity):
        group_from_table([[1, 0], [0, 1]])
    with pytest.raises(NoInverse):
        group_from_table([[0, 1], [1, 1]])
    # a loop that is not associative: x*y ordering of Z/3 subtraction-like table
    bad = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(NonAssociative):
        group_from_table(bad)


def test_permutation_groups(S3):
    assert group_from_permutations(3, [parse_cycles("(0 1 2)", 3)]).order == 3
    assert group_from_permutations(1, []).order == 1
    assert S3.order == 6
    assert symmetric_group(4).order == 24
    with pytest.raises(NotAPermutation):
        group_from_permutations(3, [(0, 0, 1)])
    with pytest.raises(ClosureExceedsLimit):
        group_from_permutations(5, [parse_cycles("(0 1)", 5), parse_cycles("(0 1 2 3 4)", 5)],
                                limit=60)


def test_conjugation(S3):
    A3 = S3.generated([S3.element("(0 1 2)")])
    for g in S3.elements:
        assert conjugate_subgroup(A3, g) == A3
    H = S3.generated([S3.element("(0 1)")])
    assert conjugate_subgroup(H, S3.element("(0 1 2)")) == S3.generated([S3.element("(1 2)")])
    assert conjugate_subgroup(H, 0) == H


def test_enumeration_examples(S3):
    e = S3.trivial
    for K in S3.subgroups:
        assert len(enumerate_morphisms(e, K)) == len(K.cosets)
    H = S3.generated([S3.element("(0 1)")])
    A3 = S3.generated([S3.element("(0 1 2)")])
    assert enumerate_morphisms(H, A3) == []
    assert len(enumerate_morphisms(A3, A3)) == 2


def test_mu_kappa_basics(S3):
    for H in S3.subgroups:
        assert make_mu(0, H).is_identity()
        assert make_kappa(H, H).is_identity()
    H = S3.generated([S3.element("(0 1)")])
    A3 = S3.generated([S3.element("(0 1 2)")])
    with pytest.raises(NotASubgroupPair):
        make_kappa(H, A3)
    with pytest.raises(NotComposable):
        compose(make_kappa(S3.whole, H), make_kappa(S3.whole, A3))


def test_factorization_through_mu_and_kappa():
    for G in (cyclic_group(4), symmetric_group(3), dihedral_group(4)):
        for H, K in itertools.product(G.subgroups, repeat=2):
            for f in enumerate_morphisms(H, K):
                g = f.image
                via = compose(make_mu(g, K), make_kappa(conjugate_subgroup(K, g), H))
                assert via == f


def test_compose_identity_and_associativity():
    rng = random.Random(3)
    G = dihedral_group(4)
    subs = G.subgroups
    for _ in range(200):
        H, K, L, N = (rng.choice(subs) for _ in range(4))
        fs, gs, hs = (enumerate_morphisms(H, K), enumerate_morphisms(K, L),
                      enumerate_morphisms(L, N))
        if not (fs and gs and hs):
            continue
        f, g, h = rng.choice(fs), rng.choice(gs), rng.choice(hs)
        assert compose(h, compose(g, f)) == compose(compose(h, g), f)
        assert compose(identity_morphism(K), f) == f == compose(f, identity_morphism(H))


def test_orbits_and_stabilizers(S3):
    trivial = FiniteGSet(S3, tuple(tuple(range(4)) for _ in S3.elements))
    orbits = orbits_and_stabilizers(trivial)
    assert len(orbits) == 4 and all(st == S3.whole for _, _, st in orbits)
    regular = FiniteGSet.cosets(S3.trivial)
    assert [(len(o), st.order) for o, _, st in orbits_and_stabilizers(regular)] == [(6, 1)]
    H = S3.generated([S3.element("(0 1)")])
    (orbit, rep, st), = orbits_and_stabilizers(FiniteGSet.cosets(H))
    assert len(orbit) == 3 and st.order == 2
    for G in (cyclic_group(4), dihedral_group(4)):
        for K in G.subgroups:
            S = FiniteGSet.cosets(K)
            for orbit, rep, st in orbits_and_stabilizers(S):
                assert len(orbit) * st.order == G.order
