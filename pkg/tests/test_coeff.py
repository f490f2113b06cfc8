import random

import pytest

from ghom.abelian import IntMatrix
from ghom.coeff import (
    GradedCoefficientSystem,
    SystemSpec,
    apply_to_gset,
    apply_to_map,
    constant_system,
    free_orbit_system,
    load_user_system,
    orbit_module,
    system_to_spec,
)
from ghom.errors import (
    FunctorialityViolation,
    MissingValue,
    NotEquivariant,
    SystemMissingStabilizer,
)
from ghom.groups import FiniteGSet, cyclic_group, enumerate_morphisms, symmetric_group
from ghom.samples import gset_of_cosets, random_system, small_groups


@pytest.fixture(scope="module")
def Z2():
    return cyclic_group(2)


def test_constant_systems():
    S3 = symmetric_group(3)
    M = constant_system(S3)
    zero = constant_system(S3, 0)
    M2 = constant_system(S3, 2)
    for H in S3.subgroups:
        for K in S3.subgroups:
            for f in enumerate_morphisms(H, K):
                assert M.on_morphism(f) == IntMatrix.identity(1)
                assert M2.on_morphism(f) == IntMatrix.identity(2)
                assert zero.on_morphism(f).shape == (0, 0)
    assert M.check_functoriality() > 0


def test_free_orbit_system(Z2):
    F = free_orbit_system(Z2)
    e, G = Z2.trivial, Z2.whole
    assert F.rank(G) == 1 and F.rank(e) == 2
    assert F.mu(1, e) == IntMatrix([[0, 1], [1, 0]])
    assert F.kappa(G, e) == IntMatrix([[1, 1]])
    F.check_functoriality()


def test_sign_system(Z2):
    e, G = Z2.trivial, Z2.whole
    spec = SystemSpec("sign", values=[(e, 1), (G, 1)], kappas=[(e, G, IntMatrix([[0]]))],
                      mus=[(1, e, IntMatrix([[-1]]))])
    M = load_user_system(spec, Z2)
    assert M.mu(1, e) == IntMatrix([[-1]])
    assert M.mu(1, e) != constant_system(Z2).mu(1, e)
    assert M.check_functoriality() > 0


def test_inconsistent_kappa_is_rejected(Z2):
    e, G = Z2.trivial, Z2.whole
    spec = SystemSpec("bad", values=[(e, 1), (G, 1)], kappas=[(e, G, IntMatrix([[2]]))],
                      mus=[(1, e, IntMatrix([[-1]]))])
    with pytest.raises(FunctorialityViolation):
        load_user_system(spec, Z2)


def test_missing_value(Z2):
    e, G = Z2.trivial, Z2.whole
    with pytest.raises(MissingValue):
        load_user_system(SystemSpec("x", values=[(e, 1)], kappas=[(e, G, IntMatrix([[1]]))]), Z2)


def test_partial_support(Z2):
    M = load_user_system(SystemSpec("only-e", values=[(Z2.trivial, 1)]), Z2)
    assert M.rank(Z2.trivial) == 1
    with pytest.raises(SystemMissingStabilizer):
        M.rank(Z2.whole)


def test_spec_roundtrip_reproduces_systems():
    rng = random.Random(4)
    for G in small_groups()[1:]:
        for M in (constant_system(G), free_orbit_system(G), random_system(rng, G)):
            again = load_user_system(system_to_spec(M, G.subgroups, "copy"), G)
            for H in G.subgroups:
                for K in G.subgroups:
                    for f in enumerate_morphisms(H, K):
                        assert again.on_morphism(f) == M.on_morphism(f)


def test_orbit_modules(Z2):
    trivial = FiniteGSet(Z2, ((0,), (0,)))
    pres, om = orbit_module(constant_system(Z2), trivial, 0)
    assert om.canonicalize(1, [5]) == [5]
    free = FiniteGSet.cosets(Z2.trivial)
    pres, om = orbit_module(constant_system(Z2), free, 1)
    assert om.canonicalize(1, [3]) == [3]
    F = free_orbit_system(Z2)
    pres, om = orbit_module(F, free, 0)
    assert pres.canonical_form() == (2, ())
    assert om.canonicalize(1, [1, 0]) == [0, 1]
    assert om.canonicalize(0, [1, 0]) == [1, 0]


def test_orbit_module_representative_independence():
    S3 = symmetric_group(3)
    rng = random.Random(8)
    M = random_system(rng, S3)
    S = gset_of_cosets([S3.generated([S3.element("(0 1)")])])
    forms = {orbit_module(M, S, s)[0].canonical_form() for s in S.points}
    assert len(forms) == 1


def test_apply_to_gset(Z2):
    empty = FiniteGSet(Z2, ((), ()))
    assert apply_to_gset(constant_system(Z2), empty).presentation.generator_count == 0
    point = FiniteGSet.cosets(Z2.whole)
    assert apply_to_gset(constant_system(Z2), point).presentation.generator_count == 1
    two_free = gset_of_cosets([Z2.trivial, Z2.trivial])
    assert apply_to_gset(free_orbit_system(Z2), two_free).presentation.generator_count == 4


def test_apply_to_map(Z2):
    M = constant_system(Z2)
    two_free = gset_of_cosets([Z2.trivial, Z2.trivial])
    point = FiniteGSet.cosets(Z2.whole)
    ident = apply_to_map(M, two_free, two_free, list(two_free.points))
    assert ident.matrix == IntMatrix.identity(2)
    collapse = apply_to_map(M, two_free, point, [0] * 4)
    assert collapse.matrix == IntMatrix([[1, 1]])
    one_free = FiniteGSet.cosets(Z2.trivial)
    incl = apply_to_map(M, one_free, two_free, [0, 1])
    assert incl.matrix == IntMatrix([[1], [0]])
    with pytest.raises(NotEquivariant):
        apply_to_map(M, one_free, two_free, [0, 2])


def test_apply_to_map_is_functorial():
    rng = random.Random(12)
    G = symmetric_group(3)
    M = random_system(rng, G)
    subs = G.subgroups
    for _ in range(15):
        H = rng.choice(subs)
        K = rng.choice([k for k in subs if H <= k])
        L = rng.choice([l for l in subs if K <= l])
        S, T, U = (FiniteGSet.cosets(X) for X in (H, K, L))
        f = [_coset_image(G, H, K, i) for i in S.points]
        g = [_coset_image(G, K, L, j) for j in T.points]
        gf = [g[f[i]] for i in S.points]
        lhs = apply_to_map(M, S, U, gf).matrix
        rhs = apply_to_map(M, T, U, g).matrix @ apply_to_map(M, S, T, f).matrix
        assert lhs == rhs


def _coset_image(G, H, K, i):
    """Image of coset ``i`` of ``H`` under ``aH -> aK``."""
    a = H.cosets.representatives[i]
    return K.cosets.coset_of[a]


def test_graded_rows(Z2):
    GM = GradedCoefficientSystem({0: constant_system(Z2), 2: free_orbit_system(Z2)})
    assert GM.row(1) is None and GM.row(2).rank(Z2.trivial) == 2
