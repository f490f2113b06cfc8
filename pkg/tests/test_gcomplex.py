import itertools
import random

import pytest

from ghom.errors import InvalidComplex, InvalidHComplex, NotEquivariant, NotRegular
from ghom.gcomplex import (
    EquivariantSimplicialMap,
    GSimplicialComplex,
    SubcomplexPair,
    balanced_product,
    close,
    cone,
    disjoint_union,
    orbit_point,
    permutation_sign,
    quotient_complex,
    simplex_orbits,
    skeleton_pair,
    trivial_gset,
    validate,
)
from ghom.groups import FiniteGSet, symmetric_group
from ghom.oracles import simplicial_chain_complex
from ghom.samples import example, random_complex


@pytest.fixture(scope="module")
def hexagon():
    return example("hexagon_rotation").complex


def test_permutation_sign():
    assert permutation_sign((0, 1, 2), (0, 1, 2)) == 1
    assert permutation_sign((1, 0, 2), (0, 1, 2)) == -1
    assert permutation_sign((1, 2, 0), (0, 1, 2)) == 1


def test_validation_examples(octa):
    bad = example("edge_swap_invalid").complex
    rep = validate(bad)
    assert not rep.ok and any(f.startswith("(iv)") for f in rep.failures)
    assert validate(example("edge_subdivided").complex).ok
    assert validate(octa.complex).ok


def test_validation_reports_missing_faces_and_vertices():
    V = trivial_gset(3)
    X = GSimplicialComplex(V, [(0, 1, 2)])
    rep = validate(X)
    assert not rep.ok
    assert any(f.startswith("(ii)") for f in rep.failures)
    assert any(f.startswith("(i)") for f in rep.failures)


def test_close_examples(octa):
    tri = close([(0, 1, 2)], trivial_gset(3))
    assert len(tri) == 7 and validate(tri).ok
    one_face = close([octa.complex.order[octa.complex.simplices(2)[0]]], octa.complex.vertex_set)
    assert len(one_face.simplices(2)) == 2
    assert len(one_face.simplices(1)) == 6
    assert len(close([], trivial_gset(3), vertices=())) == 0


def test_close_is_valid_on_random_inputs():
    rng = random.Random(2)
    for _ in range(30):
        assert validate(random_complex(rng)).ok


def test_simplex_orbits(octa):
    X = octa.complex
    assert [len(simplex_orbits(X, p)) for p in range(3)] == [3, 6, 4]
    tri = close([(0, 1, 2)], trivial_gset(3))
    assert all(len(o.members) == 1 for p in range(3) for o in simplex_orbits(tri, p))
    S3 = symmetric_group(3)
    H = S3.generated([S3.element("(0 1)")])
    (orb,) = simplex_orbits(orbit_point(S3, H), 0)
    assert orb.stabilizer == H
    for p in range(X.dim + 1):
        for orb in simplex_orbits(X, p):
            for t, h in orb.members:
                assert X.translate(h, t) == orb.representative


def test_skeleton_pair(octa):
    X = octa.complex
    assert skeleton_pair(X, [], -1).total.registration == []
    assert len(skeleton_pair(X, [], 1).total) == 18
    assert len(skeleton_pair(X, [], 5).total) == len(X)


def test_subcomplex_pair_must_be_closed(octa):
    X = octa.complex
    edge = X.simplices(1)[0]
    with pytest.raises(InvalidComplex):
        SubcomplexPair(X, [edge])


def test_sign_of_examples(hexagon):
    X = hexagon
    s = X.simplices(1)[0]
    assert X.sign_of(0, s) == 1
    # store a translate in reversed order
    V = X.vertex_set
    seqs = [X.order[t] for t in X.registration]
    r = 1
    moved = tuple(V.act[r][v] for v in X.order[s])
    seqs = [tuple(reversed(q)) if frozenset(q) == frozenset(moved) else q for q in seqs]
    Y = GSimplicialComplex(V, seqs)
    assert validate(Y).ok
    assert Y.sign_of(r, s) == -1
    sub = example("edge_subdivided").complex
    for t in sub.registration:
        for g in sub.stabilizer(t).members:
            assert sub.sign_of(g, t) == 1


def test_sign_cocycle():
    rng = random.Random(9)
    for _ in range(20):
        X = random_complex(rng)
        G = X.group
        for s in X.registration:
            for g, h in itertools.product(G.elements, repeat=2):
                lhs = X.sign_of(G.mul(g, h), s)
                assert lhs == X.sign_of(g, X.translate(h, s)) * X.sign_of(h, s)


def test_quotients(octa, hexagon):
    tri = close([(0, 1, 2)], trivial_gset(3))
    Q = quotient_complex(tri)
    assert [len(c) for c in Q.cells] == [3, 3, 1] and Q.is_simplicial()
    Qh = quotient_complex(hexagon)
    assert [len(c) for c in Qh.cells] == [3, 3]
    Qo = quotient_complex(octa.complex)
    assert [len(c) for c in Qo.cells] == [3, 6, 4]
    assert not Qo.is_simplicial()  # every pair of vertex orbits carries two edges
    S3 = symmetric_group(3)
    V = FiniteGSet.cosets(S3.trivial)
    with pytest.raises(NotRegular):
        quotient_complex(close([(0, 1)], V))


def test_constant_assembly_matches_quotient(octa):
    from ghom.bredon import assemble
    from ghom.coeff import constant_system

    X = octa.complex
    C = assemble(X, constant_system(X.group))
    Q = quotient_complex(X).chain_complex()
    for p in range(1, X.dim + 1):
        assert C.d(p) == Q.d(p)


def test_balanced_products():
    S3 = symmetric_group(3)
    H = S3.generated([S3.element("(0 1)")])
    K, members = H.as_group()
    point = close([], trivial_gset(1, K))
    P = balanced_product(H, point, members)
    assert len(P.simplices(0)) == 3 and P.dim == 0
    edge = close([(0, 1)], trivial_gset(2, K))
    X = balanced_product(H, edge, members)
    assert validate(X).ok
    assert [len(X.simplices(p)) for p in range(2)] == [6, 3]
    assert [len(simplex_orbits(X, p)) for p in range(2)] == [2, 1]
    hexagon = example("hexagon_rotation").complex
    same = balanced_product(hexagon.group.whole, hexagon)
    assert [len(same.simplices(p)) for p in range(2)] == [6, 6]
    with pytest.raises(InvalidHComplex):
        balanced_product(H, edge)


def test_cone_and_union(hexagon):
    pt = cone(close([], trivial_gset(0), vertices=()))
    assert len(pt) == 1
    C = cone(hexagon)
    assert validate(C).ok
    assert [len(C.simplices(p)) for p in range(3)] == [7, 12, 6]
    U = disjoint_union(hexagon, hexagon)
    assert validate(U).ok and len(U) == 2 * len(hexagon)
    with pytest.raises(InvalidComplex):
        disjoint_union(hexagon, close([(0, 1)], trivial_gset(2)))


def test_equivariant_maps(hexagon):
    G = hexagon.group
    P = orbit_point(G, G.whole)
    n = hexagon.vertex_set.size
    f = EquivariantSimplicialMap(hexagon, P, (0,) * n)
    assert all(f.is_degenerate(s) for s in hexagon.simplices(1))
    assert not f.is_degenerate(hexagon.simplices(0)[0])
    with pytest.raises(NotEquivariant):
        EquivariantSimplicialMap(hexagon, hexagon, (0,) * n)


def test_oracle_chain_complex_is_classical():
    tri = close([(0, 1, 2)], trivial_gset(3))
    C, _ = simplicial_chain_complex(tri)
    assert C.ranks == [3, 3, 1]
    assert (C.d(1) @ C.d(2)).is_zero()
