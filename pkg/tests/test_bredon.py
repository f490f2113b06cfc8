import dataclasses
import random

import pytest

from ghom.abelian import ChainComplex, IntMatrix
from ghom.bredon import (
    assemble,
    bredon_homology,
    check_sequence,
    connecting_map,
    excision_check,
    homology,
    homology_mod_p,
    induced_chain_map,
    kernel_of_projection_check,
    pair_sequence,
    reduced_homology,
    triple_sequence,
)
from ghom.coeff import SystemSpec, constant_system, free_orbit_system, load_user_system
from ghom.errors import (
    BasepointNotFixed,
    BasepointNotVertex,
    ExactnessFailure,
    NotExcisable,
    SystemMissingStabilizer,
)
from ghom.gcomplex import (
    EquivariantSimplicialMap,
    SubcomplexPair,
    balanced_product,
    close,
    cone,
    disjoint_union,
    orbit_point,
    trivial_gset,
)
from ghom.groups import cyclic_group, symmetric_group
from ghom.oracles import simplicial_chain_complex
from ghom.samples import example, random_complex, random_system, small_groups


def inv(groups):
    return {n: groups[n] for n in groups.degrees()}


Z, ZERO, Z2 = (1, ()), (0, ()), (0, (2,))


@pytest.fixture(scope="module")
def hexagon():
    return example("hexagon_rotation").complex


def test_orbit_point_chains():
    rng = random.Random(1)
    for G in small_groups()[1:]:
        for H in G.subgroups:
            M = random_system(rng, G)
            C = assemble(orbit_point(G, H), M)
            assert C.top == 0 and C.rank(0) == M.rank(H)


def test_trivial_group_gives_classical_chains():
    tri = close([(0, 2, 1), (2, 3)], trivial_gset(4))
    C = assemble(tri, constant_system(tri.group))
    for p in (1, 2):
        rows = {s: i for i, (s, _) in enumerate(C.basis[p - 1])}
        for j, (s, _) in enumerate(C.basis[p]):
            seq = tri.order[s]
            want = [0] * C.rank(p - 1)
            for k in range(p + 1):
                want[rows[frozenset(seq[:k] + seq[k + 1:])]] += (-1) ** k
            assert [C.d(p)[i, j] for i in range(C.rank(p - 1))] == want
    classical, _ = simplicial_chain_complex(tri)
    assert homology(C).groups == classical.graded_homology()


def test_homology_examples(octa, hexagon):
    X = octa.complex
    assert inv(bredon_homology(X, constant_system(X.group)).groups) == {0: Z, 1: Z2, 2: ZERO}
    assert inv(bredon_homology(X, free_orbit_system(X.group)).groups) == {0: Z, 1: ZERO, 2: Z}
    assert inv(bredon_homology(hexagon, constant_system(hexagon.group)).groups) == {0: Z, 1: Z}
    C = assemble(X, constant_system(X.group))
    assert homology_mod_p(C, 2) == {0: 1, 1: 1, 2: 1}
    assert homology_mod_p(C, 3) == {0: 1, 1: 0, 2: 0}


def test_sign_system_on_octahedron(octa):
    X = octa.complex
    got = bredon_homology(X, octa.system("sign")).groups
    assert inv(got) == {0: Z2, 1: ZERO, 2: Z}


def test_missing_stabilizer_value():
    e = example("edge_subdivided")
    G = e.group
    partial = load_user_system(SystemSpec("free-only", values=[(G.trivial, 1)]), G)
    with pytest.raises(SystemMissingStabilizer):
        assemble(e.complex, partial)


def test_reduced_homology(octa, hexagon):
    G = cyclic_group(2)
    P = orbit_point(G, G.whole)
    assert reduced_homology(P, 0, constant_system(G)).groups.nonzero_degrees() == []
    C = cone(hexagon)
    assert reduced_homology(C, "apex", constant_system(G)).groups.nonzero_degrees() == []
    X = octa.complex
    for v in ("a", "B", 2):
        assert inv(reduced_homology(X, v, constant_system(G)).groups) == {0: ZERO, 1: Z2, 2: ZERO}
    with pytest.raises(BasepointNotVertex):
        reduced_homology(X, "nowhere", constant_system(G))


def test_induced_chain_maps(octa, hexagon):
    X = octa.complex
    M = constant_system(X.group)
    C = assemble(X, M)
    ident = induced_chain_map(EquivariantSimplicialMap(X, X, tuple(range(6))), C, C)
    for p, m in ident.matrices.items():
        assert m == IntMatrix.identity(C.rank(p))
    # collapse to a point: an isomorphism on H_0 of a connected free example
    P = orbit_point(X.group, X.group.whole)
    CP = assemble(P, M)
    collapse = induced_chain_map(EquivariantSimplicialMap(X, P, (0,) * 6), C, CP)
    assert collapse.on_homology()[0].is_isomorphism()
    assert collapse.matrices[1].is_zero()


def test_degenerate_simplices_map_to_zero():
    V = trivial_gset(3)
    X = close([(0, 1), (1, 2)], V)
    Y = close([(0, 1)], trivial_gset(2, X.group))
    f = EquivariantSimplicialMap(X, Y, (0, 1, 1))
    M = constant_system(X.group)
    cm = induced_chain_map(f, assemble(X, M), assemble(Y, M))
    col = X.simplices(1).index(frozenset({1, 2}))
    assert all(cm.matrices[1][i, col] == 0 for i in range(cm.matrices[1].rows))


def test_connecting_map(hexagon):
    Cx = cone(hexagon)
    pair = SubcomplexPair(Cx, hexagon.registration)
    M = constant_system(hexagon.group)
    d = connecting_map(pair, M, 2)
    assert d.is_isomorphism() and d.source.invariants() == Z
    full = SubcomplexPair(hexagon, hexagon.registration)
    for n in range(hexagon.dim + 1):
        assert connecting_map(full, M, n).is_zero()


def test_exactness_of_pairs_and_triples(octa):
    X = octa.complex
    M = constant_system(X.group)
    skel = lambda p: [s for s in X.registration if len(s) <= p + 1]
    assert check_sequence(pair_sequence(SubcomplexPair(X, skel(1)), M)).ok
    rep = check_sequence(triple_sequence(X, skel(1), skel(0), M))
    assert rep.ok and rep.nodes_checked > 0


def test_corrupted_boundary_is_located(octa):
    X = octa.complex
    M = constant_system(X.group)
    ses = pair_sequence(SubcomplexPair(X, [s for s in X.registration if len(s) == 1]), M)
    # doubling d_2 keeps d_1 d_2 = 0 but no longer matches the sub and quotient complexes
    bad_total = ChainComplex(ses.total.ranks, {1: ses.total.d(1), 2: ses.total.d(2).scale(2)})
    bad = dataclasses.replace(ses, total=bad_total)
    rep = check_sequence(bad)
    assert not rep.ok
    assert any("H_1(X)" in f for f in rep.failures)
    with pytest.raises(ExactnessFailure) as err:
        check_sequence(bad, raise_on_failure=True)
    assert "H_1(X)" in str(err.value)


def test_excision():
    V = trivial_gset(4)
    X = close([(0, 1, 2), (1, 2, 3)], V)
    T1 = [s for s in X.registration if s <= frozenset({0, 1, 2})]
    M = constant_system(X.group)
    assert excision_check(X, T1, [], M).ok
    U = [s for s in T1 if 0 in s]
    rep = excision_check(X, T1, U, M)
    assert rep.ok and rep.per_degree
    with pytest.raises(NotExcisable):
        excision_check(X, T1, [frozenset({1, 2})], M)
    with pytest.raises(NotExcisable):
        excision_check(X, T1, [frozenset({3})], M)


def test_equivariant_excision_on_union(hexagon):
    U = disjoint_union(hexagon, hexagon)
    first = [s for s in U.registration if all(v < 6 for v in s)]
    for M in (constant_system(U.group), free_orbit_system(U.group)):
        assert excision_check(U, first, first, M).ok


def test_kernel_of_projection():
    G = cyclic_group(2)
    point = close([], trivial_gset(1))
    assert kernel_of_projection_check(G.trivial, point, 0, embedding=[0]).ok
    hexagon = close([(i, (i + 1) % 6) for i in range(6)], trivial_gset(6))
    rep = kernel_of_projection_check(G.trivial, hexagon, 0, embedding=[0])
    assert rep.ok and rep.source[1] == (1, ())
    rotating = example("hexagon_rotation").complex
    with pytest.raises(BasepointNotFixed):
        kernel_of_projection_check(rotating.group.whole, rotating, 0)


def test_face_coefficients_are_signed_kappa_images():
    """For a face that is its own orbit representative in its stored order, the
    boundary block is (-1)^k times the kappa matrix."""
    rng = random.Random(21)
    S3 = symmetric_group(3)
    H = S3.generated([S3.element("(0 1)")])
    K, members = H.as_group()
    simplex = close([(0, 1, 2)], trivial_gset(3, K))
    cases = [balanced_product(H, simplex, members)]
    cases += [random_complex(rng) for _ in range(25)]
    checked = 0
    for X in cases:
        M = random_system(rng, X.group)
        C = assemble(X, M)
        for p in range(1, C.top + 1):
            for orb in C.orbits[p]:
                s = orb.representative
                seq = X.order[s]
                col0 = C.offsets[p][s]
                faces = [seq[:k] + seq[k + 1:] for k in range(p + 1)]
                for k, face in enumerate(faces):
                    fo = X.orbit_of(face)
                    if fo.representative != frozenset(face) or X.order[fo.representative] != face:
                        continue
                    if sum(X.orbit_of(f) is fo for f in faces) > 1:
                        continue
                    kap = M.kappa(fo.stabilizer, orb.stabilizer)
                    row0 = C.offsets[p - 1][fo.representative]
                    for i in range(kap.rows):
                        for j in range(kap.cols):
                            assert C.d(p)[row0 + i, col0 + j] == (-1) ** k * kap[i, j]
                    checked += 1
    assert checked > 20
