import random

import pytest

from ghom.abelian import ChainComplex, IntMatrix
from ghom.bredon import assemble
from ghom.coeff import GradedCoefficientSystem, constant_system, free_orbit_system
from ghom.errors import ValidationError
from ghom.gcomplex import SubcomplexPair, close, orbit_point, trivial_gset
from ghom.groups import cyclic_group
from ghom.samples import random_complex, random_system
from ghom.spectral import (
    FilteredComplex,
    aq_homology,
    compare_pages,
    derive,
    direct_page,
    exact_couple,
    graded_assemble,
    page_of,
    run,
)

Z, ZERO, Z2 = (1, ()), (0, ()), (0, (2,))


@pytest.fixture(scope="module")
def octa_chain(octa):
    X = octa.complex
    return assemble(X, constant_system(X.group))


def test_first_page_is_the_chain_complex(octa_chain):
    fc = FilteredComplex.from_bredon(octa_chain)
    E1 = page_of(exact_couple(fc))
    for (p, q), inv in E1.invariants().items():
        assert inv == ((octa_chain.rank(p), ()) if q == 0 else ZERO)
    for p in (1, 2):
        assert E1.d[(p, 0)].matrix() == octa_chain.d(p)


def test_second_page_and_stabilization(octa_chain):
    rep = run(FilteredComplex.from_bredon(octa_chain))
    assert rep.page(2).nonzero() == {(0, 0): Z, (1, 0): Z2}
    assert rep.stable_at == 4
    assert rep.page(3).invariants() == rep.page(2).invariants() == rep.einf.invariants()
    assert rep.convergence and rep.e2_matches_rows and rep.direct_matches


def _two_step():
    """``Z --1--> Z`` with the source in filtration 2 and the target in filtration 0."""
    return FilteredComplex(ChainComplex([1, 1], {1: IntMatrix([[1]])}), {0: [0], 1: [2]})


def test_second_differential_kills_both_classes():
    fc = _two_step()
    rep = run(fc)
    assert rep.page(1).nonzero() == {(0, 0): Z, (2, -1): Z}
    assert rep.page(2).nonzero() == {(0, 0): Z, (2, -1): Z}
    assert rep.page(2).d[(2, -1)].is_isomorphism()
    assert rep.page(3).nonzero() == {}
    assert rep.einf.nonzero() == {}
    assert rep.convergence and rep.direct_matches
    assert rep.homology.nonzero_degrees() == []


def test_direct_pages_agree_with_derived_couples():
    rng = random.Random(5)
    for _ in range(8):
        X = random_complex(rng)
        C = assemble(X, random_system(rng, X.group))
        fc = FilteredComplex.from_bredon(C)
        c = exact_couple(fc)
        for r in (1, 2, 3):
            assert compare_pages(direct_page(fc, r), page_of(c))
            c = derive(c)
    fc = _two_step()
    c = derive(exact_couple(fc))
    assert compare_pages(direct_page(fc, 2), page_of(c))
    assert not compare_pages(direct_page(fc, 3), page_of(c))


def test_couple_is_exact(octa_chain):
    assert exact_couple(FilteredComplex.from_bredon(octa_chain)).check_exactness() > 0
    assert exact_couple(_two_step()).check_exactness() > 0


def test_filtration_must_respect_boundary():
    with pytest.raises(ValidationError):
        FilteredComplex(ChainComplex([1, 1], {1: IntMatrix([[1]])}), {0: [1], 1: [0]})
    with pytest.raises(ValidationError):
        FilteredComplex(ChainComplex([1], {}), {0: [0, 0]})


def test_point_is_concentrated_at_origin():
    G = cyclic_group(2)
    C = assemble(orbit_point(G, G.whole), free_orbit_system(G))
    rep = run(FilteredComplex.from_bredon(C))
    assert rep.einf.nonzero() == {(0, 0): Z}


def test_graded_rows_shift_total_degree():
    G = cyclic_group(2)
    X = close([(0, 1)], trivial_gset(2, G))
    pair = SubcomplexPair.absolute(X)
    GM = GradedCoefficientSystem({0: constant_system(G), 2: constant_system(G, 2)})
    fc = graded_assemble(pair, GM)
    assert fc.chain.ranks == [2, 1, 4, 2]
    rep = run(fc)
    assert rep.page(2).nonzero() == {(0, 0): Z, (0, 2): (2, ())}
    assert rep.e2_matches_rows and rep.convergence
    assert aq_homology(pair, GM, 1).nonzero_degrees() == []
    assert aq_homology(pair, GM, 2)[0] == (2, ())
    with pytest.raises(ValidationError):
        graded_assemble(pair, GradedCoefficientSystem({-1: constant_system(G)}))


def test_two_row_example(octa):
    X = octa.complex
    GM = octa.graded["two_row"]
    rep = run(graded_assemble(SubcomplexPair.absolute(X), GM))
    assert rep.convergence and rep.e2_matches_rows and rep.direct_matches
    for q in (0, 1):
        row = aq_homology(SubcomplexPair.absolute(X), GM, q)
        for p in row.degrees():
            assert rep.page(2).invariants()[(p, q)] == row[p]
