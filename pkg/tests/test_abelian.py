import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghom.abelian import (
    ChainComplex,
    GradedGroup,
    IntMatrix,
    Lattice,
    ModuleMorphism,
    Presentation,
    cokernel,
    field_homology,
    homology_at,
    image,
    induced_on_homology,
    kernel,
)
from ghom.abelian.modules import subquotient
from ghom.abelian.snf import elementary_divisors, kernel_basis, smith_normal_form
from ghom.errors import CompositionNotZero, IllDefinedMorphism, NotAChainMap, NotPrime
from ghom.samples import random_unimodular


def M(rows, cols=None):
    rows = [list(r) for r in rows]
    return IntMatrix(rows, len(rows), cols if cols is not None else len(rows[0]))


matrices = st.integers(1, 7).flatmap(
    lambda m: st.integers(1, 7).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n),
                           min_size=m, max_size=m)))


def _minor_gcd(A: IntMatrix, k: int) -> int:
    g = 0
    for rows in itertools.combinations(range(A.rows), k):
        for cols in itertools.combinations(range(A.cols), k):
            g = math.gcd(g, A.select(rows, cols).determinant())
    return g


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_properties(rows):
    A = M(rows)
    U, D, V = smith_normal_form(A)
    assert U @ A @ V == D
    assert abs(U.determinant()) == 1 and abs(V.determinant()) == 1
    diag = [D[i, i] for i in range(min(A.shape))]
    assert all(D[i, j] == 0 for i in range(A.rows) for j in range(A.cols) if i != j)
    nz = [d for d in diag if d]
    assert diag[:len(nz)] == nz and all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n),
                       min_size=1, max_size=4)))
def test_snf_against_determinantal_divisors(rows):
    """d_1 ... d_k equals the gcd of the k x k minors."""
    A = M(rows)
    divs = elementary_divisors(A)
    prod = 1
    for k in range(1, min(A.shape) + 1):
        g = _minor_gcd(A, k)
        if g == 0:
            assert len(divs) < k
            break
        prod *= divs[k - 1]
        assert prod == g


def test_snf_examples():
    assert smith_normal_form(IntMatrix.identity(3))[1] == IntMatrix.identity(3)
    assert smith_normal_form(M([[2, 4], [6, 8]]))[1] == M([[2, 0], [0, 4]])
    assert smith_normal_form(IntMatrix.zeros(2, 3))[1] == IntMatrix.zeros(2, 3)


def test_homology_at_examples():
    z = IntMatrix.zeros(3, 0)
    assert homology_at(z, IntMatrix.zeros(0, 3)) == (3, ())
    circle = M([[-1, 0, 1], [1, -1, 0], [0, 1, -1]])  # edges 01, 12, 20
    assert homology_at(IntMatrix.zeros(3, 0), IntMatrix.zeros(0, 3)) == (3, ())
    assert homology_at(circle, IntMatrix.zeros(0, 3)) == (1, ())
    assert homology_at(IntMatrix.zeros(3, 0), circle) == (1, ())
    # one-cell-per-dimension projective plane: d2 = 2, d1 = 0
    assert homology_at(M([[2]]), M([[0]])) == (0, (2,))
    with pytest.raises(CompositionNotZero):
        homology_at(M([[1]]), M([[1]]))


def test_homology_is_basis_independent():
    rng = random.Random(7)
    for _ in range(40):
        n0, n1, n2 = rng.randint(1, 5), rng.randint(1, 6), rng.randint(1, 5)
        d2 = M([[rng.randint(-3, 3) for _ in range(n2)] for _ in range(n1)])
        # d1 kills the image of d2: its rows combine left-kernel vectors of d2
        left = kernel_basis(d2.T)
        rows = []
        for _ in range(n0):
            coeffs = [rng.randint(-2, 2) for _ in left]
            rows.append([sum(c * v[j] for c, v in zip(coeffs, left)) for j in range(n1)])
        d1 = M(rows, n1)
        P, Pi = random_unimodular(rng, n1)
        assert homology_at(d2, d1) == homology_at(P @ d2, d1 @ Pi)


def test_kernel_image_cokernel():
    Z = Presentation.free
    f = ModuleMorphism(Z(2), Z(2), M([[1, 1], [1, 1]]))
    K, inc = kernel(f)
    I, _ = image(f)
    C, proj = cokernel(f)
    assert K.canonical_form() == (1, ()) and I.canonical_form() == (1, ())
    assert (f.matrix @ inc.matrix).is_zero()
    assert ModuleMorphism(Z(2), C, proj.matrix @ f.matrix).as_map().is_zero()
    two = ModuleMorphism(Z(1), Z(1), M([[2]]))
    assert cokernel(two)[0].canonical_form() == (0, (2,))
    zero = ModuleMorphism(Z(2), Z(3), IntMatrix.zeros(3, 2))
    assert kernel(zero)[0].canonical_form() == (2, ())
    assert image(zero)[0].canonical_form() == (0, ())
    bad = ModuleMorphism(Presentation.cyclic(2), Z(1), M([[1]]))
    with pytest.raises(IllDefinedMorphism):
        kernel(bad)


def test_subquotients():
    Z = Presentation.free
    assert subquotient([[1, 0], [0, 1]], [], Z(2))[0].canonical_form() == (2, ())
    assert subquotient([[2]], [[4]], Z(1))[0].canonical_form() == (0, (2,))
    # <(1,1),(1,-1)> / <(2,0)>: (2,0) is the sum of the generators, so this is Z
    assert subquotient([[1, 1], [1, -1]], [[2, 0]], Z(2))[0].canonical_form() == (1, ())


def test_lattice_basics():
    L = Lattice(2, [[2, 0], [0, 3]])
    assert [4, 3] in L and [1, 0] not in L
    assert L.intersect(Lattice(2, [[1, 1]])) == Lattice(2, [[6, 6]])
    assert Lattice(2, [[1, 1]]) + Lattice(2, [[1, -1]]) == Lattice(2, [[1, 1], [0, 2]])


def test_field_homology():
    circle = M([[-1, 0, 1], [1, -1, 0], [0, 1, -1]])
    zero_in, zero_out = IntMatrix.zeros(3, 0), IntMatrix.zeros(0, 3)
    assert field_homology(zero_in, circle, 2) == 1
    assert field_homology(circle, zero_out, 2) == 1
    rp2 = {0: (IntMatrix.zeros(1, 1), IntMatrix.zeros(0, 1)),
           1: (M([[2]]), M([[0]])),
           2: (IntMatrix.zeros(1, 0), M([[2]]))}
    assert [field_homology(a, b, 2) for a, b in rp2.values()] == [1, 1, 1]
    assert [field_homology(a, b, 3) for a, b in rp2.values()] == [1, 0, 0]
    with pytest.raises(NotPrime):
        field_homology(zero_in, circle, 4)


def test_induced_on_homology():
    rp2 = ChainComplex([1, 1, 1], {1: M([[0]]), 2: M([[2]])})
    circle = ChainComplex([1, 1], {1: M([[0]])})
    ident = induced_on_homology({0: M([[1]]), 1: M([[1]]), 2: M([[1]])}, rp2, rp2)
    assert all(f.is_isomorphism() for f in ident.values())
    # circle -> projective plane, the 1-cell going to the 1-cell: Z -> Z/2 on H_1
    f = induced_on_homology({0: M([[1]]), 1: M([[1]])}, circle, rp2)
    assert f[1].is_surjective() and not f[1].is_injective()
    zero = induced_on_homology({0: M([[0]]), 1: M([[0]])}, circle, rp2)
    assert all(g.is_zero() for g in zero.values())
    with pytest.raises(NotAChainMap):
        induced_on_homology({1: M([[1]]), 2: M([[1]])}, rp2, ChainComplex([1, 1, 1], {2: M([[3]])}))


def test_graded_group_roundtrip():
    G = GradedGroup({0: (1, ()), 1: (0, (2, 4)), 2: (3, ())})
    assert GradedGroup.from_json(G.to_json()) == G
    assert G.format(1) == "Z/2 (+) Z/4"
