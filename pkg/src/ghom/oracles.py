"""Non-equivariant reference computations used to cross-check Bredon homology.

These use only the vertex sets of the simplices (each simplex oriented by
increasing vertex index) and never look at orbit representatives, preferred
orders or coefficient systems.
"""

from __future__ import annotations

from typing import Iterable

from ghom.abelian import ChainComplex, GradedGroup, IntMatrix, Lattice, Subquotient
from ghom.gcomplex import GSimplicialComplex, Simplex, permutation_sign


def _sorted_simplices(X: GSimplicialComplex, skip: frozenset) -> list[list[tuple[int, ...]]]:
    out: list[list[tuple[int, ...]]] = [[] for _ in range(X.dim + 1)]
    for s in X.registration:
        if s not in skip:
            out[len(s) - 1].append(tuple(sorted(s)))
    for level in out:
        level.sort()
    return out


def simplicial_chain_complex(X: GSimplicialComplex, A: Iterable[Iterable[int]] = ()
                             ) -> tuple[ChainComplex, list[list[tuple[int, ...]]]]:
    """Ordinary relative chains ``C(X, A)`` with ascending orientations, ignoring the group."""
    skip = frozenset(Simplex(a) for a in A)
    cells = _sorted_simplices(X, skip)
    index = [{c: i for i, c in enumerate(level)} for level in cells]
    bd = {}
    for p in range(1, len(cells)):
        rows = [[0] * len(cells[p]) for _ in cells[p - 1]]
        for j, c in enumerate(cells[p]):
            for k in range(len(c)):
                f = c[:k] + c[k + 1:]
                i = index[p - 1].get(f)
                if i is not None:
                    rows[i][j] += (-1) ** k
        bd[p] = IntMatrix(rows, len(cells[p - 1]), len(cells[p]))
    return ChainComplex([len(level) for level in cells], bd), cells


def underlying_homology(X: GSimplicialComplex, A: Iterable[Iterable[int]] = ()) -> GradedGroup:
    """Homology of the complex with the action forgotten."""
    return simplicial_chain_complex(X, A)[0].graded_homology()


def coinvariant_homology(X: GSimplicialComplex, A: Iterable[Iterable[int]] = ()) -> GradedGroup:
    """Homology of the coinvariant complex ``C(X, A) / (g - 1)``.

    When every stabilizer fixes its simplex pointwise this is the cellular
    homology of the orbit space ``X/G`` relative to ``A/G``.
    """
    C, cells = simplicial_chain_complex(X, A)
    act = X.vertex_set.act
    index = [{c: i for i, c in enumerate(level)} for level in cells]
    rel = []
    for p, level in enumerate(cells):
        n = len(level)
        gens = []
        for j, c in enumerate(level):
            for g in X.group.elements:
                moved = tuple(act[g][v] for v in c)
                target = tuple(sorted(moved))
                v = [0] * n
                v[index[p][target]] += permutation_sign(moved, target)
                v[j] -= 1
                if any(v):
                    gens.append(v)
        rel.append(Lattice(n, gens))
    out = {}
    for p in range(len(cells)):
        n = len(cells[p])
        d_out = C.d(p)
        cycles = (Lattice.full(n).preimage(d_out, rel[p - 1]) if p >= 1 else Lattice.full(n))
        d_in = C.d(p + 1)
        bounds = Lattice(n, d_in.columns()) + rel[p]
        out[p] = Subquotient(cycles, bounds).invariants()
    return GradedGroup(out)


def quotient_homology(X: GSimplicialComplex, A: Iterable[Iterable[int]] = ()) -> GradedGroup:
    """Cellular homology of the orbit complex built by :func:`ghom.gcomplex.quotient_complex`."""
    from ghom.gcomplex import quotient_complex

    return quotient_complex(X, A).chain_complex().graded_homology()
