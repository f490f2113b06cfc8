"""Subgroups of Z^n, stored by their row Hermite basis."""

from __future__ import annotations

from typing import Iterable, Sequence

from ghom.abelian.matrix import IntMatrix
from ghom.abelian.snf import echelon, hermite_rows


class Lattice:
    """Subgroup of ``Z^dim`` spanned by a set of integer vectors.

    The stored basis is in row Hermite normal form, so two lattices are equal
    exactly when their bases are equal.
    """

    __slots__ = ("dim", "basis", "_pivots")

    def __init__(self, dim: int, gens: Iterable[Sequence[int]] = ()):
        gens = [tuple(int(x) for x in g) for g in gens]
        for g in gens:
            if len(g) != dim:
                raise ValueError(f"generator of length {len(g)} in a lattice of dimension {dim}")
        self.dim = dim
        self.basis: tuple[tuple[int, ...], ...] = tuple(hermite_rows(gens, dim))
        self._pivots = tuple(next(j for j, x in enumerate(b) if x) for b in self.basis)

    @classmethod
    def full(cls, dim: int) -> "Lattice":
        return cls(dim, [[int(i == j) for j in range(dim)] for i in range(dim)])

    @classmethod
    def zero(cls, dim: int) -> "Lattice":
        return cls(dim, [])

    @classmethod
    def coordinate(cls, dim: int, indices: Iterable[int]) -> "Lattice":
        """Span of the standard basis vectors with the given indices."""
        return cls(dim, [[int(i == j) for j in range(dim)] for i in sorted(set(indices))])

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.dim == other.dim and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.dim, self.basis))

    def __repr__(self) -> str:
        return f"Lattice(dim={self.dim}, basis={[list(b) for b in self.basis]})"

    def coords(self, v: Sequence[int]) -> list[int] | None:
        """Integer coordinates of ``v`` in the stored basis, or None if ``v`` is outside."""
        rest = list(v)
        out = []
        for b, piv in zip(self.basis, self._pivots):
            x = rest[piv]
            if x % b[piv]:
                return None
            c = x // b[piv]
            out.append(c)
            if c:
                for j in range(piv, self.dim):
                    if b[j]:
                        rest[j] -= c * b[j]
        if any(rest):
            return None
        return out

    def contains(self, v: Sequence[int]) -> bool:
        return self.coords(v) is not None

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def __le__(self, other: "Lattice") -> bool:
        return all(other.contains(b) for b in self.basis)

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice(self.dim, self.basis + other.basis)

    def combine(self, coeffs: Sequence[int]) -> list[int]:
        out = [0] * self.dim
        for c, b in zip(coeffs, self.basis):
            if c:
                for j, x in enumerate(b):
                    if x:
                        out[j] += c * x
        return out

    def image(self, A: IntMatrix) -> "Lattice":
        return Lattice(A.rows, [A.apply(b) for b in self.basis])

    def intersect(self, other: "Lattice") -> "Lattice":
        return preimage_in(self.basis, [], other, self.dim)

    def preimage(self, A: IntMatrix, target: "Lattice") -> "Lattice":
        """``{x in self : A x in target}``."""
        images = [A.apply(b) for b in self.basis]
        return preimage_in(self.basis, images, target, self.dim)


def preimage_in(basis: Sequence[Sequence[int]], images: Sequence[Sequence[int]],
                target: Lattice, dim: int) -> Lattice:
    """Sublattice of ``span(basis)`` whose images lie in ``target``.

    ``images[i]`` is the image of ``basis[i]`` in ``Z^target.dim``; when
    ``images`` is empty the basis vectors are their own images.
    """
    k = len(basis)
    if not images:
        images = basis
    tdim = target.dim
    # rows (image | e_i) for the span and (t | 0) for the target lattice
    rows = [list(images[i]) + [int(i == j) for j in range(k)] for i in range(k)]
    rows += [list(t) + [0] * k for t in target.basis]
    a, r = echelon(rows, tdim + k, upto=tdim, reduce_above=False)
    coeffs = [row[tdim:] for row in a[r:]]
    vecs = []
    for c in coeffs:
        v = [0] * dim
        for ci, b in zip(c, basis):
            if ci:
                for j, x in enumerate(b):
                    if x:
                        v[j] += ci * x
        vecs.append(v)
    return Lattice(dim, vecs)
