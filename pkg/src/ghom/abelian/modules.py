"""Presented abelian groups, morphisms between them, and subquotients of Z^n.

Every module that appears in a computation is a *subquotient* ``N/D`` of some
ambient ``Z^n`` (``D <= N`` lattices).  Maps are recorded by the ambient
images of the numerator basis, which keeps well-definedness, kernels, images
and exactness checks down to lattice arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from ghom.abelian.lattice import Lattice, preimage_in
from ghom.abelian.matrix import IntMatrix
from ghom.abelian.snf import elementary_divisors, smith_with_inverse
from ghom.errors import CompositionNotZero, IllDefinedMorphism, NotAChainMap, NotContained

Invariants = tuple[int, tuple[int, ...]]


@dataclass(frozen=True)
class Presentation:
    """``Z^generator_count / rowspace(relations)``."""

    generator_count: int
    relations: IntMatrix

    def __post_init__(self):
        if self.relations.cols != self.generator_count:
            raise ValueError("relation matrix needs one column per generator")

    @classmethod
    def free(cls, n: int) -> "Presentation":
        return cls(n, IntMatrix.zeros(0, n))

    @classmethod
    def cyclic(cls, d: int) -> "Presentation":
        return cls(1, IntMatrix([[d]]))

    def canonical_form(self) -> Invariants:
        """``(betti rank, torsion divisors d1 | d2 | ...)``."""
        divs = elementary_divisors(self.relations)
        rank = len(divs)
        return self.generator_count - rank, tuple(d for d in divs if d != 1)

    def is_zero(self) -> bool:
        return self.canonical_form() == (0, ())

    def as_subquotient(self) -> "Subquotient":
        n = self.generator_count
        return Subquotient(Lattice.full(n), Lattice(n, self.relations.entries))

    def __str__(self) -> str:
        return format_invariants(self.canonical_form())


@dataclass(frozen=True)
class ModuleMorphism:
    """Linear map of presentations; ``matrix`` is target-generators x source-generators."""

    source: Presentation
    target: Presentation
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.generator_count, self.source.generator_count):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match "
                f"{self.target.generator_count} x {self.source.generator_count}")

    def is_well_defined(self) -> bool:
        return self.as_map().is_well_defined()

    def check(self) -> None:
        if not self.is_well_defined():
            raise IllDefinedMorphism("a source relation does not map into the target relations")

    def as_map(self) -> "SubquotientMap":
        return SubquotientMap.from_matrix(self.source.as_subquotient(),
                                          self.target.as_subquotient(), self.matrix)

    def __matmul__(self, other: "ModuleMorphism") -> "ModuleMorphism":
        return ModuleMorphism(other.source, self.target, self.matrix @ other.matrix)

    def is_isomorphism(self) -> bool:
        return self.as_map().is_isomorphism()


def kernel(f: ModuleMorphism) -> tuple[Presentation, ModuleMorphism]:
    """Kernel with its inclusion into ``f.source``."""
    f.check()
    K = f.as_map().kernel()
    pres = K.presentation
    incl = IntMatrix.from_columns(K.num.basis, f.source.generator_count)
    return pres, ModuleMorphism(pres, f.source, incl)


def image(f: ModuleMorphism) -> tuple[Presentation, ModuleMorphism]:
    """Image with its inclusion into ``f.target``."""
    f.check()
    I = f.as_map().image()
    pres = I.presentation
    incl = IntMatrix.from_columns(I.num.basis, f.target.generator_count)
    return pres, ModuleMorphism(pres, f.target, incl)


def cokernel(f: ModuleMorphism) -> tuple[Presentation, ModuleMorphism]:
    """Cokernel with the projection from ``f.target``."""
    f.check()
    C = f.as_map().cokernel()
    pres = C.presentation
    n = f.target.generator_count
    proj = IntMatrix.from_columns([C.coords([int(i == j) for i in range(n)]) for j in range(n)],
                                  pres.generator_count)
    return pres, ModuleMorphism(f.target, pres, proj)


def subquotient(span_gens: Sequence[Sequence[int]], modulo_gens: Sequence[Sequence[int]],
                ambient: Presentation) -> tuple[Presentation, ModuleMorphism]:
    """``<span> / <modulo>`` inside ``ambient``, with the projection from the free
    module on ``span_gens``."""
    n = ambient.generator_count
    rel = Lattice(n, ambient.relations.entries)
    num = Lattice(n, span_gens) + rel
    den = Lattice(n, modulo_gens) + rel
    sq = Subquotient(num, den)
    pres = sq.presentation
    cols = [sq.coords(v) for v in span_gens]
    proj = IntMatrix.from_columns(cols, pres.generator_count)
    return pres, ModuleMorphism(Presentation.free(len(span_gens)), pres, proj)


class Subquotient:
    """``num / den`` for lattices ``den <= num`` in a common ambient ``Z^n``."""

    def __init__(self, num: Lattice, den: Lattice):
        if num.dim != den.dim:
            raise ValueError("numerator and denominator live in different ambients")
        if not den <= num:
            raise NotContained("denominator is not contained in numerator")
        self.num = num
        self.den = den

    @classmethod
    def zero(cls, dim: int) -> "Subquotient":
        z = Lattice.zero(dim)
        return cls(z, z)

    @property
    def ambient(self) -> int:
        return self.num.dim

    def coords(self, v: Sequence[int]) -> list[int]:
        c = self.num.coords(v)
        if c is None:
            raise NotContained("vector is not in the numerator lattice")
        return c

    def contains(self, v: Sequence[int]) -> bool:
        return self.num.contains(v)

    def is_zero_element(self, v: Sequence[int]) -> bool:
        return self.den.contains(v)

    @cached_property
    def presentation(self) -> Presentation:
        rels = [self.num.coords(b) for b in self.den.basis]
        return Presentation(self.num.rank, IntMatrix(rels, len(rels), self.num.rank))

    @cached_property
    def _smith(self):
        return smith_with_inverse(self.presentation.relations)

    def invariants(self) -> Invariants:
        return self.presentation.canonical_form()

    def is_zero(self) -> bool:
        return self.num == self.den

    def generators(self) -> list[tuple[int, list[int]]]:
        """Cyclic decomposition as ``(order, ambient vector)``; order 0 means infinite.

        Torsion summands come first in divisor order, then free summands.
        """
        U, D, V, Vinv, rank = self._smith
        k = self.num.rank
        out = []
        for j in range(k):
            d = D[j][j] if j < rank else 0
            if d == 1:
                continue
            out.append((d, self.num.combine(Vinv[j])))
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subquotient):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    __hash__ = None

    def __repr__(self) -> str:
        return f"Subquotient({format_invariants(self.invariants())} in Z^{self.ambient})"


class SubquotientMap:
    """Map ``source -> target`` given by ambient images of ``source.num.basis``."""

    def __init__(self, source: Subquotient, target: Subquotient,
                 images: Sequence[Sequence[int]], check: bool = True):
        if len(images) != source.num.rank:
            raise ValueError("need one image per numerator basis vector")
        self.source = source
        self.target = target
        self.images = [list(v) for v in images]
        if check and not self.is_well_defined():
            raise IllDefinedMorphism("map does not respect numerator/denominator lattices")

    @classmethod
    def from_matrix(cls, source: Subquotient, target: Subquotient, A: IntMatrix,
                    check: bool = True) -> "SubquotientMap":
        return cls(source, target, [A.apply(b) for b in source.num.basis], check=check)

    @classmethod
    def identity(cls, source: Subquotient, target: Subquotient | None = None,
                 check: bool = True) -> "SubquotientMap":
        return cls(source, target or source, [list(b) for b in source.num.basis], check=check)

    def apply(self, v: Sequence[int]) -> list[int]:
        c = self.source.coords(v)
        out = [0] * self.target.ambient
        for ci, img in zip(c, self.images):
            if ci:
                for j, x in enumerate(img):
                    if x:
                        out[j] += ci * x
        return out

    def is_well_defined(self) -> bool:
        if not all(self.target.num.contains(v) for v in self.images):
            return False
        return all(self.target.den.contains(self.apply(b)) for b in self.source.den.basis)

    def matrix(self) -> IntMatrix:
        cols = [self.target.coords(v) for v in self.images]
        return IntMatrix.from_columns(cols, self.target.num.rank)

    def as_morphism(self) -> ModuleMorphism:
        return ModuleMorphism(self.source.presentation, self.target.presentation, self.matrix())

    def compose(self, first: "SubquotientMap") -> "SubquotientMap":
        """``self o first``."""
        return SubquotientMap(first.source, self.target, [self.apply(v) for v in first.images],
                              check=False)

    def kernel_lattice(self) -> Lattice:
        return preimage_in(self.source.num.basis, self.images, self.target.den,
                           self.source.ambient)

    def image_lattice(self) -> Lattice:
        return Lattice(self.target.ambient, self.images) + self.target.den

    def kernel(self) -> Subquotient:
        return Subquotient(self.kernel_lattice(), self.source.den)

    def image(self) -> Subquotient:
        return Subquotient(self.image_lattice(), self.target.den)

    def cokernel(self) -> Subquotient:
        return Subquotient(self.target.num, self.image_lattice())

    def is_zero(self) -> bool:
        return all(self.target.den.contains(v) for v in self.images)

    def is_injective(self) -> bool:
        return self.kernel_lattice() == self.source.den

    def is_surjective(self) -> bool:
        return self.image_lattice() == self.target.num

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def equals(self, other: "SubquotientMap") -> bool:
        """Equality as maps of subquotients (images agree modulo the target denominator)."""
        return all(self.target.den.contains([a - b for a, b in zip(x, y)])
                   for x, y in zip(self.images, other.images))


def exact_at(incoming: SubquotientMap, outgoing: SubquotientMap) -> bool:
    """``im(incoming) == ker(outgoing)`` as subgroups of the middle module."""
    return incoming.image_lattice() == outgoing.kernel_lattice()


# -- chain complexes ----------------------------------------------------------

def _as_matrix(f) -> IntMatrix:
    return f.matrix if isinstance(f, ModuleMorphism) else f


def homology_subquotient(d_in, d_out) -> Subquotient:
    """``ker(d_out) / im(d_in)`` in the ambient shared by both maps."""
    A_in, A_out = _as_matrix(d_in), _as_matrix(d_out)
    if A_in.rows != A_out.cols:
        raise ValueError("incoming and outgoing differentials disagree on the middle rank")
    if not (A_out @ A_in).is_zero():
        raise CompositionNotZero("d_out o d_in is not zero")
    n = A_in.rows
    Z = Lattice.full(n).preimage(A_out, Lattice.zero(A_out.rows))
    B = Lattice(n, A_in.columns())
    return Subquotient(Z, B)


def homology_at(d_in, d_out) -> Invariants:
    """Isomorphism type of ``ker(d_out)/im(d_in)`` as ``(betti, torsion)``."""
    return homology_subquotient(d_in, d_out).invariants()


class ChainComplex:
    """Free chain complex ``C_0 <- C_1 <- ... <- C_top``.

    ``boundaries[n]`` maps ``C_n -> C_{n-1}`` and is stored for ``1 <= n <= top``.
    """

    def __init__(self, ranks: Sequence[int], boundaries: Mapping[int, IntMatrix],
                 check: bool = True):
        self.ranks = list(ranks)
        self.boundaries = dict(boundaries)
        for n in range(1, len(self.ranks)):
            d = self.boundaries.get(n)
            if d is None:
                self.boundaries[n] = IntMatrix.zeros(self.ranks[n - 1], self.ranks[n])
            elif d.shape != (self.ranks[n - 1], self.ranks[n]):
                raise ValueError(f"boundary {n} has shape {d.shape}, expected "
                                 f"{(self.ranks[n - 1], self.ranks[n])}")
        if check:
            for n in range(2, len(self.ranks)):
                if not (self.boundaries[n - 1] @ self.boundaries[n]).is_zero():
                    raise CompositionNotZero(f"d_{n - 1} o d_{n} is not zero")

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def rank(self, n: int) -> int:
        return self.ranks[n] if 0 <= n < len(self.ranks) else 0

    def d(self, n: int) -> IntMatrix:
        """``d_n : C_n -> C_{n-1}``."""
        if 1 <= n <= self.top:
            return self.boundaries[n]
        return IntMatrix.zeros(self.rank(n - 1), self.rank(n))

    def homology(self, n: int) -> Subquotient:
        return homology_subquotient(self.d(n + 1), self.d(n))

    def graded_homology(self) -> "GradedGroup":
        return GradedGroup({n: self.homology(n).invariants() for n in range(len(self.ranks))})


def induced_on_homology(chain_map: Mapping[int, IntMatrix], source: ChainComplex,
                        target: ChainComplex) -> dict[int, SubquotientMap]:
    """Per-degree maps on homology induced by a chain map."""
    mats = {}
    for n in range(len(source.ranks)):
        f_n = chain_map.get(n, IntMatrix.zeros(target.rank(n), source.rank(n)))
        if f_n.shape != (target.rank(n), source.rank(n)):
            raise NotAChainMap(f"degree {n} matrix has shape {f_n.shape}")
        mats[n] = f_n
    for n in range(1, len(source.ranks)):
        if (target.d(n) @ mats[n]) != (mats[n - 1] @ source.d(n)):
            raise NotAChainMap(f"chain map does not commute with the differential in degree {n}")
    return {n: SubquotientMap.from_matrix(source.homology(n), target.homology(n), f_n)
            for n, f_n in mats.items()}


# -- graded output -------------------------------------------------------------

def format_invariants(inv: Invariants) -> str:
    betti, torsion = inv
    parts = []
    if betti == 1:
        parts.append("Z")
    elif betti > 1:
        parts.append(f"Z^{betti}")
    parts.extend(f"Z/{d}" for d in torsion)
    return " (+) ".join(parts) if parts else "0"


class GradedGroup:
    """Degree -> (betti, torsion); unlisted degrees are zero."""

    def __init__(self, groups: Mapping[int, Invariants] | Iterable[tuple[int, Invariants]] = ()):
        items = groups.items() if isinstance(groups, Mapping) else groups
        self.groups: dict[int, Invariants] = {}
        for n, (b, t) in items:
            t = tuple(int(d) for d in t)
            if any(d <= 1 for d in t) or any(t[i + 1] % t[i] for i in range(len(t) - 1)):
                raise ValueError(f"torsion {t} in degree {n} is not a divisor chain of entries > 1")
            self.groups[int(n)] = (int(b), t)

    def __getitem__(self, n: int) -> Invariants:
        return self.groups.get(n, (0, ()))

    def degrees(self) -> list[int]:
        return sorted(self.groups)

    def nonzero_degrees(self) -> list[int]:
        return [n for n in self.degrees() if self.groups[n] != (0, ())]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedGroup):
            return NotImplemented
        keys = set(self.groups) | set(other.groups)
        return all(self[n] == other[n] for n in keys)

    def __repr__(self) -> str:
        body = ", ".join(f"{n}: {format_invariants(self[n])}" for n in self.degrees())
        return f"GradedGroup({{{body}}})"

    def direct_sum(self, other: "GradedGroup") -> "GradedGroup":
        out = {}
        for n in set(self.groups) | set(other.groups):
            b1, t1 = self[n]
            b2, t2 = other[n]
            out[n] = (b1 + b2, combine_torsion(t1 + t2))
        return GradedGroup(out)

    def format(self, n: int) -> str:
        return format_invariants(self[n])

    def to_json(self) -> dict:
        return {str(n): {"betti": self[n][0], "torsion": list(self[n][1])}
                for n in self.degrees()}

    @classmethod
    def from_json(cls, data: Mapping) -> "GradedGroup":
        return cls({int(k): (v["betti"], tuple(v["torsion"])) for k, v in data.items()})


def combine_torsion(divisors: Sequence[int]) -> tuple[int, ...]:
    """Invariant-factor form of a direct sum of cyclic groups ``Z/d``."""
    divs = [d for d in divisors if d > 1]
    if not divs:
        return ()
    M = IntMatrix([[d if i == j else 0 for j in range(len(divs))] for i, d in enumerate(divs)])
    return tuple(d for d in elementary_divisors(M) if d != 1)
