"""Exact arithmetic of finitely generated abelian groups."""

from ghom.abelian.fields import field_homology, is_prime, rank_mod_p
from ghom.abelian.lattice import Lattice
from ghom.abelian.matrix import IntMatrix
from ghom.abelian.modules import (
    ChainComplex,
    GradedGroup,
    ModuleMorphism,
    Presentation,
    Subquotient,
    SubquotientMap,
    cokernel,
    exact_at,
    format_invariants,
    homology_at,
    homology_subquotient,
    image,
    induced_on_homology,
    kernel,
    subquotient,
)
from ghom.abelian.snf import elementary_divisors, hermite_rows, kernel_basis, smith_normal_form

__all__ = [
    "ChainComplex", "GradedGroup", "IntMatrix", "Lattice", "ModuleMorphism", "Presentation",
    "Subquotient", "SubquotientMap", "cokernel", "elementary_divisors", "exact_at",
    "field_homology", "format_invariants", "hermite_rows", "homology_at",
    "homology_subquotient", "image", "induced_on_homology", "is_prime", "kernel",
    "kernel_basis", "rank_mod_p", "smith_normal_form", "subquotient",
]
