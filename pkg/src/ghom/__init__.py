"""Bredon homology of finite simplicial G-complexes and the skeletal spectral sequence."""

from ghom.groups import (
    FiniteGroup,
    FiniteGSet,
    OrbitMorphism,
    Subgroup,
    compose,
    conjugate_subgroup,
    enumerate_morphisms,
    group_from_permutations,
    group_from_table,
    make_kappa,
    make_mu,
    orbits_and_stabilizers,
)

__version__ = "0.1.0"

__all__ = [
    "FiniteGroup",
    "FiniteGSet",
    "OrbitMorphism",
    "Subgroup",
    "compose",
    "conjugate_subgroup",
    "enumerate_morphisms",
    "group_from_permutations",
    "group_from_table",
    "make_kappa",
    "make_mu",
    "orbits_and_stabilizers",
]
