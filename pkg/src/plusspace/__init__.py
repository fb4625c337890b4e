"""Kohnen plus space Eisenstein series over Q and real quadratic fields."""

from .base_field import (BaseField, FieldElement, element_invariants,
                         enumerate_totally_positive, make_field)
from .class_group import (ClassCharacter, ClassGroup, character_value, class_of,
                          compute_class_group)
from .cyclotomic import CycRat
from .ideal_arith import (FactoredIdeal, Ideal, PrimeIdeal, divisors, enumerate_ideals,
                          factor_principal, factor_rational_prime, moebius)
from .quad_invariants import (LocalInvariant, LocalPlaceData, chi_xi_on_ideal,
                              is_square_mod4, local_invariants, places_over,
                              relative_discriminant)

__version__ = "0.1.0"

__all__ = [
    "BaseField", "FieldElement", "element_invariants", "enumerate_totally_positive", "make_field",
    "ClassCharacter", "ClassGroup", "character_value", "class_of", "compute_class_group",
    "CycRat",
    "FactoredIdeal", "Ideal", "PrimeIdeal", "divisors", "enumerate_ideals", "factor_principal",
    "factor_rational_prime", "moebius",
    "LocalInvariant", "LocalPlaceData", "chi_xi_on_ideal", "is_square_mod4", "local_invariants",
    "places_over", "relative_discriminant",
]
