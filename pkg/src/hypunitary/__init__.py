"""Hyperbolic unitary groups over finite form rings, and finite checks of the sandwich classification."""

from .formring import (
    AdditiveSubgroup,
    FiniteRing,
    FormIdeal,
    FormRing,
    RingError,
    build_product_swap,
    build_quadratic,
    build_zmod,
    enumerate_form_ideals,
    enumerate_form_parameters,
    make_form_ring,
)
from .groups import CapExceeded, Engine, FiniteSubgroup
from .unitary import HyperbolicUnitary

__all__ = [
    "AdditiveSubgroup", "CapExceeded", "Engine", "FiniteRing", "FiniteSubgroup", "FormIdeal", "FormRing",
    "HyperbolicUnitary", "RingError", "build_product_swap", "build_quadratic", "build_zmod",
    "enumerate_form_ideals", "enumerate_form_parameters", "make_form_ring",
]

__version__ = "0.1.0"
