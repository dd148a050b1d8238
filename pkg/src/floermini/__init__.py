"""Exact spectral invariants of filtered Novikov complexes, desk scale."""

__version__ = "0.1.0"

from .action import (
    ActionValue,
    NovikovScalar,
    PeriodGroup,
    NEG_INFINITY,
    POS_INFINITY,
    make_period_group,
)
from .complexes import FilteredComplex, NovikovChain, Orbit
from .spectral import bounded_boundary_solve, check_spectrality, rho
from .morse import MorseFunction1D, build_circle_valued, build_s1_morse
from .cerf import AbstractCerfFamily, MorseCerfFamily, bifurcation_diagram
from .continuation import continuation_map, variation_bounds
from .hofer import gamma as hofer_gamma

__all__ = [
    "ActionValue",
    "NovikovScalar",
    "PeriodGroup",
    "NEG_INFINITY",
    "POS_INFINITY",
    "make_period_group",
    "FilteredComplex",
    "NovikovChain",
    "Orbit",
    "rho",
    "check_spectrality",
    "bounded_boundary_solve",
    "MorseFunction1D",
    "build_s1_morse",
    "build_circle_valued",
    "MorseCerfFamily",
    "AbstractCerfFamily",
    "bifurcation_diagram",
    "continuation_map",
    "variation_bounds",
    "hofer_gamma",
    "__version__",
]
