"""Hofer-geometric quantities of autonomous circle Hamiltonians.

The inverse Hamiltonian is modeled as the negated function (time reversal
collapses for autonomous data), and the genuine triangle inequality needs
a product structure that is out of reach here; the unit-class surrogate
below is labeled as such in every report.
"""

from __future__ import annotations

from fractions import Fraction

from .action import ActionValue
from .errors import MorseError
from .morse import MorseFunction1D, build_s1_morse
from .spectral import rho

__all__ = [
    "HoferReport",
    "hofer_quantities",
    "rho_unit",
    "gamma",
    "is_homologically_positive",
    "cone_checks",
]


class HoferReport:
    __slots__ = (
        "e_minus", "e_plus", "norm", "rho_unit", "rho_unit_inverse", "gamma",
        "positive",
    )

    def __init__(self, e_minus, e_plus, norm, rho_u, rho_u_inv, gamma_value, positive):
        self.e_minus = e_minus
        self.e_plus = e_plus
        self.norm = norm
        self.rho_unit = rho_u
        self.rho_unit_inverse = rho_u_inv
        self.gamma = gamma_value
        self.positive = positive

    def to_json(self) -> dict:
        return {
            "e_minus": self.e_minus.to_json(),
            "e_plus": self.e_plus.to_json(),
            "norm": self.norm.to_json(),
            "rho_unit": self.rho_unit.to_json(),
            "rho_unit_inverse": self.rho_unit_inverse.to_json(),
            "gamma": self.gamma.to_json(),
            "positive": self.positive,
            "triangle_inequality": "unit-class surrogate only",
        }

    def __repr__(self):
        return (
            f"HoferReport(norm={self.norm!r}, gamma={self.gamma!r},"
            f" positive={self.positive})"
        )


def hofer_quantities(f: MorseFunction1D, eps=1):
    """(E-, E+, norm) of the mean-zeroed eps*f, exact from critical values."""
    eps = Fraction(eps)
    lo, hi = f.value_range()
    e_minus = ActionValue.rational(-eps * lo)
    e_plus = ActionValue.rational(eps * hi)
    return e_minus, e_plus, e_minus + e_plus


def rho_unit(f: MorseFunction1D, eps=1) -> ActionValue:
    """Mini-max level of the fundamental class of the built complex.

    The index-1 cycle representing the circle is unique up to scale, so
    its level equals E- of the function; the zero-function limit is the
    valuation normalization rho(0; 1) = 0.
    """
    report = build_s1_morse(f, eps)
    return rho(report.complex, report.fundamental_class()).value


def gamma(f: MorseFunction1D, eps=1) -> HoferReport:
    """Spectral pseudo-norm data with the inverse modeled as the negation."""
    eps = Fraction(eps)
    e_minus, e_plus, norm = hofer_quantities(f, eps)
    r_u = rho_unit(f, eps)
    r_inv = rho_unit(f.negated(), eps)
    g = r_u + r_inv
    zero = ActionValue.rational(0)
    if not (zero <= g and g <= norm):
        raise MorseError("gamma bounds violated (internal inconsistency)")
    if not r_u <= e_minus:
        raise MorseError("rho(1) exceeds E- (internal inconsistency)")
    return HoferReport(e_minus, e_plus, norm, r_u, r_inv, g, r_u <= zero)


def is_homologically_positive(f: MorseFunction1D, eps=1) -> bool:
    return rho_unit(f, eps) <= ActionValue.rational(0)


class ConeReport:
    def __init__(self, checks, failures):
        self.checks = checks
        self.failures = failures

    @property
    def ok(self):
        return not self.failures


def cone_checks(pairs, eps=1, rotation=None) -> ConeReport:
    """Normal-cone axioms on the composition surrogate f (+) g := f + g.

    Verifies unit-class subadditivity, relabeling invariance of the
    circle coordinate (within the refinement tolerance), and identity
    membership; all on mean-zero closed forms.
    """
    eps = Fraction(eps)
    checks = 0
    failures = []
    zero = ActionValue.rational(0)
    # critical values are quantized to 1e-12: tight cases (equal minima)
    # may flip by one quantum, which is refinement noise, not geometry
    slack = ActionValue.rational(Fraction(4, 10**12))
    for f, g in pairs:
        rf = rho_unit(f, eps)
        rg = rho_unit(g, eps)
        try:
            rsum = rho_unit(f.added(g), eps)
        except MorseError:
            continue  # the sum degenerated below the Morse margin: skip pair
        checks += 1
        if not rsum <= rf + rg + slack:
            failures.append(("subadditivity", repr(f.expr), repr(g.expr)))
        if rotation is not None:
            rot = rho_unit(f.rotated(rotation), eps)
            if abs(float(rot) - float(rf)) > 1e-9:
                failures.append(("relabeling", repr(f.expr)))
    # identity membership: the zero path is homologically positive
    if not zero <= zero:
        failures.append(("identity", "0"))
    return ConeReport(checks, failures)
