from fractions import Fraction

import pytest

from floermini.action import ActionValue, NEG_INFINITY, NovikovScalar, make_period_group
from floermini.complexes import FilteredComplex, NovikovChain, Orbit
from floermini.errors import NotABoundaryError, ZeroClassError
from floermini.spectral import (
    boundary_overhead_constant,
    bounded_boundary_solve,
    check_spectrality,
    peak_avoidance_check,
    rho,
)

import _oracles


def sqrt2(scale=1):
    return ActionValue.sqrt(2, scale)


class TestRho:
    def test_single_orbit(self, trivial_group):
        G = trivial_group
        X = FilteredComplex(G, [Orbit("x", 2, 0)], {})
        res = rho(X, X.homology_basis()[0])
        assert res.value == ActionValue(2)
        assert res.tight_cycle == NovikovChain.unit(G, "x")
        assert res.witness == ("x", ())

    def test_c3_class_x(self, c3, trivial_group):
        res = rho(c3, NovikovChain.unit(trivial_group, "x"))
        assert res.value == ActionValue(3)
        assert res.tight_cycle == NovikovChain.unit(trivial_group, "x")

    def test_c3_class_y_reduces_to_x(self, c3, trivial_group):
        # y = x + dw, so the class of y tightens to level 3
        res = rho(c3, NovikovChain.unit(trivial_group, "y"))
        assert res.value == ActionValue(3)

    def test_irrational_instance(self, c_gamma):
        X, G = c_gamma
        res = rho(X, NovikovChain.unit(G, "x1"))
        assert res.value == ActionValue(Fraction(3, 10)) - sqrt2()
        assert res.tight_cycle == NovikovChain.unit(G, "x2", (1,))
        assert res.witness == ("x2", (1,))

    def test_zero_class_errors(self, c3, trivial_group):
        with pytest.raises(ZeroClassError):
            rho(c3, NovikovChain(trivial_group))
        with pytest.raises(ZeroClassError):
            rho(c3, c3.boundary_of(NovikovChain.unit(trivial_group, "w")))

    def test_projective_invariance(self, c_gamma):
        X, G = c_gamma
        base = NovikovChain.unit(G, "x1")
        r0 = rho(X, base)
        for lam in (2, Fraction(-7, 3), Fraction(1, 10)):
            assert rho(X, base.scaled(lam)).value == r0.value

    def test_matches_bruteforce_oracle(self, c_gamma, c3, trivial_group):
        X, G = c_gamma
        got = rho(X, NovikovChain.unit(G, "x1")).value
        want = _oracles.brute_force_rho(X, NovikovChain.unit(G, "x1"))
        assert got == want
        got = rho(c3, NovikovChain.unit(trivial_group, "x")).value
        assert got == _oracles.brute_force_rho(c3, NovikovChain.unit(trivial_group, "x"))


class TestSpectrality:
    def test_c3(self, c3, trivial_group):
        cert = check_spectrality(c3, NovikovChain.unit(trivial_group, "x"))
        assert cert.ok
        assert cert.value == ActionValue(3)

    def test_irrational(self, c_gamma):
        X, G = c_gamma
        cert = check_spectrality(X, NovikovChain.unit(G, "x1"))
        assert cert.ok
        assert cert.spectrum_witness == ("x2", (1,))

    def test_zero_boundary(self, trivial_group):
        G = trivial_group
        X = FilteredComplex(G, [Orbit("p", Fraction(7, 2), 0)], {})
        cert = check_spectrality(X, NovikovChain.unit(G, "p"))
        assert cert.ok and cert.value == ActionValue(Fraction(7, 2))


class TestBoundedSolve:
    def test_zero_chain(self, c3, trivial_group):
        beta, c = bounded_boundary_solve(c3, NovikovChain(trivial_group))
        assert beta.is_zero()
        assert c == NEG_INFINITY

    def test_c3_unique_preimage(self, c3, trivial_group):
        gamma = NovikovChain.unit(trivial_group, "y") - NovikovChain.unit(
            trivial_group, "x"
        )
        beta, c = bounded_boundary_solve(c3, gamma)
        assert beta == NovikovChain.unit(trivial_group, "w")
        assert c == ActionValue(1)

    def test_two_rung_preimages(self, trivial_group):
        # two preimages at levels 6 and 8 for one boundary at level 5
        G = trivial_group
        orbits = [
            Orbit("a", 5, 0),
            Orbit("b", Fraction(9, 2), 0),
            Orbit("u", 6, 1),
            Orbit("v", 8, 1),
        ]
        boundary = {
            "u": {"a": NovikovScalar.one(G)},
            "v": {"a": NovikovScalar.one(G), "b": NovikovScalar.one(G)},
        }
        X = FilteredComplex(G, orbits, boundary)
        gamma = NovikovChain.unit(G, "a")
        beta, c = bounded_boundary_solve(X, gamma)
        assert X.level(beta) == ActionValue(6)
        assert c == ActionValue(1)
        # brute check: the affine space is u + t(v - u); level 6 is minimal
        assert _oracles.brute_force_min_preimage_level(X, gamma) == ActionValue(6)

    def test_not_a_boundary(self, c3, trivial_group):
        with pytest.raises(NotABoundaryError):
            bounded_boundary_solve(c3, NovikovChain.unit(trivial_group, "x"))

    def test_overhead_constant_bounds_solves(self, c3, trivial_group):
        const = boundary_overhead_constant(c3)
        gamma = NovikovChain.unit(trivial_group, "y") - NovikovChain.unit(
            trivial_group, "x"
        )
        beta, c = bounded_boundary_solve(c3, gamma)
        assert c <= const
        # re-solve is idempotent
        beta2, c2 = bounded_boundary_solve(c3, gamma)
        assert beta2 == beta and c2 == c


class TestPeakAvoidance:
    def test_no_marked_orbits_vacuous(self, c3, trivial_group):
        ok, cycle = peak_avoidance_check(c3, NovikovChain.unit(trivial_group, "x"), [])
        assert ok

    def test_peak_elsewhere_unchanged(self, trivial_group):
        # dz+ = z- + b; the tight class peaks at unrelated orbit p
        G = trivial_group
        orbits = [
            Orbit("p", 4, 0),
            Orbit("b", 0, 0),
            Orbit("zminus", 1, 0),
            Orbit("zplus", 2, 1),
        ]
        boundary = {
            "zplus": {"zminus": NovikovScalar.one(G), "b": NovikovScalar.one(G)}
        }
        X = FilteredComplex(G, orbits, boundary)
        cls = NovikovChain.unit(G, "p")
        ok, cycle = peak_avoidance_check(X, cls, ["zplus", "zminus"])
        assert ok
        assert cycle == rho(X, cls).tight_cycle

    def test_cancel_z_minus_peak(self, trivial_group):
        # engineered so the minimal cycle peaks at z-: adding the normal-form
        # boundary moves the peak off the pair at equal level
        G = trivial_group
        orbits = [
            Orbit("zminus", 1, 0),
            Orbit("p", 1, 0),
            Orbit("q", Fraction(1, 2), 0),
            Orbit("zplus", 2, 1),
        ]
        boundary = {
            "zplus": {
                "zminus": NovikovScalar.one(G),
                "q": NovikovScalar.one(G),
            }
        }
        X = FilteredComplex(G, orbits, boundary)
        cls = NovikovChain.unit(G, "zminus") + NovikovChain.unit(G, "p")
        ok, cycle = peak_avoidance_check(X, cls, ["zplus", "zminus"])
        assert ok
        assert X.level(cycle) == ActionValue(1)
        peaks = dict(X.peaks(cycle))
        assert "zminus" not in peaks and "zplus" not in peaks
        assert "p" in peaks
