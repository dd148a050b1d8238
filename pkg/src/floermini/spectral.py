"""Mini-max spectral values of filtered complexes.

rho(X, cls) is the infimum of the level over cycles representing cls.
With a finite orbit basis the infimum is attained; the engine realizes
it constructively by reducing any representative against a
level-orthogonal basis of the boundary subspace.  The residual is a
tight cycle: no boundary correction can push its level lower, even when
the period group is dense.
"""

from __future__ import annotations

from fractions import Fraction

from .action import NEG_INFINITY, NovikovScalar
from .complexes import FilteredComplex, HomologyClass, NovikovChain
from .errors import (
    ComplexStructureError,
    DegreeError,
    NotABoundaryError,
    NotACycleError,
    ZeroClassError,
)
from .reduction import (
    combination,
    orthogonalize,
    reduce_vector,
    vec_add,
    vec_level,
    vec_scale,
)

__all__ = [
    "SpectralResult",
    "SpectralityCertificate",
    "rho",
    "check_spectrality",
    "bounded_boundary_solve",
    "boundary_overhead_constant",
    "peak_avoidance_check",
]


class SpectralResult:
    __slots__ = ("value", "tight_cycle", "witness", "class_id")

    def __init__(self, value, tight_cycle, witness, class_id=None):
        self.value = value
        self.tight_cycle = tight_cycle
        self.witness = witness  # (orbit id, cap)
        self.class_id = class_id

    def __repr__(self):
        return f"SpectralResult(value={self.value!r}, witness={self.witness})"

    def to_json(self) -> dict:
        return {
            "class": self.class_id,
            "rho": self.value.to_json(),
            "witness": {"orbit": self.witness[0], "cap": list(self.witness[1])},
            "tight_cycle": self.tight_cycle.to_json(),
        }


class SpectralityCertificate:
    __slots__ = ("value", "in_spectrum", "spectrum_witness", "peak_attains")

    def __init__(self, value, in_spectrum, spectrum_witness, peak_attains):
        self.value = value
        self.in_spectrum = in_spectrum
        self.spectrum_witness = spectrum_witness
        self.peak_attains = peak_attains

    @property
    def ok(self) -> bool:
        return self.in_spectrum and self.peak_attains


def _resolve_class(X: FilteredComplex, cls) -> tuple:
    if isinstance(cls, HomologyClass):
        return cls.representative, cls.id
    if isinstance(cls, str):
        c = X.homology_class(cls)
        return c.representative, c.id
    if isinstance(cls, NovikovChain):
        if not X.is_cycle(cls):
            raise NotACycleError("class representative must be a cycle")
        return cls, None
    raise ComplexStructureError(f"cannot interpret class {cls!r}")


def rho(X: FilteredComplex, cls) -> SpectralResult:
    """Mini-max level over representing cycles, with the tight cycle attained."""
    rep, class_id = _resolve_class(X, cls)
    if rep.is_zero():
        raise ZeroClassError("rho is undefined for the zero class")
    deg = X.degree_of(rep)
    if deg == "mixed":
        raise DegreeError("spectral values are per-degree; filter the class first")
    boundaries = X.boundary_basis(deg)
    residual, _ = reduce_vector(rep.coeffs, boundaries, X.weight)
    if not residual:
        raise ZeroClassError("the class vanishes in homology")
    tight = NovikovChain(X.group, residual)
    value = X.level(tight)
    peaks = X.peaks(tight)
    return SpectralResult(value, tight, peaks[0], class_id)


def check_spectrality(X: FilteredComplex, cls) -> SpectralityCertificate:
    """Exact membership of rho in the action spectrum plus a peak witness."""
    res = rho(X, cls)
    spec = X.spectrum()
    witness = spec.witness(res.value)
    orbit, cap = res.witness
    attains = X.weight(orbit) - X.group.omega(cap) == res.value
    return SpectralityCertificate(res.value, witness is not None, witness, attains)


def _kernel_basis(X: FilteredComplex, degree: int):
    cycles = X.cycle_basis(degree)
    reduced, _ = orthogonalize([(c.coeffs, dict(c.coeffs)) for c in cycles], X.weight)
    return reduced


def bounded_boundary_solve(X: FilteredComplex, gamma: NovikovChain):
    """Level-minimal beta with boundary(beta) == gamma, plus the overhead.

    The overhead is level(beta) - level(gamma); for the zero chain the
    solve costs nothing and the overhead reports -inf.
    """
    if gamma.is_zero():
        return NovikovChain(X.group), NEG_INFINITY
    deg = X.degree_of(gamma)
    if deg == "mixed":
        raise DegreeError("solve expects a pure-degree chain")
    boundaries = X.boundary_basis(deg)
    residual, coeffs = reduce_vector(gamma.coeffs, boundaries, X.weight)
    if residual:
        raise NotABoundaryError("chain is not a boundary")
    beta_vec = combination(coeffs, boundaries)
    kernel = _kernel_basis(X, deg + 1)
    beta_vec, _ = reduce_vector(beta_vec, kernel, X.weight)
    beta = NovikovChain(X.group, beta_vec)
    overhead = X.level(beta) - X.level(gamma)
    return beta, overhead


def boundary_overhead_constant(X: FilteredComplex):
    """Upper bound for the solve overhead, uniform over the complex.

    For each orthogonal boundary basis vector the minimal preimage level
    is compared against the image level; the worst ratio bounds every
    solve by level-orthogonality of the basis.
    """
    worst = NEG_INFINITY
    for deg in X.degrees():
        boundaries = X.boundary_basis(deg)
        if not boundaries:
            continue
        kernel = _kernel_basis(X, deg + 1)
        for r in boundaries:
            pre, _ = reduce_vector(r.companion, kernel, X.weight)
            gap = vec_level(pre, X.weight) - vec_level(r.vec, X.weight)
            if gap > worst:
                worst = gap
    return worst


def _level_slice_cap(X: FilteredComplex, orbit_id: str, value):
    """Cap lifting `orbit_id` exactly to level `value`, or None."""
    need = X.weight(orbit_id) - value
    return X.group.cap_with_omega(need)


def _slice_coordinates(X: FilteredComplex, degree: int, value):
    coords = []
    for oid in X.orbit_ids(degree):
        cap = _level_slice_cap(X, oid, value)
        if cap is not None:
            coords.append((oid, cap))
    return coords


def _slice_vector(X, vec: dict, coords, value) -> dict:
    """Rational coordinates of the level-`value` part of a chain."""
    out = {}
    for oid, cap in coords:
        s = vec.get(oid)
        if s is None:
            continue
        terms = s.terms_below(X.group.omega(cap))
        c = terms.get(cap)
        if c:
            out[(oid, cap)] = c
    return out


def peak_avoidance_check(X: FilteredComplex, cls, marked_orbits):
    """Seek a tight cycle whose peaks avoid the marked bifurcation pair.

    Returns (True, cycle) with an adjusted tight cycle when the peaks can
    be moved off both marked orbits by equal-level boundary corrections;
    (False, tight cycle) when the top slice pins a marked orbit.
    """
    marked = [str(m) for m in marked_orbits]
    for m in marked:
        X.orbit(m)
    res = rho(X, cls)
    if not marked:
        return True, res.tight_cycle
    deg = X.degree_of(res.tight_cycle)
    value = res.value
    coords = _slice_coordinates(X, deg, value)
    marked_coords = [(oid, cap) for (oid, cap) in coords if oid in marked]
    r_slice = _slice_vector(X, res.tight_cycle.coeffs, coords, value)
    if all(r_slice.get(mc, Fraction(0)) == 0 for mc in marked_coords):
        return True, res.tight_cycle

    # available equal-level corrections: each orthogonal boundary vector,
    # shifted by the unique monomial that raises it exactly to the top level
    boundaries = X.boundary_basis(deg)
    adjusters = []
    for r in boundaries:
        lvl = vec_level(r.vec, X.weight)
        cap = X.group.cap_with_omega(lvl - value)
        if cap is None:
            continue
        mono = NovikovScalar.monomial(X.group, cap)
        shifted = vec_scale(r.vec, mono)
        adjusters.append((shifted, _slice_vector(X, shifted, coords, value)))

    # rational elimination on the marked slice coordinates
    target = {mc: r_slice.get(mc, Fraction(0)) for mc in marked_coords}
    rows = marked_coords
    cols = []
    for shifted, sl in adjusters:
        cols.append(([sl.get(mc, Fraction(0)) for mc in rows], shifted))
    sol = _solve_rational([c[0] for c in cols], [target[mc] for mc in rows])
    if sol is None:
        return False, res.tight_cycle
    adjusted_vec = dict(res.tight_cycle.coeffs)
    for a, (shifted, _) in zip(sol, adjusters):
        if a:
            adjusted_vec = vec_add(
                adjusted_vec, {k: s.scale(-a) for k, s in shifted.items()}
            )
    adjusted = NovikovChain(X.group, adjusted_vec)
    assert X.level(adjusted) == value
    assert all(oid not in marked for oid, _ in X.peaks(adjusted))
    return True, adjusted


def _solve_rational(columns: list, target: list):
    """Solve sum a_j col_j = target over Q; None when inconsistent."""
    m = len(target)
    n = len(columns)
    aug = [[columns[j][i] for j in range(n)] + [target[i]] for i in range(m)]
    pivots = []
    row = 0
    for col in range(n):
        sel = None
        for r in range(row, m):
            if aug[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        aug[row], aug[sel] = aug[sel], aug[row]
        pv = aug[row][col]
        aug[row] = [x / pv for x in aug[row]]
        for r in range(m):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if aug[r][n] != 0:
            return None
    sol = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        sol[col] = aug[r][n]
    return sol
