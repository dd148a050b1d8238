"""One-dimensional Morse models on the circle.

Functions live on S^1 parameterized by theta in [0, 2pi).  A circle-valued
function carries a drift c: f(theta + 2pi) = f(theta) - c, modeling the
integer cover of the circle.  Critical points are detected as sign changes
of the sampled derivative with a nondegeneracy margin, refined by bisection,
and their values quantized to exact rationals; everything downstream of the
built complex is exact arithmetic.

Action convention: a critical point p becomes a generator at level
-eps * f(p), so maxima of f are the low generators and slope statements
flip sign accordingly.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import sympy as sp

from . import _kernels
from .action import ActionValue, NovikovScalar, PeriodGroup, make_period_group
from .complexes import FilteredComplex, NovikovChain, Orbit
from .errors import ComplexStructureError, MorseError, PairingError
from .spectral import rho as engine_rho

__all__ = [
    "MorseFunction1D",
    "CriticalPoint",
    "MorseComplexReport",
    "DecoratedClass",
    "SmallMorseResult",
    "Pairing",
    "build_s1_morse",
    "build_circle_valued",
    "canonical_pairing",
    "rho_small_morse",
]

TWO_PI = 2.0 * math.pi
DEFAULT_GRID = 1 << 14
THETA_TOLERANCE = 1e-9
VALUE_QUANTUM = 10**12

_THETA = sp.Symbol("theta")
_ALLOWED_FUNCS = (sp.sin, sp.cos)


def validate_expression(expr: sp.Expr, symbols=(_THETA,)):
    """Restrict to sums/products of sin, cos, polynomials, rational constants."""
    for node in sp.preorder_traversal(expr):
        if isinstance(node, (sp.Add, sp.Mul)):
            continue
        if isinstance(node, sp.Pow):
            if not (node.exp.is_Integer and node.exp >= 0):
                raise MorseError(f"unsupported power {node}")
            continue
        if isinstance(node, (sp.Integer, sp.Rational, sp.Float)):
            continue
        if node is sp.pi:
            continue
        if isinstance(node, sp.Symbol):
            if node not in symbols:
                raise MorseError(f"unknown symbol {node}")
            continue
        if isinstance(node, _ALLOWED_FUNCS):
            continue
        raise MorseError(f"unsupported expression node {node!r}")


def parse_expression(text: str, symbols=(_THETA,)) -> sp.Expr:
    local = {str(s): s for s in symbols}
    local.update({"sin": sp.sin, "cos": sp.cos, "pi": sp.pi})
    try:
        expr = sp.sympify(text, locals=local, rational=True)
    except (sp.SympifyError, SyntaxError, TypeError) as e:
        raise MorseError(f"cannot parse expression {text!r}: {e}") from None
    validate_expression(expr, symbols)
    return expr


def _quantize(v: float) -> Fraction:
    return Fraction(round(v * VALUE_QUANTUM), VALUE_QUANTUM)


class CriticalPoint:
    """Refined critical point; value is mean-zeroed and quantized."""

    __slots__ = ("theta", "value", "index", "raw_value")

    def __init__(self, theta: float, value: Fraction, index: int, raw_value: float):
        self.theta = theta
        self.value = value
        self.index = index  # Morse index of -f restricted to the circle: 0 or 1
        self.raw_value = raw_value

    def __repr__(self):
        return f"CriticalPoint(theta={self.theta:.6f}, value={self.value}, index={self.index})"


class MorseFunction1D:
    """Closed-form or sampled function on the circle, with optional drift."""

    def __init__(self, f, fp, N=DEFAULT_GRID, drift=Fraction(0), expr=None, samples=None):
        self._f = f
        self._fp = fp
        self.N = int(N)
        self.drift = Fraction(drift)
        self.expr = expr
        self.samples = samples
        self._crit = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def closed_form(cls, expr, N=DEFAULT_GRID, drift=0):
        if isinstance(expr, str):
            expr = parse_expression(expr)
        else:
            validate_expression(expr)
        drift = Fraction(drift)
        f_p = sp.lambdify(_THETA, expr, "numpy")
        fp_p = sp.lambdify(_THETA, sp.diff(expr, _THETA), "numpy")
        slope = float(drift) / TWO_PI

        def f(t):
            t = np.asarray(t, dtype=float)
            return np.zeros_like(t) + f_p(t) - slope * t  # broadcast constants

        def fp(t):
            t = np.asarray(t, dtype=float)
            return np.zeros_like(t) + fp_p(t) - slope

        return cls(f, fp, N=N, drift=drift, expr=expr)

    @classmethod
    def from_samples(cls, values, drift=0):
        values = np.asarray(values, dtype=float)
        N = values.shape[0]
        if N < 8:
            raise MorseError("need at least 8 samples")
        drift = Fraction(drift)
        h = TWO_PI / N
        slope = float(drift) / TWO_PI
        deriv = (np.roll(values, -1) - np.roll(values, 1)) / (2 * h)

        def f(t):
            t = np.asarray(t, dtype=float)
            x = np.mod(t, TWO_PI) / h
            i = np.floor(x).astype(int) % N
            frac = x - np.floor(x)
            periodic = values[i] * (1 - frac) + values[(i + 1) % N] * frac
            return periodic - slope * t

        def fp(t):
            t = np.asarray(t, dtype=float)
            x = np.mod(t, TWO_PI) / h
            i = np.floor(x).astype(int) % N
            frac = x - np.floor(x)
            return deriv[i] * (1 - frac) + deriv[(i + 1) % N] * frac - slope

        return cls(f, fp, N=N, drift=drift, samples=values)

    # -- algebra on closed forms ------------------------------------------------

    def negated(self) -> "MorseFunction1D":
        if self.expr is not None:
            return MorseFunction1D.closed_form(-self.expr, N=self.N, drift=-self.drift)
        return MorseFunction1D.from_samples(-self.samples, drift=-self.drift)

    def added(self, other: "MorseFunction1D") -> "MorseFunction1D":
        if self.expr is not None and other.expr is not None:
            return MorseFunction1D.closed_form(
                self.expr + other.expr, N=max(self.N, other.N),
                drift=self.drift + other.drift,
            )
        raise MorseError("sum requires closed forms")

    def rotated(self, phi: float) -> "MorseFunction1D":
        if self.expr is None:
            raise MorseError("rotation requires a closed form")
        if self.drift != 0:
            raise MorseError("rotation of a drift function is not supported")
        return MorseFunction1D.closed_form(
            self.expr.subs(_THETA, _THETA + sp.nsimplify(phi, rational=True)), N=self.N
        )

    # -- evaluation -------------------------------------------------------------

    def values(self, thetas) -> np.ndarray:
        return self._f(np.asarray(thetas, dtype=float))

    def grid(self) -> np.ndarray:
        return np.arange(self.N) * (TWO_PI / self.N)

    def periodic_mean(self) -> float:
        g = self.grid()
        vals = self._f(g) + (float(self.drift) / TWO_PI) * g
        return float(np.mean(vals))

    # -- critical points ---------------------------------------------------------

    def critical_points(self) -> list:
        if self._crit is None:
            self._crit = self._detect()
        return self._crit

    def _refine(self, lo: float, hi: float) -> float:
        flo = float(self._fp(lo))
        if flo == 0.0:
            return lo
        while hi - lo > THETA_TOLERANCE:
            mid = 0.5 * (lo + hi)
            fmid = float(self._fp(mid))
            if fmid == 0.0:
                return mid
            if (fmid > 0) == (flo > 0):
                lo, flo = mid, fmid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def _detect(self) -> list:
        g = self.grid()
        h = TWO_PI / self.N
        deriv = self._fp(g)
        if not np.all(np.isfinite(deriv)):
            raise MorseError("derivative evaluation failed")
        cells, flags = _kernels.critical_cells(deriv, (2.0 / self.N) * h)
        if len(cells) == 0:
            raise MorseError("no critical points detected after normalization")
        bad = [int(c) for c, ok in zip(cells, flags) if not ok]
        if bad:
            raise MorseError(f"degeneracy within margin at cells {bad}")
        mean = _quantize(self.periodic_mean())
        out = []
        for c in cells:
            lo = g[int(c)]
            hi = lo + h
            theta = self._refine(lo, hi)
            raw = float(self._f(theta))
            # derivative falls through zero at a maximum of f
            index = 0 if deriv[int(c)] > deriv[(int(c) + 1) % self.N] else 1
            value = _quantize(raw) - mean
            out.append(CriticalPoint(theta, value, index, raw))
        if self.drift == 0:
            zeros = sum(1 for p in out if p.index == 0)
            ones = len(out) - zeros
            if zeros != ones:
                raise MorseError("alternation violated: #maxima != #minima")
        return out

    def value_range(self):
        """(min, max) over critical values, exact after quantization."""
        crit = self.critical_points()
        vals = [p.value for p in crit]
        return min(vals), max(vals)


class MorseComplexReport:
    """Built complex plus provenance: critical points, group data, tolerances."""

    def __init__(self, complex: FilteredComplex, critical_points, eps, group, tolerances):
        self.complex = complex
        self.critical_points = critical_points
        self.eps = eps
        self.group = group
        self.tolerances = tolerances

    def orbit_of(self, i: int) -> str:
        return f"c{i}"

    def point_class(self) -> NovikovChain:
        for i, p in enumerate(self.critical_points):
            if p.index == 0:
                return NovikovChain.unit(self.group, self.orbit_of(i))
        raise MorseError("no index-0 generator")

    def fundamental_class(self) -> NovikovChain:
        chain = NovikovChain(self.group)
        for i, p in enumerate(self.critical_points):
            if p.index == 1:
                chain = chain + NovikovChain.unit(self.group, self.orbit_of(i))
        if chain.is_zero():
            raise MorseError("no index-1 generator")
        return chain

    def class_chain(self, name) -> NovikovChain:
        if isinstance(name, NovikovChain):
            return name
        if name == "point":
            return self.point_class()
        if name == "fundamental":
            return self.fundamental_class()
        raise MorseError(f"unknown class {name!r}")


def _tolerances(N):
    return {
        "grid": N,
        "theta_refine": THETA_TOLERANCE,
        "value_quantum": f"1/{VALUE_QUANTUM}",
        "curvature_margin": f"2/{N}",
    }


def build_s1_morse(f: MorseFunction1D, eps=1) -> MorseComplexReport:
    """Morse complex of -eps*f on the circle over the trivial period group.

    Generators are the critical points; level(p) = -eps*f(p); an index-1
    generator sends +1 to its counterclockwise index-0 neighbor and -1 to
    the clockwise one.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise MorseError("eps must be positive")
    if f.drift != 0:
        raise MorseError("drift requires build_circle_valued")
    crit = f.critical_points()
    group = make_period_group([], [])
    orbits = []
    for i, p in enumerate(crit):
        orbits.append(Orbit(f"c{i}", ActionValue.rational(-eps * p.value), p.index))
    boundary: dict = {}
    k = len(crit)
    for i, p in enumerate(crit):
        if p.index != 1:
            continue
        nxt = f"c{(i + 1) % k}"
        prv = f"c{(i - 1) % k}"
        row: dict = {}
        one = NovikovScalar.one(group)
        row[nxt] = one
        row[prv] = row[prv] - one if prv in row else -one
        boundary[f"c{i}"] = {t: s for t, s in row.items() if not s.is_zero()}
    X = FilteredComplex(group, orbits, boundary)
    return MorseComplexReport(X, crit, eps, group, _tolerances(f.N))


def build_circle_valued(f: MorseFunction1D, eps=1) -> MorseComplexReport:
    """Morse complex on the integer cover for a drift function.

    Orbit basis is one fundamental domain; descending adjacencies that
    wrap the domain pick up the deck cap with omega = eps*drift.
    """
    eps = Fraction(eps)
    if f.drift == 0:
        return build_s1_morse(f, eps)
    if f.drift < 0:
        raise MorseError("drift must be nonnegative")
    group = make_period_group([ActionValue.rational(eps * f.drift)], [0])
    try:
        crit = f.critical_points()
    except MorseError as e:
        if "no critical points" not in str(e):
            raise
        X = FilteredComplex(group, [], {})
        return MorseComplexReport(X, [], eps, group, _tolerances(f.N))
    orbits = []
    for i, p in enumerate(crit):
        orbits.append(Orbit(f"c{i}", ActionValue.rational(-eps * p.value), p.index))
    k = len(crit)
    boundary: dict = {}
    for i, p in enumerate(crit):
        if p.index != 1:
            continue
        row: dict = {}

        def neighbor(j, wrap):
            # translate by +-2pi shifts the level by +-eps*drift: cap (-wrap,)
            return f"c{j}", (-wrap,)

        if i + 1 < k:
            tgt, cap = neighbor(i + 1, 0)
        else:
            tgt, cap = neighbor(0, 1)
        s = NovikovScalar.monomial(group, cap, 1)
        row[tgt] = row[tgt] + s if tgt in row else s
        if i - 1 >= 0:
            tgt, cap = neighbor(i - 1, 0)
        else:
            tgt, cap = neighbor(k - 1, -1)
        s = NovikovScalar.monomial(group, cap, -1)
        row[tgt] = row[tgt] + s if tgt in row else s
        boundary[f"c{i}"] = {t: s for t, s in row.items() if not s.is_zero()}
    X = FilteredComplex(group, orbits, boundary)
    return MorseComplexReport(X, crit, eps, group, _tolerances(f.N))


class Pairing:
    """Index-preserving bijection between critical point sets."""

    __slots__ = ("pairs", "max_distance", "radius")

    def __init__(self, pairs, max_distance, radius):
        self.pairs = pairs
        self.max_distance = max_distance
        self.radius = radius

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


def _circle_distance(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def canonical_pairing(f1: MorseFunction1D, f2: MorseFunction1D, radius=None) -> Pairing:
    """Pair each critical point with its unique nearest same-index partner.

    Refuses (PairingError) on count mismatch or ambiguity within the
    separation radius: both signal that the pair straddles a bifurcation.
    """
    c1 = f1.critical_points()
    c2 = f2.critical_points()
    return pair_critical_lists(c1, c2, radius)


def pair_critical_lists(c1, c2, radius=None) -> Pairing:
    if len(c1) != len(c2):
        raise PairingError(f"critical point counts differ: {len(c1)} vs {len(c2)}")
    if radius is None:
        # separation scale: nearest same-index neighbors (a freshly born
        # max/min pair sits arbitrarily close but has distinct indices)
        gaps = []
        for idx in (0, 1):
            thetas = sorted(p.theta for p in c1 if p.index == idx)
            if len(thetas) > 1:
                gaps += [
                    _circle_distance(thetas[i], thetas[(i + 1) % len(thetas)])
                    for i in range(len(thetas))
                ]
        radius = min(gaps) / 2 if gaps else math.pi
    pairs = []
    used = set()
    worst = 0.0
    for i, p in enumerate(c1):
        cands = [
            (j, _circle_distance(p.theta, q.theta))
            for j, q in enumerate(c2)
            if q.index == p.index and _circle_distance(p.theta, q.theta) <= radius
        ]
        if len(cands) != 1:
            raise PairingError(
                f"pairing ambiguity at theta={p.theta:.6f}: {len(cands)} candidates"
            )
        j, dist = cands[0]
        if j in used:
            raise PairingError("pairing is not injective")
        used.add(j)
        pairs.append((i, j))
        worst = max(worst, dist)
    return Pairing(pairs, worst, radius)


# ---------------------------------------------------------------------------
# Small-function mini-max formula
# ---------------------------------------------------------------------------


class DecoratedClass:
    """Cap decorations of a class: levels nu_j = -omega(A_j), coefficients c_j."""

    def __init__(self, group: PeriodGroup, caps, coeffs=None):
        self.group = group
        self.caps = [group.check_cap(c) for c in caps]
        if not self.caps:
            raise ComplexStructureError("decorations need at least one cap")
        self.coeffs = [Fraction(c) for c in (coeffs or [1] * len(self.caps))]
        self.levels = sorted((-(group.omega(c)) for c in self.caps), reverse=True)

    @property
    def top_gap(self):
        """nu_1 - nu_2; None when there is a single decoration level."""
        if len(self.levels) < 2:
            return None
        return self.levels[0] - self.levels[1]

    def scalar(self) -> NovikovScalar:
        terms: dict = {}
        for cap, c in zip(self.caps, self.coeffs):
            terms[cap] = terms.get(cap, Fraction(0)) + c
        return NovikovScalar.from_terms(self.group, terms)


class SmallMorseResult:
    __slots__ = ("value", "valid", "minimax", "shift", "condition")

    def __init__(self, value, valid, minimax, shift, condition):
        self.value = value
        self.valid = valid
        self.minimax = minimax
        self.shift = shift
        self.condition = condition

    def __repr__(self):
        return f"SmallMorseResult(value={self.value!r}, valid={self.valid})"


def _q_span_contains(columns, target) -> bool:
    """Exact rational membership of target in the column span."""
    rows = set(target)
    for col in columns:
        rows.update(col)
    rows = sorted(rows)
    aug = [[col.get(r, Fraction(0)) for col in columns] + [target.get(r, Fraction(0))]
           for r in rows]
    n = len(columns)
    r = 0
    for c in range(n):
        sel = next((i for i in range(r, len(aug)) if aug[i][c]), None)
        if sel is None:
            continue
        aug[r], aug[sel] = aug[sel], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c]:
                fct = aug[i][c]
                aug[i] = [x - fct * y for x, y in zip(aug[i], aug[r])]
        r += 1
    return all(row[-1] == 0 for row in aug[r:])


def _threshold_minimax(report: MorseComplexReport, rep: NovikovChain):
    """Least level t with a representative supported at levels <= t.

    Rank tests over Q, independent of the engine's orthogonal reduction.
    """
    X = report.complex
    deg = X.degree_of(rep)
    target = {oid: s.num.get((), Fraction(0)) for oid, s in rep.coeffs.items()}
    target = {k: v for k, v in target.items() if v}
    bcols = []
    for wid in X.orbit_ids(deg + 1):
        col = {
            t: s.num.get((), Fraction(0)) for t, s in X.boundary.get(wid, {}).items()
        }
        col = {k: v for k, v in col.items() if v}
        if col:
            bcols.append(col)
    candidates = sorted({X.weight(oid) for oid in X.orbit_ids(deg)})
    for t in candidates:
        low = [{oid: Fraction(1)} for oid in X.orbit_ids(deg) if X.weight(oid) <= t]
        if _q_span_contains(bcols + low, target):
            return t
    raise MorseError("mini-max threshold search failed")


def rho_small_morse(f: MorseFunction1D, eps, cls, decorations: DecoratedClass | None = None):
    """Mini-max level of a decorated Morse class via the small-function formula.

    Valid when eps * (max f - min f) stays below the top decoration gap;
    the returned value is the top decoration level plus the mini-max of
    -eps*f over cycles in the class, and it is asserted against the
    engine's value on the decorated complex.
    """
    eps = Fraction(eps)
    report = build_s1_morse(f, eps)
    rep = report.class_chain(cls)
    lo, hi = f.value_range()
    spread = eps * (hi - lo)
    if decorations is None:
        shift = ActionValue.rational(0)
        condition = None
        valid = True
    else:
        shift = decorations.levels[0]
        gap = decorations.top_gap
        condition = (ActionValue.rational(spread), gap)
        valid = gap is None or ActionValue.rational(spread) <= gap
    if not valid:
        return SmallMorseResult(None, False, None, shift, condition)
    minimax = _threshold_minimax(report, rep)
    value = shift + minimax

    # cross-check against the engine on the decorated complex
    if decorations is None:
        engine_value = engine_rho(report.complex, rep).value
        assert engine_value == minimax
    else:
        G = decorations.group
        orbits = [Orbit(o.id, o.level, o.index) for o in report.complex.orbits]
        boundary = {
            src: {
                tgt: NovikovScalar.from_terms(
                    G, {G.zero_cap: s.num.get((), Fraction(0))}
                )
                for tgt, s in row.items()
            }
            for src, row in report.complex.boundary.items()
        }
        XG = FilteredComplex(G, orbits, boundary)
        u = decorations.scalar()
        dec_rep = NovikovChain(
            G,
            {
                oid: u.scale(s.num.get((), Fraction(0)))
                for oid, s in rep.coeffs.items()
            },
        )
        engine_value = engine_rho(XG, dec_rep).value
        assert engine_value == value, (engine_value, value)
    return SmallMorseResult(value, True, minimax, shift, condition)
