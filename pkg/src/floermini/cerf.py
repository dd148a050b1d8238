"""One-parameter families and their bifurcation diagrams.

A Morse family is a closed-form Hamiltonian H(eta)(theta) swept over a
parameter grid; branches of the diagram track critical points through
parameter space in the (eta, action) plane, so a branch at the critical
point p carries the value -H(eta, p).  Events are localized by bisection:
birth/death shows up as a pairing refusal with a count change, a crossing
as a sign change of the value difference of two equal-index branches.

Abstract families carry explicit complexes on the grid plus a declared
event list; genericity has no combinatorial substitute, so undeclared
ambiguity is a refusal, never a guess.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import sympy as sp

from .action import PeriodGroup
from .complexes import FilteredComplex
from .errors import EventError, MorseError, NonCerfError, PairingError
from .morse import (
    DEFAULT_GRID,
    TWO_PI,
    MorseFunction1D,
    build_s1_morse,
    pair_critical_lists,
    parse_expression,
    validate_expression,
)

__all__ = [
    "MorseCerfFamily",
    "AbstractCerfFamily",
    "CerfDiagram",
    "Branch",
    "Cusp",
    "Crossing",
    "bifurcation_diagram",
    "classify_events",
    "branch_slope",
    "sub_family",
    "gamma_translate",
    "concat",
]

ETA_TOLERANCE = 1e-6
VALUE_TOLERANCE = 1e-9
DEFAULT_ETA_GRID = 257

_THETA = sp.Symbol("theta")
_ETA = sp.Symbol("eta")


class MorseCerfFamily:
    """Closed-form family eta -> Morse function, swept over [0, 1].

    `affine` identifies this family as the sub-homotopy of a root family:
    the slot s maps to root parameter a + s*(b - a); b < a is the time
    reversal, so one affine covers both orientations.
    """

    is_morse = True

    def __init__(self, expr, eta_points=DEFAULT_ETA_GRID, theta_points=DEFAULT_GRID,
                 affine=(0.0, 1.0), _root=None):
        if isinstance(expr, str):
            expr = parse_expression(expr, symbols=(_THETA, _ETA))
        else:
            validate_expression(expr, symbols=(_THETA, _ETA))
        self.expr = expr
        self.eta_points = int(eta_points)
        self.theta_points = int(theta_points)
        self.affine = (float(affine[0]), float(affine[1]))
        if _root is not None:
            self._f, self._fp_theta, self._fp_eta = _root
        else:
            self._f = sp.lambdify((_THETA, _ETA), expr, "numpy")
            self._fp_theta = sp.lambdify((_THETA, _ETA), sp.diff(expr, _THETA), "numpy")
            self._fp_eta = sp.lambdify((_THETA, _ETA), sp.diff(expr, _ETA), "numpy")
        self.grid = np.linspace(0.0, 1.0, self.eta_points)
        self._diagram = None
        self._complexes: dict = {}

    # -- parameter bookkeeping ---------------------------------------------------

    def root_eta(self, s: float) -> float:
        a, b = self.affine
        return a + s * (b - a)

    @property
    def span(self):
        a, b = self.affine
        return min(a, b), max(a, b)

    @property
    def reversed_orientation(self) -> bool:
        return self.affine[1] < self.affine[0]

    # -- slices ------------------------------------------------------------

    def function_at(self, s: float) -> MorseFunction1D:
        eta = self.root_eta(float(s))

        def f(t):
            t = np.asarray(t, dtype=float)
            return np.zeros_like(t) + self._f(t, eta)

        def fp(t):
            t = np.asarray(t, dtype=float)
            return np.zeros_like(t) + self._fp_theta(t, eta)

        return MorseFunction1D(f, fp, N=self.theta_points)

    def complex_at(self, i: int):
        """Morse complex report at grid index i (cached)."""
        if i not in self._complexes:
            self._complexes[i] = build_s1_morse(self.function_at(self.grid[i]), 1)
        return self._complexes[i]

    def diagram(self) -> "CerfDiagram":
        if self._diagram is None:
            self._diagram = bifurcation_diagram(self)
        return self._diagram

    def _eta_derivative(self, thetas, eta: float):
        thetas = np.asarray(thetas, dtype=float)
        return np.zeros_like(thetas) + self._fp_eta(thetas, eta)

    def _mean_eta_derivative(self, eta: float) -> float:
        thetas = np.arange(self.theta_points) * (TWO_PI / self.theta_points)
        return float(np.mean(self._eta_derivative(thetas, eta)))

    def eta_derivative_at(self, s: float, theta):
        """d/d(slot) of the normalized Hamiltonian at the root point.

        Normalization keeps every slice mean-zero, so the slice mean of
        the raw derivative is subtracted before the chain rule factor.
        """
        a, b = self.affine
        eta = self.root_eta(float(s))
        raw = self._eta_derivative(theta, eta)
        return (b - a) * (raw - self._mean_eta_derivative(eta))

    def variation_contributions(self):
        """Per grid interval, in slot order: exact (negative, positive)
        variation contributions of the parameter derivative.

        The rule is an upper-biased Riemann sum: each interval contributes
        its worst sampled extremum padded by the sampled spread, so the
        continuation level bounds hold with the reported constants.  A
        derivative constant in the parameter gets zero pad, keeping the
        linear-homotopy values exact.  Sampling happens on the canonical
        ascending root interval, so the time-reversed family receives the
        same floats with the parts swapped: the reversal identity holds
        bitwise, and concatenations add per-interval lists exactly.
        """
        lo, hi = self.span
        m = self.eta_points - 1
        width = (Fraction(hi) - Fraction(lo)) / m
        thetas = np.arange(self.theta_points) * (TWO_PI / self.theta_points)
        out = []
        for i in range(m):
            e0 = lo + (hi - lo) * (i / m)
            e1 = lo + (hi - lo) * ((i + 1) / m)
            mins = []
            maxs = []
            for e in (e0, 0.5 * (e0 + e1), e1):
                vals = self._eta_derivative(thetas, e)
                vals = vals - vals.mean()  # per-slice mean-zero normalization
                mins.append(Fraction(float(vals.min())))
                maxs.append(Fraction(float(vals.max())))
            neg = (-min(mins) + (max(mins) - min(mins))) * width
            pos = (max(maxs) + (max(maxs) - min(maxs))) * width
            out.append((neg, pos))
        if self.reversed_orientation:
            out = [(pos, neg) for neg, pos in out[::-1]]
        return out

    def group(self) -> PeriodGroup:
        from .action import make_period_group

        return make_period_group([], [])


class AbstractCerfFamily:
    """Grid of complexes with declared steps and events.

    steps[i] describes the move from grid point i to i+1:
      {"type": "pairing"}                                   identity pairing
      {"type": "slide", "slide_from": x, "slide_over": y,
       "cap": [...], "coeff": "c", "eta": e, "value": v}    transvection
      {"type": "birth"/"death", "plus": id, "minus": id,
       "eta": e, "value": v}                                pair creation/cancel
    Declared per-step variation bounds may accompany the steps as
    (e_minus, e_plus) pairs of rationals.
    """

    is_morse = False

    def __init__(self, group, complexes, steps=None, bounds=None, grid=None):
        self.period_group = group
        self.complexes = list(complexes)
        if len(self.complexes) < 1:
            raise NonCerfError("abstract family needs at least one complex")
        n = len(self.complexes)
        self.grid = np.asarray(
            grid if grid is not None else np.linspace(0.0, 1.0, max(n, 2))[:n]
        )
        self.steps = list(steps or [{"type": "pairing"} for _ in range(n - 1)])
        if len(self.steps) != n - 1:
            raise NonCerfError("need one declared step per grid interval")
        for st in self.steps:
            eta = st.get("eta")
            if st.get("type") in ("birth", "death", "slide") and eta is not None:
                if not (0.0 < float(eta) < 1.0):
                    raise NonCerfError("declared events must lie strictly inside (0,1)")
        self.bounds = [
            (Fraction(a), Fraction(b)) for a, b in (bounds or [(0, 0)] * (n - 1))
        ]
        if len(self.bounds) != n - 1:
            raise NonCerfError("need one bounds pair per grid interval")
        self._diagram = None

    def complex_at(self, i: int) -> FilteredComplex:
        return self.complexes[i]

    def diagram(self) -> "CerfDiagram":
        if self._diagram is None:
            self._diagram = bifurcation_diagram(self)
        return self._diagram

    def group(self) -> PeriodGroup:
        return self.period_group

    def variation_contributions(self):
        """Declared per-step (negative, positive) variation contributions."""
        return list(self.bounds)


class Branch:
    __slots__ = ("id", "index", "etas", "thetas", "values")

    def __init__(self, id, index):
        self.id = id
        self.index = index
        self.etas: list = []
        self.thetas: list = []
        self.values: list = []

    def domain(self):
        return self.etas[0], self.etas[-1]

    def value_near(self, eta: float) -> float:
        i = min(range(len(self.etas)), key=lambda j: abs(self.etas[j] - eta))
        return self.values[i]

    def theta_near(self, eta: float) -> float:
        i = min(range(len(self.etas)), key=lambda j: abs(self.etas[j] - eta))
        return self.thetas[i]


class Cusp:
    __slots__ = ("eta", "value", "branches", "indices", "kind")

    def __init__(self, eta, value, branches, indices, kind):
        self.eta = eta
        self.value = value
        self.branches = branches
        self.indices = indices
        self.kind = kind  # birth | death

    def __repr__(self):
        return f"Cusp({self.kind}, eta={self.eta:.6f}, value={self.value:.6f})"


class Crossing:
    __slots__ = ("eta", "value", "branch_a", "branch_b", "transverse")

    def __init__(self, eta, value, branch_a, branch_b, transverse=True):
        self.eta = eta
        self.value = value
        self.branch_a = branch_a
        self.branch_b = branch_b
        self.transverse = transverse

    def __repr__(self):
        return f"Crossing(eta={self.eta:.6f}, value={self.value:.6f})"


class CerfDiagram:
    def __init__(self, branches, cusps, crossings, group, metadata, family=None,
                 tracks=None):
        self.branches = branches
        self.cusps = cusps
        self.crossings = crossings
        self.group = group
        self.metadata = metadata
        self.family = family
        # per grid index: branch id -> orbit id in the complex at that index
        self.tracks = tracks or []

    def branch(self, bid) -> Branch:
        for b in self.branches:
            if b.id == bid:
                return b
        raise EventError(f"unknown branch {bid!r}")

    def events_sorted(self):
        evs = [("cusp", c.eta, c) for c in self.cusps]
        evs += [("crossing", c.eta, c) for c in self.crossings]
        return sorted(evs, key=lambda t: t[1])


# ---------------------------------------------------------------------------
# diagram construction
# ---------------------------------------------------------------------------


def _crit_levels(f: MorseFunction1D):
    """Critical data as (theta, action value float, index)."""
    return [(p.theta, -float(p.value), p.index) for p in f.critical_points()]


def _try_pairing(c_lo, c_hi):
    try:
        return pair_critical_lists(c_lo, c_hi)
    except PairingError:
        return None


def bifurcation_diagram(fam) -> CerfDiagram:
    if fam.is_morse:
        return _morse_diagram(fam)
    return _abstract_diagram(fam)


def _crit_at(fam, eta):
    return fam.function_at(eta).critical_points()


def _morse_diagram(fam: MorseCerfFamily) -> CerfDiagram:
    grid = fam.grid
    try:
        crits = [_crit_at(fam, e) for e in (grid[0], grid[-1])]
    except MorseError as e:
        raise NonCerfError(f"endpoint is degenerate: {e}") from None
    del crits

    branches: list[Branch] = []
    alive: dict = {}  # position in current crit list -> Branch
    cusps: list[Cusp] = []
    tracks: list = []

    def crit_list(eta):
        try:
            return _crit_at(fam, eta)
        except MorseError as e:
            raise NonCerfError(f"degenerate slice at eta={eta}: {e}") from None

    cur = crit_list(grid[0])
    for j, p in enumerate(cur):
        b = Branch(f"b{len(branches)}", p.index)
        branches.append(b)
        alive[j] = b
    _record(alive, cur, grid[0])
    tracks.append({b.id: f"c{j}" for j, b in alive.items()})

    walker = _Walker(fam, branches, cusps, crit_list)
    for i in range(len(grid) - 1):
        cur, alive = walker.advance(cur, alive, float(grid[i]), float(grid[i + 1]))
        _record(alive, cur, grid[i + 1])
        tracks.append({b.id: f"c{j}" for j, b in alive.items()})

    crossings = _detect_crossings(fam, branches, cusps)
    metadata = {
        "eta_points": len(grid),
        "theta_points": fam.theta_points,
        "eta_tolerance": ETA_TOLERANCE,
        "value_tolerance": VALUE_TOLERANCE,
        "events_statement": (
            f"no further events detected at resolution {len(grid)}x{fam.theta_points}"
        ),
    }
    return CerfDiagram(
        branches, cusps, crossings, fam.group(), metadata, fam, tracks
    )


def _record(alive, crit, eta):
    for j, b in alive.items():
        p = crit[j]
        b.etas.append(float(eta))
        b.thetas.append(p.theta)
        b.values.append(-float(p.value))


class _Walker:
    """Tracks critical lists across an interval, localizing count changes
    by bisection and refining pure-motion pairing failures adaptively."""

    def __init__(self, fam, branches, cusps, crit_list):
        self.fam = fam
        self.branches = branches
        self.cusps = cusps
        self.crit_list = crit_list

    def advance(self, cur, alive, lo, hi, depth=0):
        if depth > 48:
            raise NonCerfError(
                f"pairing ambiguity not resolvable by refinement near eta={lo}"
            )
        nxt = self.crit_list(hi)
        if len(nxt) == len(cur):
            pairing = _try_pairing(cur, nxt)
            if pairing is not None:
                remap = {}
                for a, bidx in pairing.pairs:
                    remap[bidx] = alive[a]
                return nxt, remap
            mid = 0.5 * (lo + hi)
            cur, alive = self.advance(cur, alive, lo, mid, depth + 1)
            return self.advance(cur, alive, mid, hi, depth + 1)
        return self._event(cur, alive, lo, hi, len(nxt))

    def _count(self, eta):
        try:
            return len(self.crit_list(eta))
        except NonCerfError:
            return None

    def _event(self, cur, alive, lo, hi, n_hi):
        n_lo = len(cur)
        a, b = lo, hi
        while b - a > ETA_TOLERANCE:
            mid = 0.5 * (a + b)
            n_mid = self._count(mid)
            if n_mid is None:  # detection margin hit: nudge off the event
                mid = mid + 0.25 * (b - a)
                n_mid = self._count(mid)
                if n_mid is None:
                    break
            if n_mid == n_lo:
                a = mid
            else:
                b = mid
        eta_star = 0.5 * (a + b)
        cur, alive = self.advance(cur, alive, lo, a)  # pure motion below the event
        c_a, c_b = cur, self.crit_list(b)
        if len(c_b) == n_lo + 2:
            kind, rich, lean, rich_eta = "birth", c_b, c_a, b
        elif len(c_b) == n_lo - 2:
            kind, rich, lean, rich_eta = "death", c_a, c_b, a
        else:
            raise NonCerfError(
                f"count change {n_lo} -> {len(c_b)} at eta={eta_star}: non-Cerf"
            )
        pair_idx = _identify_new_pair(rich, lean)
        indices = tuple(rich[j].index for j in pair_idx)
        if sorted(indices) != [0, 1]:
            raise NonCerfError(f"cusp pair at eta={eta_star} has indices {indices}")
        value = -0.5 * (
            float(rich[pair_idx[0]].value) + float(rich[pair_idx[1]].value)
        )
        survivors = [j for j in range(len(rich)) if j not in pair_idx]

        if kind == "birth":
            pairing = pair_critical_lists(c_a, [rich[j] for j in survivors])
            remap = {}
            for i_a, bpos in pairing.pairs:
                remap[survivors[bpos]] = alive[i_a]
            new_ids = []
            for j in pair_idx:
                br = Branch(f"b{len(self.branches)}", rich[j].index)
                self.branches.append(br)
                remap[j] = br
                new_ids.append(br.id)
            self.cusps.append(Cusp(eta_star, value, tuple(new_ids), indices, "birth"))
            _record(remap, rich, rich_eta)
            return self.advance(rich, remap, b, hi)
        dying = [alive[j].id for j in pair_idx if j in alive]
        pairing = pair_critical_lists([rich[j] for j in survivors], c_b)
        remap = {}
        for pos_s, pos_b in pairing.pairs:
            remap[pos_b] = alive[survivors[pos_s]]
        self.cusps.append(Cusp(eta_star, value, tuple(dying), indices, "death"))
        _record(remap, c_b, b)
        return self.advance(c_b, remap, b, hi)


def _identify_new_pair(rich, lean):
    """Two entries of `rich` unexplained by `lean`: the bifurcating pair."""
    scores = []
    for j, p in enumerate(rich):
        ds = [
            _circ(p.theta, q.theta)
            for q in lean
            if q.index == p.index
        ]
        scores.append((min(ds) if ds else math.inf, j))
    scores.sort(reverse=True)
    pair = sorted(j for _, j in scores[:2])
    return tuple(pair)


def _circ(a, b):
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def _refine_theta(fam, eta, theta_guess, window):
    """Track a critical point at parameter eta near theta_guess."""
    f = fam.function_at(eta)
    lo, hi = theta_guess - window, theta_guess + window
    flo = float(f._fp(lo))
    fhi = float(f._fp(hi))
    if flo == 0.0:
        return lo, f
    if (flo > 0) == (fhi > 0):
        raise EventError(f"lost the critical point near theta={theta_guess}")
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        fmid = float(f._fp(mid))
        if fmid == 0.0:
            lo = hi = mid
            break
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi), f


def branch_value_at(fam, branch: Branch, eta: float) -> float:
    """Action level of a tracked branch at an off-grid parameter."""
    theta0 = branch.theta_near(eta)
    window = TWO_PI / 64
    theta, f = _refine_theta(fam, eta, theta0, window)
    mean = f.periodic_mean()
    return -(float(f._f(theta)) - mean)


def _detect_crossings(fam, branches, cusps):
    crossings = []
    seen = set()
    for ia in range(len(branches)):
        for ib in range(ia + 1, len(branches)):
            a, b = branches[ia], branches[ib]
            if a.index != b.index:
                continue
            lo = max(a.etas[0], b.etas[0])
            hi = min(a.etas[-1], b.etas[-1])
            if hi <= lo:
                continue
            etas = [e for e in a.etas if lo <= e <= hi]
            diffs = []
            for e in etas:
                va = a.values[a.etas.index(e)] if e in a.etas else branch_value_at(fam, a, e)
                vb = branch_value_at(fam, b, e) if e not in b.etas else b.values[b.etas.index(e)]
                diffs.append(va - vb)
            for k in range(len(etas) - 1):
                if diffs[k] == 0.0 or diffs[k] * diffs[k + 1] < 0:
                    elo, ehi = etas[k], etas[k + 1]
                    dlo = diffs[k]
                    while ehi - elo > ETA_TOLERANCE:
                        mid = 0.5 * (elo + ehi)
                        dmid = branch_value_at(fam, a, mid) - branch_value_at(fam, b, mid)
                        if dmid == 0.0 or (dmid > 0) == (dlo > 0):
                            elo, dlo = mid, dmid
                        else:
                            ehi = mid
                    eta_star = 0.5 * (elo + ehi)
                    key = (a.id, b.id, round(eta_star / (10 * ETA_TOLERANCE)))
                    if key in seen:
                        continue
                    seen.add(key)
                    value = branch_value_at(fam, a, eta_star)
                    crossings.append(Crossing(eta_star, value, a.id, b.id))
    return crossings


def _abstract_diagram(fam: AbstractCerfFamily) -> CerfDiagram:
    branches_by_orbit: dict = {}
    branches = []
    cusps = []
    crossings = []
    for i, X in enumerate(fam.complexes):
        eta = float(fam.grid[i])
        for o in X.orbits:
            b = branches_by_orbit.get(o.id)
            if b is None:
                b = Branch(f"b_{o.id}", o.index)
                branches_by_orbit[o.id] = b
                branches.append(b)
            b.etas.append(eta)
            b.thetas.append(0.0)
            b.values.append(float(o.level))
    for st in fam.steps:
        kind = st.get("type")
        if kind in ("birth", "death"):
            eta = float(st.get("eta", 0.5))
            value = float(st.get("value", 0.0))
            plus, minus = st["plus"], st["minus"]
            cusps.append(
                Cusp(eta, value, (f"b_{plus}", f"b_{minus}"), (1, 0), kind)
            )
        elif kind == "crossing":
            crossings.append(
                Crossing(
                    float(st["eta"]),
                    float(st.get("value", 0.0)),
                    f"b_{st['a']}",
                    f"b_{st['b']}",
                )
            )
    tracks = []
    for X in fam.complexes:
        tracks.append({f"b_{o.id}": o.id for o in X.orbits})
    metadata = {
        "eta_points": len(fam.grid),
        "declared": True,
        "eta_tolerance": ETA_TOLERANCE,
        "value_tolerance": VALUE_TOLERANCE,
    }
    return CerfDiagram(
        branches, cusps, crossings, fam.group(), metadata, fam, tracks
    )


# ---------------------------------------------------------------------------
# validation, slopes, reparametrization, group action
# ---------------------------------------------------------------------------


class ValidationReport:
    def __init__(self, violations):
        self.violations = violations

    @property
    def ok(self):
        return not self.violations

    def __repr__(self):
        return f"ValidationReport(ok={self.ok}, violations={self.violations})"


def classify_events(d: CerfDiagram) -> ValidationReport:
    """Genericity checks: transverse crossings, isolated simple cusps,
    cusp index step one, events pairwise separated."""
    violations = []
    for c in d.crossings:
        try:
            sa = branch_slope(d, c.branch_a, c.eta, side_hint=True)
            sb = branch_slope(d, c.branch_b, c.eta, side_hint=True)
            if abs(sa - sb) <= 10 * VALUE_TOLERANCE:
                violations.append(
                    f"degenerate crossing at eta={c.eta:.6f}: equal slopes"
                )
        except EventError:
            violations.append(f"crossing at eta={c.eta:.6f} overlaps another event")
    for c in d.cusps:
        if sorted(c.indices) != [0, 1]:
            violations.append(f"cusp at eta={c.eta:.6f} violates the index step")
    events = d.events_sorted()
    for (ka, ea, _), (kb, eb, _) in zip(events, events[1:]):
        if abs(ea - eb) <= ETA_TOLERANCE:
            violations.append(
                f"events at eta={ea:.6f} and {eb:.6f} are not separated"
            )
    values = {}
    for c in d.crossings:
        key = round(c.eta / (10 * ETA_TOLERANCE))
        values.setdefault(key, []).append((c.branch_a, c.branch_b))
    for key, pairs in values.items():
        if len(pairs) > 1:
            violations.append(f"multiple crossing at eta bucket {key}")
    return ValidationReport(violations)


def branch_slope(d: CerfDiagram, branch_id, eta: float, side_hint=False) -> float:
    """Slope of a branch level: -dH/deta at the tracked critical point."""
    b = d.branch(branch_id)
    lo, hi = b.domain()
    if not (lo <= eta <= hi):
        raise EventError(f"eta={eta} outside branch domain [{lo}, {hi}]")
    for kind, e, _ in d.events_sorted():
        if abs(e - eta) <= 2 * ETA_TOLERANCE and not side_hint:
            raise EventError(f"eta={eta} is at a {kind} event")
    fam = d.family
    if fam is None or not fam.is_morse:
        # sampled fallback: centered difference of the recorded track
        i = min(range(len(b.etas)), key=lambda j: abs(b.etas[j] - eta))
        i = max(1, min(len(b.etas) - 2, i))
        return (b.values[i + 1] - b.values[i - 1]) / (b.etas[i + 1] - b.etas[i - 1])
    theta0 = b.theta_near(eta)
    theta, _ = _refine_theta(fam, eta, theta0, TWO_PI / 64)
    return -float(fam.eta_derivative_at(eta, theta))


def sub_family(fam, eta1: float, eta2: float):
    """Affine reparametrization s -> H((1-s) eta1 + s eta2).

    eta1 > eta2 yields the time-reversed run; variation bounds computed
    from canonical ascending samples swap their signed parts exactly.
    """
    if fam.is_morse:
        for e in (eta1, eta2):
            if not (0.0 <= e <= 1.0):
                raise EventError(f"sub-family parameter {e} outside [0, 1]")
        a0, b0 = fam.affine
        na = a0 + eta1 * (b0 - a0)
        nb = a0 + eta2 * (b0 - a0)
        return MorseCerfFamily(
            fam.expr,
            eta_points=fam.eta_points,
            theta_points=fam.theta_points,
            affine=(na, nb),
            _root=(fam._f, fam._fp_theta, fam._fp_eta),
        )
    n = len(fam.grid)
    i1 = int(round(eta1 * (n - 1)))
    i2 = int(round(eta2 * (n - 1)))
    if not (0 <= i1 < n and 0 <= i2 < n):
        raise EventError("sub-family parameters outside the grid")
    if i1 <= i2:
        sel = list(range(i1, i2 + 1))
        steps = fam.steps[i1:i2]
        bounds = fam.bounds[i1:i2]
    else:
        sel = list(range(i1, i2 - 1, -1))
        steps = [_reverse_step(s) for s in fam.steps[i2:i1][::-1]]
        bounds = [(b, a) for a, b in fam.bounds[i2:i1][::-1]]
    comps = [fam.complexes[i] for i in sel]
    if len(comps) == 1:
        comps = comps * 2
        steps = [{"type": "pairing"}]
        bounds = [(Fraction(0), Fraction(0))]
    return AbstractCerfFamily(fam.period_group, comps, steps, bounds)


def _reverse_step(st):
    st = dict(st)
    kind = st.get("type")
    if kind == "birth":
        st["type"] = "death"
    elif kind == "death":
        st["type"] = "birth"
    elif kind == "slide":
        st["invert"] = not st.get("invert", False)
    return st


class ConcatFamily:
    """Concatenation wrapper: runs fam1 on [0, 1/2], fam2 on [1/2, 1].

    Variation contributions are the two lists joined, which is exactly
    the additivity of the variation under concatenation.
    """

    def __init__(self, fam1, fam2):
        self.parts = (fam1, fam2)
        self.is_morse = fam1.is_morse

    def variation_contributions(self):
        a = self.parts[0].variation_contributions()
        b = self.parts[1].variation_contributions()
        return list(a) + list(b)

    def group(self):
        return self.parts[0].group()


def concat(fam1, fam2):
    """Concatenation; endpoint complexes must agree at the junction."""
    if fam1.is_morse != fam2.is_morse:
        raise EventError("cannot concatenate a Morse with an abstract family")
    if not fam1.is_morse:
        if fam1.complexes[-1] is not fam2.complexes[0] and \
                fam1.complexes[-1].dump() != fam2.complexes[0].dump():
            raise EventError("families do not share the junction complex")
        comps = fam1.complexes + fam2.complexes[1:]
        steps = fam1.steps + fam2.steps
        bounds = fam1.bounds + fam2.bounds
        return AbstractCerfFamily(fam1.period_group, comps, steps, bounds)
    if fam1.complex_at(len(fam1.grid) - 1).complex.dump() != \
            fam2.complex_at(0).complex.dump():
        raise EventError("families do not share the junction complex")
    return ConcatFamily(fam1, fam2)


def gamma_translate(d: CerfDiagram, cap) -> CerfDiagram:
    """Shift the whole diagram by the deck action: values drop by omega(cap)."""
    shift = -float(d.group.omega(cap))
    branches = []
    for b in d.branches:
        nb = Branch(b.id, b.index)
        nb.etas = list(b.etas)
        nb.thetas = list(b.thetas)
        nb.values = [v + shift for v in b.values]
        branches.append(nb)
    cusps = [
        Cusp(c.eta, c.value + shift, c.branches, c.indices, c.kind) for c in d.cusps
    ]
    crossings = [
        Crossing(c.eta, c.value + shift, c.branch_a, c.branch_b, c.transverse)
        for c in d.crossings
    ]
    return CerfDiagram(branches, cusps, crossings, d.group, dict(d.metadata), d.family)
