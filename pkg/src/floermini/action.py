"""Exact arithmetic for period groups, action values and Novikov scalars.

Values live in the quadratic field Q(sqrt(d)) for one declared non-square
d >= 2 (d = 0 means purely rational).  Ordering is decided by exact sign
computation in the field, never by floating point.

Novikov scalars are stored as exact fractions num/den of finitely supported
group-ring elements over the period group.  Any truncation window can be
materialized deterministically from the fraction, so "widening a window"
is recomputation, never mutation.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    BasisMismatchError,
    ConstantClassError,
    IndependenceError,
    RankMismatchError,
    ZeroScalarError,
)

__all__ = [
    "ActionValue",
    "PeriodGroup",
    "NovikovScalar",
    "NEG_INFINITY",
    "POS_INFINITY",
    "make_period_group",
    "omega_eval",
    "c1_eval",
    "compare",
    "scalar_valuation",
    "leading_term",
    "invert",
]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise ConstantClassError(f"not an exact rational: {x!r}")


def _is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


class _Infinity:
    """Signed infinity sentinel, comparable against ActionValue."""

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __repr__(self):
        return "+inf" if self.sign > 0 else "-inf"

    def __eq__(self, other):
        return isinstance(other, _Infinity) and other.sign == self.sign

    def __hash__(self):
        return hash(("infinity", self.sign))

    def __lt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign > other.sign
        return self.sign > 0

    def __ge__(self, other):
        return self == other or self > other

    def __neg__(self):
        return _Infinity(-self.sign)

    def __add__(self, other):
        if isinstance(other, _Infinity) and other.sign != self.sign:
            raise ArithmeticError("inf - inf")
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, _Infinity) and other.sign == self.sign:
            raise ArithmeticError("inf - inf")
        return self

    def __rsub__(self, other):
        return -self


NEG_INFINITY = _Infinity(-1)
POS_INFINITY = _Infinity(+1)


class ActionValue:
    """Exact number q + r*sqrt(d); total order agrees with the real embedding."""

    __slots__ = ("q", "r", "d")

    def __init__(self, q=0, r=0, d: int = 0):
        q = _as_fraction(q)
        r = _as_fraction(r)
        if r == 0:
            d = 0
        else:
            if not isinstance(d, int) or d < 2 or _is_square(d):
                raise ConstantClassError(
                    f"irrational base must be a non-square integer >= 2, got {d}"
                )
        self.q = q
        self.r = r
        self.d = d

    @staticmethod
    def rational(x) -> "ActionValue":
        return ActionValue(_as_fraction(x))

    @staticmethod
    def sqrt(d: int, scale=1) -> "ActionValue":
        return ActionValue(0, _as_fraction(scale), d)

    @staticmethod
    def coerce(x) -> "ActionValue":
        if isinstance(x, ActionValue):
            return x
        return ActionValue.rational(x)

    # -- basis bookkeeping -------------------------------------------------

    def _common_d(self, other: "ActionValue") -> int:
        if self.d == 0:
            return other.d
        if other.d == 0 or other.d == self.d:
            return self.d
        raise BasisMismatchError(f"mixed irrational bases sqrt({self.d}) and sqrt({other.d})")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, _Infinity):
            return other
        other = ActionValue.coerce(other)
        d = self._common_d(other)
        return ActionValue(self.q + other.q, self.r + other.r, d)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, _Infinity):
            return -other
        other = ActionValue.coerce(other)
        d = self._common_d(other)
        return ActionValue(self.q - other.q, self.r - other.r, d)

    def __rsub__(self, other):
        return ActionValue.coerce(other) - self

    def __neg__(self):
        return ActionValue(-self.q, -self.r, self.d)

    def __mul__(self, other):
        other = ActionValue.coerce(other)
        d = self._common_d(other)
        if self.r != 0 and other.r != 0:
            return ActionValue(
                self.q * other.q + self.r * other.r * d,
                self.q * other.r + self.r * other.q,
                d,
            )
        return ActionValue(self.q * other.q, self.q * other.r + self.r * other.q, d)

    __rmul__ = __mul__

    def scaled(self, c) -> "ActionValue":
        c = _as_fraction(c)
        return ActionValue(self.q * c, self.r * c, self.d)

    # -- ordering ----------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of q + r*sqrt(d)."""
        q, r = self.q, self.r
        if r == 0:
            return (q > 0) - (q < 0)
        if q == 0:
            return (r > 0) - (r < 0)
        if q > 0 and r > 0:
            return 1
        if q < 0 and r < 0:
            return -1
        # opposite signs: compare q^2 against r^2 d, sign follows the larger side
        lhs = q * q
        rhs = r * r * self.d
        if lhs == rhs:  # impossible for non-square d, kept defensive
            return 0
        if q > 0:
            return 1 if lhs > rhs else -1
        return -1 if lhs > rhs else 1

    def is_zero(self) -> bool:
        return self.q == 0 and self.r == 0

    def __eq__(self, other):
        if isinstance(other, _Infinity):
            return False
        if not isinstance(other, (ActionValue, int, Fraction)):
            return NotImplemented
        other = ActionValue.coerce(other)
        if self.d and other.d and self.d != other.d:
            return False  # sqrt(d) and sqrt(d') are never rationally related
        return self.q == other.q and self.r == other.r

    def __hash__(self):
        return hash((self.q, self.r, self.d))

    def __lt__(self, other):
        if isinstance(other, _Infinity):
            return other.sign > 0
        return (self - ActionValue.coerce(other)).sign() < 0

    def __le__(self, other):
        if isinstance(other, _Infinity):
            return other.sign > 0
        return (self - ActionValue.coerce(other)).sign() <= 0

    def __gt__(self, other):
        if isinstance(other, _Infinity):
            return other.sign < 0
        return (self - ActionValue.coerce(other)).sign() > 0

    def __ge__(self, other):
        if isinstance(other, _Infinity):
            return other.sign < 0
        return (self - ActionValue.coerce(other)).sign() >= 0

    # -- presentation --------------------------------------------------------

    def __float__(self):
        v = float(self.q)
        if self.r != 0:
            v += float(self.r) * math.sqrt(self.d)
        return v

    def __repr__(self):
        if self.r == 0:
            return f"{self.q}"
        if self.q == 0:
            return f"{self.r}*sqrt({self.d})"
        return f"{self.q}{'+' if self.r > 0 else ''}{self.r}*sqrt({self.d})"

    def to_json(self) -> dict:
        return {"q": str(self.q), "irr": str(self.r), "approx": float(self)}

    @staticmethod
    def from_json(obj: Mapping, d: int = 0) -> "ActionValue":
        return ActionValue(Fraction(obj.get("q", "0")), Fraction(obj.get("irr", "0")), d)


class PeriodGroup:
    """Finitely generated subgroup of R with evaluation maps omega and c1.

    Generators are exact constants, each purely rational or a rational
    multiple of the one declared sqrt(d); they must be rationally
    independent, which makes omega injective on Z^rank and caps the rank
    at two.  Injectivity gives every nonzero scalar a unique leading term.
    """

    __slots__ = ("values", "c1_weights", "rank", "d")

    def __init__(self, values: Iterable[ActionValue], c1_weights: Iterable[int]):
        values = tuple(ActionValue.coerce(v) for v in values)
        c1_weights = tuple(int(w) for w in c1_weights)
        if len(values) != len(c1_weights):
            raise ConstantClassError("generator values and c1 weights differ in length")
        d = 0
        for v in values:
            if v.q != 0 and v.r != 0:
                raise ConstantClassError(
                    f"generator {v!r} mixes the rational and irrational basis"
                )
            if v.d:
                if d and v.d != d:
                    raise BasisMismatchError("more than one declared square root")
                d = v.d
        # rational independence over the basis {1, sqrt(d)}
        for v in values:
            if v.is_zero():
                raise IndependenceError("zero generator value")
        rationals = [v for v in values if v.r == 0]
        irrationals = [v for v in values if v.r != 0]
        if len(rationals) > 1 or len(irrationals) > 1:
            raise IndependenceError(
                "generator values are rationally dependent "
                "(at most one rational and one sqrt(d)-multiple are independent)"
            )
        self.values = values
        self.c1_weights = c1_weights
        self.rank = len(values)
        self.d = d

    @property
    def zero_cap(self) -> tuple:
        return (0,) * self.rank

    def check_cap(self, cap) -> tuple:
        cap = tuple(int(c) for c in cap)
        if len(cap) != self.rank:
            raise RankMismatchError(f"cap {cap} has rank {len(cap)}, group has {self.rank}")
        return cap

    def omega(self, cap) -> ActionValue:
        cap = self.check_cap(cap)
        out = ActionValue(0, 0, self.d)
        for c, v in zip(cap, self.values):
            if c:
                out = out + v.scaled(c)
        return out

    def c1(self, cap) -> int:
        cap = self.check_cap(cap)
        return sum(c * w for c, w in zip(cap, self.c1_weights))

    @property
    def is_discrete(self) -> bool:
        """Discrete image iff at most one independent generator value."""
        return self.rank <= 1

    @property
    def is_dense(self) -> bool:
        return self.rank >= 2

    def cap_with_omega(self, target: ActionValue):
        """The unique cap with omega(cap) == target, or None.

        Uniqueness comes from independence; existence is an integrality
        check on the rational coordinates.
        """
        target = ActionValue.coerce(target)
        if target.d and self.d and target.d != self.d:
            raise BasisMismatchError("membership query over a different sqrt base")
        coeffs = []
        rat = [v.q for v in self.values]
        irr = [v.r for v in self.values]
        # values are independent: solve one rational equation per basis line
        coords = {}
        for i, v in enumerate(self.values):
            if v.r == 0:
                coords["q"] = (i, v.q)
            else:
                coords["r"] = (i, v.r)
        del rat, irr
        sol = [Fraction(0)] * self.rank
        if "q" in coords:
            i, base = coords["q"]
            sol[i] = target.q / base
        elif target.q != 0:
            return None
        if "r" in coords:
            i, base = coords["r"]
            sol[i] = target.r / base
        elif target.r != 0:
            return None
        for x in sol:
            if x.denominator != 1:
                return None
            coeffs.append(int(x))
        return tuple(coeffs)

    def contains_omega(self, target: ActionValue) -> bool:
        return self.cap_with_omega(target) is not None

    def __eq__(self, other):
        return (
            isinstance(other, PeriodGroup)
            and self.values == other.values
            and self.c1_weights == other.c1_weights
        )

    def __hash__(self):
        return hash((self.values, self.c1_weights))

    def __repr__(self):
        vals = ", ".join(repr(v) for v in self.values)
        return f"PeriodGroup([{vals}], c1={list(self.c1_weights)})"

    def to_json(self) -> dict:
        gens = []
        for v in self.values:
            if v.r == 0:
                gens.append({"rational": str(v.q)})
            else:
                gens.append({"sqrt": v.d, "scale": str(v.r)})
        return {"generators": gens, "c1": list(self.c1_weights)}

    @staticmethod
    def from_json(obj: Mapping) -> "PeriodGroup":
        values = []
        for g in obj.get("generators", []):
            if "rational" in g:
                values.append(ActionValue.rational(Fraction(g["rational"])))
            elif "sqrt" in g:
                values.append(ActionValue.sqrt(int(g["sqrt"]), Fraction(g.get("scale", "1"))))
            else:
                raise ConstantClassError(f"unsupported generator spec {g!r}")
        return PeriodGroup(values, obj.get("c1", [0] * len(values)))


TRIVIAL_GROUP = PeriodGroup([], [])


def make_period_group(values, c1_weights) -> PeriodGroup:
    """Build a period group from exact constants; see PeriodGroup."""
    return PeriodGroup([ActionValue.coerce(v) for v in values], c1_weights)


def omega_eval(cap, group: PeriodGroup) -> ActionValue:
    return group.omega(cap)


def c1_eval(cap, group: PeriodGroup) -> int:
    return group.c1(cap)


def compare(a: ActionValue, b: ActionValue) -> int:
    """-1, 0, +1 per the real embedding; equality iff identical coefficients."""
    return (ActionValue.coerce(a) - ActionValue.coerce(b)).sign()


# ---------------------------------------------------------------------------
# Novikov scalars
# ---------------------------------------------------------------------------


def _terms_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ca, va in a.items():
        for cb, vb in b.items():
            key = tuple(x + y for x, y in zip(ca, cb)) if ca else ca
            s = out.get(key)
            s = va * vb if s is None else s + va * vb
            if s:
                out[key] = s
            elif key in out:
                del out[key]
    return out


def _terms_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for c, v in b.items():
        s = out.get(c)
        s = v if s is None else s + v
        if s:
            out[c] = s
        elif c in out:
            del out[c]
    return out


def _terms_scale(a: dict, c: Fraction, shift: tuple) -> dict:
    if not a:
        return {}
    if not shift or all(s == 0 for s in shift):
        return {cap: v * c for cap, v in a.items()}
    return {tuple(x + y for x, y in zip(cap, shift)): v * c for cap, v in a.items()}


class NovikovScalar:
    """Element of the Novikov field presented as num/den of finite series.

    The support map below any window level is materialized on demand with
    `terms_below`; the result is guaranteed complete below the requested
    window and recomputed deterministically when the window widens.
    """

    __slots__ = ("group", "num", "den")

    def __init__(self, group: PeriodGroup, num: dict, den: dict | None = None):
        self.group = group
        self.num = {k: v for k, v in num.items() if v}
        if den is None:
            den = {group.zero_cap: Fraction(1)}
        den = {k: v for k, v in den.items() if v}
        if not den:
            raise ZeroScalarError("zero denominator")
        self.num, self.den = self._normalized(self.num, den)

    def _leading(self, terms: dict):
        """Support element of minimal omega (unique: omega is injective)."""
        best = None
        best_val = None
        for cap in terms:
            val = self.group.omega(cap)
            if best is None or val < best_val:
                best, best_val = cap, val
        return best, terms[best], best_val

    def _normalized(self, num: dict, den: dict):
        cap0, c0, _ = self._leading(den)
        if c0 == 1 and all(x == 0 for x in cap0):
            return num, den
        shift = tuple(-x for x in cap0)
        inv = 1 / c0
        return _terms_scale(num, inv, shift), _terms_scale(den, inv, shift)

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(group: PeriodGroup) -> "NovikovScalar":
        return NovikovScalar(group, {})

    @staticmethod
    def one(group: PeriodGroup) -> "NovikovScalar":
        return NovikovScalar(group, {group.zero_cap: Fraction(1)})

    @staticmethod
    def monomial(group: PeriodGroup, cap, coeff=1) -> "NovikovScalar":
        cap = group.check_cap(cap)
        return NovikovScalar(group, {cap: _as_fraction(coeff)})

    @staticmethod
    def from_terms(group: PeriodGroup, terms: Mapping) -> "NovikovScalar":
        return NovikovScalar(
            group, {group.check_cap(c): _as_fraction(v) for c, v in terms.items()}
        )

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    @property
    def is_finite(self) -> bool:
        return self.den == {self.group.zero_cap: Fraction(1)}

    @property
    def exact_window(self):
        """Every window is materializable from the fraction presentation."""
        return POS_INFINITY

    # -- field arithmetic ------------------------------------------------------

    def _check(self, other: "NovikovScalar"):
        if self.group != other.group:
            raise BasisMismatchError("scalars over different period groups")

    def __add__(self, other: "NovikovScalar") -> "NovikovScalar":
        self._check(other)
        if self.den == other.den:
            return NovikovScalar(self.group, _terms_add(self.num, other.num), self.den)
        num = _terms_add(_terms_mul(self.num, other.den), _terms_mul(other.num, self.den))
        return NovikovScalar(self.group, num, _terms_mul(self.den, other.den))

    def __neg__(self):
        return NovikovScalar(
            self.group, {c: -v for c, v in self.num.items()}, dict(self.den)
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "NovikovScalar") -> "NovikovScalar":
        self._check(other)
        return NovikovScalar(
            self.group, _terms_mul(self.num, other.num), _terms_mul(self.den, other.den)
        )

    def __truediv__(self, other: "NovikovScalar") -> "NovikovScalar":
        self._check(other)
        if other.is_zero():
            raise ZeroScalarError("division by the zero scalar")
        return NovikovScalar(
            self.group, _terms_mul(self.num, other.den), _terms_mul(self.den, other.num)
        )

    def scale(self, c) -> "NovikovScalar":
        c = _as_fraction(c)
        return NovikovScalar(
            self.group, {cap: v * c for cap, v in self.num.items()}, dict(self.den)
        )

    def invert(self) -> "NovikovScalar":
        if self.is_zero():
            raise ZeroScalarError("the zero scalar has no inverse")
        return NovikovScalar(self.group, self.den, self.num)

    def __eq__(self, other):
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        self._check(other)
        lhs = _terms_mul(self.num, other.den)
        rhs = _terms_mul(other.num, self.den)
        return lhs == rhs

    def __hash__(self):
        raise TypeError("NovikovScalar is not hashable")

    # -- valuation ---------------------------------------------------------

    def valuation(self):
        """min omega over the support; +inf sentinel for the zero scalar."""
        if self.is_zero():
            return POS_INFINITY
        _, _, val = self._leading(self.num)
        return val  # den is normalized to valuation 0

    def leading_term(self):
        """(cap, coefficient) of the minimal-omega support element."""
        if self.is_zero():
            raise ZeroScalarError("the zero scalar has no leading term")
        cap, coeff, _ = self._leading(self.num)
        return cap, coeff

    # -- windowed materialization ----------------------------------------------

    def terms_below(self, window) -> dict:
        """All support terms with omega(cap) <= window, guaranteed complete.

        For a genuine fraction this expands the geometric series of the
        denominator far enough that omitted terms sit strictly above the
        window.  Deterministic for every requested window.
        """
        if self.is_zero():
            return {}
        if self.is_finite:
            out = {c: v for c, v in self.num.items() if self.group.omega(c) <= window}
            return out
        # den = 1 + w with valuation(w) = delta > 0
        w = dict(self.den)
        del w[self.group.zero_cap]
        if not w:
            return {c: v for c, v in self.num.items() if self.group.omega(c) <= window}
        _, _, delta = self._leading(w)
        acc = dict(self.num)  # running num * (-w)^k
        out: dict = {}
        reach = self.valuation()
        while True:
            for c, v in acc.items():
                if self.group.omega(c) <= window:
                    s = out.get(c)
                    s = v if s is None else s + v
                    if s:
                        out[c] = s
                    elif c in out:
                        del out[c]
            reach = reach + delta
            if isinstance(window, _Infinity):
                raise ZeroScalarError("cannot materialize an infinite window")
            if reach > window:
                return out
            acc = _terms_mul(acc, {c: -v for c, v in w.items()})
            acc = {c: v for c, v in acc.items() if self.group.omega(c) <= window}
            if not acc:
                return out

    def truncated(self, window) -> "NovikovScalar":
        """Finite scalar agreeing with self on all terms at or below window."""
        return NovikovScalar(self.group, self.terms_below(window))

    # -- presentation --------------------------------------------------------

    def _fmt_terms(self, terms: dict) -> str:
        if not terms:
            return "0"
        parts = []
        for cap in sorted(terms):
            v = terms[cap]
            if self.group.rank == 0 or all(c == 0 for c in cap):
                parts.append(f"{v}")
            else:
                parts.append(f"{v}*q^{list(cap)}")
        return " + ".join(parts)

    def __repr__(self):
        s = self._fmt_terms(self.num)
        if self.is_finite:
            return s
        return f"({s})/({self._fmt_terms(self.den)})"

    def to_json(self) -> list:
        if not self.is_finite:
            raise ZeroScalarError("only finite scalars serialize; truncate first")
        return [
            {"cap": list(cap), "coeff": str(v)} for cap, v in sorted(self.num.items())
        ]

    @staticmethod
    def from_json(group: PeriodGroup, obj) -> "NovikovScalar":
        return NovikovScalar.from_terms(
            group, {tuple(t["cap"]): Fraction(t["coeff"]) for t in obj}
        )


def scalar_valuation(u: NovikovScalar):
    return u.valuation()


def leading_term(u: NovikovScalar):
    return u.leading_term()


def invert(u: NovikovScalar) -> NovikovScalar:
    return u.invert()
