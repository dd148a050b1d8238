"""Filtered chain complexes over Novikov scalars.

A complex stores one row/column per orbit; the infinite equivariant lift
is presented through the scalar coefficients.  A lifted generator
(orbit z, cap A) sits at level(z) - omega(A) with index index(z) - 2 c1(A).
Validation enforces the two matrix axioms: every boundary contribution
strictly lowers the level, and the boundary squares to zero.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .action import (
    NEG_INFINITY,
    POS_INFINITY,
    ActionValue,
    NovikovScalar,
    PeriodGroup,
)
from .errors import (
    ComplexStructureError,
    DegreeError,
    FiltrationError,
    NotACycleError,
)
from . import reduction
from .reduction import orthogonalize, reduce_vector, combination

__all__ = [
    "Orbit",
    "NovikovChain",
    "FilteredComplex",
    "SpecSet",
    "HomologyClass",
]


class Orbit:
    __slots__ = ("id", "level", "index")

    def __init__(self, id: str, level, index: int):
        self.id = str(id)
        self.level = ActionValue.coerce(level)
        self.index = int(index)

    def __repr__(self):
        return f"Orbit({self.id!r}, level={self.level!r}, index={self.index})"


class NovikovChain:
    """Finite orbit support with Novikov scalar coefficients."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group: PeriodGroup, coeffs: Mapping[str, NovikovScalar] | None = None):
        self.group = group
        self.coeffs = {}
        if coeffs:
            for k, s in coeffs.items():
                if not s.is_zero():
                    self.coeffs[str(k)] = s

    @staticmethod
    def unit(group: PeriodGroup, orbit_id: str, cap=None, coeff=1) -> "NovikovChain":
        cap = group.zero_cap if cap is None else cap
        return NovikovChain(group, {orbit_id: NovikovScalar.monomial(group, cap, coeff)})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other: "NovikovChain") -> "NovikovChain":
        return NovikovChain(self.group, reduction.vec_add(self.coeffs, other.coeffs))

    def __sub__(self, other: "NovikovChain") -> "NovikovChain":
        out = dict(self.coeffs)
        for k, s in other.coeffs.items():
            t = out.get(k)
            t = -s if t is None else t - s
            if t.is_zero():
                out.pop(k, None)
            else:
                out[k] = t
        return NovikovChain(self.group, out)

    def __neg__(self):
        return NovikovChain(self.group, {k: -s for k, s in self.coeffs.items()})

    def scaled(self, u) -> "NovikovChain":
        if isinstance(u, NovikovScalar):
            if u.is_zero():
                return NovikovChain(self.group)
            return NovikovChain(self.group, {k: u * s for k, s in self.coeffs.items()})
        return NovikovChain(
            self.group, {k: s.scale(Fraction(u)) for k, s in self.coeffs.items()}
        )

    def __eq__(self, other):
        if not isinstance(other, NovikovChain):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("NovikovChain is not hashable")

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({s!r})*{k}" for k, s in sorted(self.coeffs.items()))

    def to_json(self) -> list:
        return [
            {"orbit": k, "scalar": s.to_json()} for k, s in sorted(self.coeffs.items())
        ]

    @staticmethod
    def from_json(group: PeriodGroup, obj) -> "NovikovChain":
        return NovikovChain(
            group, {t["orbit"]: NovikovScalar.from_json(group, t["scalar"]) for t in obj}
        )


class SpecSet:
    """Action spectrum: orbit levels modulo translation by the period group."""

    __slots__ = ("group", "levels")

    def __init__(self, group: PeriodGroup, levels: Iterable[tuple]):
        self.group = group
        self.levels = tuple(levels)  # (orbit id, level)

    def contains(self, value: ActionValue) -> bool:
        return self.witness(value) is not None

    def witness(self, value: ActionValue):
        """(orbit id, cap) with level(orbit) - omega(cap) == value, or None."""
        value = ActionValue.coerce(value)
        for oid, lvl in self.levels:
            cap = self.group.cap_with_omega(lvl - value)
            if cap is not None:
                return oid, cap
        return None

    def __repr__(self):
        return f"SpecSet({[(o, repr(l)) for o, l in self.levels]})"


class HomologyClass:
    __slots__ = ("id", "degree", "representative")

    def __init__(self, id: str, degree: int, representative: NovikovChain):
        self.id = id
        self.degree = degree
        self.representative = representative

    def __repr__(self):
        return f"HomologyClass({self.id!r}, degree={self.degree})"


class FilteredComplex:
    """Orbit basis plus a strictly level-lowering boundary matrix."""

    def __init__(self, group: PeriodGroup, orbits: Iterable[Orbit], boundary: Mapping):
        """boundary maps source orbit id -> {target orbit id -> NovikovScalar}."""
        self.group = group
        self.orbits = tuple(sorted(orbits, key=lambda o: o.id))
        self._by_id = {}
        for o in self.orbits:
            if o.id in self._by_id:
                raise ComplexStructureError(f"duplicate orbit id {o.id!r}")
            self._by_id[o.id] = o
        self.boundary = {}
        for src, row in boundary.items():
            entries = {}
            for tgt, scalar in row.items():
                if scalar.is_zero():
                    continue
                entries[str(tgt)] = scalar
            if entries:
                self.boundary[str(src)] = entries
        self._validate()
        self._elim_cache: dict = {}
        self._homology_cache = None

    # -- validation -------------------------------------------------------

    def _validate(self):
        for src, row in self.boundary.items():
            if src not in self._by_id:
                raise ComplexStructureError(f"boundary from unknown orbit {src!r}")
            s_orb = self._by_id[src]
            for tgt, scalar in row.items():
                if tgt not in self._by_id:
                    raise ComplexStructureError(f"boundary into unknown orbit {tgt!r}")
                if not scalar.is_finite:
                    raise ComplexStructureError(
                        f"boundary entry {src}->{tgt} must have finite support"
                    )
                t_orb = self._by_id[tgt]
                for cap in scalar.num:
                    if s_orb.index - 1 != t_orb.index - 2 * self.group.c1(cap):
                        raise ComplexStructureError(
                            f"entry {src}->{tgt} cap {cap} breaks the degree convention"
                        )
                    drop = s_orb.level - t_orb.level + self.group.omega(cap)
                    if not drop > ActionValue.rational(0):
                        raise FiltrationError(
                            f"entry {src}->{tgt} cap {cap} does not lower the level "
                            f"(drop {drop!r})"
                        )
        for src in self.boundary:
            dd = self.boundary_of(NovikovChain.unit(self.group, src))
            dd = self.boundary_of(dd)
            if not dd.is_zero():
                raise ComplexStructureError(f"boundary does not square to zero at {src!r}")

    # -- basic accessors -----------------------------------------------------

    def orbit(self, oid: str) -> Orbit:
        try:
            return self._by_id[oid]
        except KeyError:
            raise ComplexStructureError(f"unknown orbit {oid!r}") from None

    def orbit_ids(self, index: int | None = None) -> list:
        return [o.id for o in self.orbits if index is None or o.index == index]

    def degrees(self) -> list:
        return sorted({o.index for o in self.orbits})

    def weight(self, oid: str) -> ActionValue:
        return self._by_id[oid].level

    # -- chain operations ------------------------------------------------------

    def degree_of(self, chain: NovikovChain):
        idxs = {self._by_id[k].index for k in chain.coeffs}
        if not idxs:
            return None
        if len(idxs) > 1:
            return "mixed"
        return idxs.pop()

    def _pure(self, chain: NovikovChain, degree: int | None) -> NovikovChain:
        deg = self.degree_of(chain)
        if deg == "mixed":
            if degree is None:
                raise DegreeError(
                    "mixed-degree chain: declare the degree to filter by"
                )
            kept = {
                k: s for k, s in chain.coeffs.items() if self._by_id[k].index == degree
            }
            return NovikovChain(self.group, kept)
        return chain

    def level(self, chain: NovikovChain, degree: int | None = None):
        chain = self._pure(chain, degree)
        return reduction.vec_level(chain.coeffs, self.weight)

    def peaks(self, chain: NovikovChain, degree: int | None = None) -> list:
        """Lifted generators (orbit id, cap) achieving the level."""
        chain = self._pure(chain, degree)
        return reduction.vec_peaks(chain.coeffs, self.weight)

    def boundary_of(self, chain: NovikovChain) -> NovikovChain:
        out: dict = {}
        for src, u in chain.coeffs.items():
            row = self.boundary.get(src)
            if not row:
                continue
            for tgt, e in row.items():
                add = u * e
                t = out.get(tgt)
                t = add if t is None else t + add
                if t.is_zero():
                    out.pop(tgt, None)
                else:
                    out[tgt] = t
        return NovikovChain(self.group, out)

    def is_cycle(self, chain: NovikovChain) -> bool:
        return self.boundary_of(chain).is_zero()

    # -- global quantities ----------------------------------------------------

    def filtration_gap(self):
        """Minimal level drop over all boundary contributions; +inf if d = 0."""
        gap = POS_INFINITY
        for src, row in self.boundary.items():
            s_orb = self._by_id[src]
            for tgt, scalar in row.items():
                t_orb = self._by_id[tgt]
                drop = s_orb.level - t_orb.level + scalar.valuation()
                if drop < gap:
                    gap = drop
        return gap

    def spectrum(self) -> SpecSet:
        return SpecSet(self.group, [(o.id, o.level) for o in self.orbits])

    # -- elimination layers -------------------------------------------------

    def _columns(self, degree: int):
        cols = []
        for oid in self.orbit_ids(degree):
            vec = self.boundary_of(NovikovChain.unit(self.group, oid)).coeffs
            cols.append((vec, {oid: NovikovScalar.one(self.group)}))
        return cols

    def elimination(self, degree: int):
        """(image basis in degree-1 with preimages, cycle basis in degree).

        The image basis is level-orthogonal with deterministic pivots.
        """
        if degree not in self._elim_cache:
            self._elim_cache[degree] = orthogonalize(
                self._columns(degree), self.weight
            )
        return self._elim_cache[degree]

    def boundary_basis(self, degree: int):
        """Level-orthogonal basis of the boundaries inside degree `degree`."""
        reduced, _ = self.elimination(degree + 1)
        return reduced

    def cycle_basis(self, degree: int):
        reduced, kernel = self.elimination(degree)
        pivot_ids = []  # orbits not hit as elimination sources stay independent
        cycles = [NovikovChain(self.group, k) for k in kernel]
        del pivot_ids
        return cycles

    # -- homology ------------------------------------------------------------

    def homology_basis(self) -> list:
        """Classes per degree with explicit representative cycles."""
        if self._homology_cache is None:
            classes = []
            for k in self.degrees():
                boundaries = self.boundary_basis(k)
                reps = []
                for cyc in self.cycle_basis(k):
                    res, _ = reduce_vector(cyc.coeffs, boundaries, self.weight)
                    if res:
                        reps.append((res, dict(res)))
                independent, _ = orthogonalize(reps, self.weight)
                for i, r in enumerate(independent):
                    classes.append(
                        HomologyClass(f"h{k}_{i}", k, NovikovChain(self.group, r.companion))
                    )
            self._homology_cache = classes
        return self._homology_cache

    def homology_class(self, class_id: str) -> HomologyClass:
        for c in self.homology_basis():
            if c.id == class_id:
                return c
        raise ComplexStructureError(f"unknown homology class {class_id!r}")

    def homologous(self, a: NovikovChain, b: NovikovChain):
        """(True, witness) iff a - b bounds; the witness has that boundary."""
        for c in (a, b):
            if not self.is_cycle(c):
                raise NotACycleError("homologous() expects cycles")
        diff = a - b
        if diff.is_zero():
            return True, NovikovChain(self.group)
        deg = self.degree_of(diff)
        if deg == "mixed":
            raise DegreeError("homologous() expects equal pure degrees")
        boundaries = self.boundary_basis(deg)
        res, coeffs = reduce_vector(diff.coeffs, boundaries, self.weight)
        if res:
            return False, None
        delta = combination(coeffs, boundaries)
        return True, NovikovChain(self.group, delta)

    # -- presentation -----------------------------------------------------------

    def dump(self) -> str:
        """Canonical textual form for golden tests."""
        lines = []
        lines.append(f"group {self.group.to_json()}")
        for o in self.orbits:
            lines.append(f"orbit {o.id} level {o.level!r} index {o.index}")
        for src in sorted(self.boundary):
            for tgt in sorted(self.boundary[src]):
                lines.append(f"d {src} -> {tgt}: {self.boundary[src][tgt]!r}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "orbits": [
                {"id": o.id, "level": o.level.to_json(), "index": o.index}
                for o in self.orbits
            ],
            "boundary": [
                {"from": src, "to": tgt, "scalar": self.boundary[src][tgt].to_json()}
                for src in sorted(self.boundary)
                for tgt in sorted(self.boundary[src])
            ],
        }

    @staticmethod
    def from_json(group: PeriodGroup, obj: Mapping) -> "FilteredComplex":
        orbits = [
            Orbit(
                spec["id"],
                ActionValue.from_json(spec["level"], group.d),
                spec["index"],
            )
            for spec in obj["orbits"]
        ]
        boundary: dict = {}
        for e in obj.get("boundary", []):
            row = boundary.setdefault(e["from"], {})
            s = NovikovScalar.from_json(group, e["scalar"])
            row[e["to"]] = row[e["to"]] + s if e["to"] in row else s
        return FilteredComplex(group, orbits, boundary)
