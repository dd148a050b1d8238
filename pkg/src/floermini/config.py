"""Run configuration: schema validation and object construction."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .action import PeriodGroup, make_period_group
from .cerf import DEFAULT_ETA_GRID, AbstractCerfFamily, MorseCerfFamily
from .complexes import FilteredComplex
from .errors import ConfigError
from .morse import DEFAULT_GRID, MorseFunction1D

KNOWN_TASKS = (
    "rho",
    "spectrum",
    "diagram",
    "continuation",
    "rho_curve",
    "hofer",
    "validate",
)

DEFAULT_TOLERANCES = {
    "eta_event": 1e-6,
    "theta_refine": 1e-9,
    "value_quantum": "1e-12",
    "slope_check": "10*(grid step)^2",
}


class RunConfig:
    def __init__(self, raw: Mapping):
        if not isinstance(raw, Mapping):
            raise ConfigError("config root must be a JSON object")
        self.raw = raw
        if "tasks" not in raw:
            raise ConfigError("missing required field: tasks")
        tasks = raw["tasks"]
        if not isinstance(tasks, list) or not tasks:
            raise ConfigError("field 'tasks' must be a non-empty list")
        for t in tasks:
            if t not in KNOWN_TASKS:
                raise ConfigError(f"unknown task {t!r}; known: {KNOWN_TASKS}")
        self.tasks = list(tasks)
        self.group = self._group(raw.get("period_group"))
        self.seed = int(raw.get("seed", 0))
        grid = raw.get("grid", {})
        if not isinstance(grid, Mapping):
            raise ConfigError("field 'grid' must be an object")
        self.theta_grid = int(grid.get("theta", DEFAULT_GRID))
        self.eta_grid = int(grid.get("eta", DEFAULT_ETA_GRID))
        self.eps = Fraction(str(raw.get("eps", 1)))
        self.classes = raw.get("classes", "all")
        self.out = raw.get("out")
        self.tolerances = dict(DEFAULT_TOLERANCES)
        self.tolerances.update(raw.get("tolerances", {}))
        self.ghost_translates = int(raw.get("ghost_translates", 0))

        sources = [k for k in ("complex", "morse_function", "family") if k in raw]
        if len(sources) > 1:
            raise ConfigError(f"give exactly one of complex/morse_function/family")
        self.source_kind = sources[0] if sources else None
        needs_source = set(self.tasks) - {"validate"}
        if needs_source and not self.source_kind:
            raise ConfigError(
                "missing input: one of complex, morse_function or family"
            )

    def _group(self, spec) -> PeriodGroup:
        if spec is None:
            return make_period_group([], [])
        try:
            return PeriodGroup.from_json(spec)
        except Exception as e:
            raise ConfigError(f"bad period_group: {e}") from None

    # -- object construction -------------------------------------------------

    def build_complex(self) -> FilteredComplex:
        spec = self.raw.get("complex")
        if spec is None:
            raise ConfigError("task needs a 'complex' input")
        try:
            return FilteredComplex.from_json(self.group, spec)
        except ConfigError:
            raise
        except Exception as e:
            raise ConfigError(f"bad complex spec: {e}") from None

    def build_function(self) -> MorseFunction1D:
        spec = self.raw.get("morse_function")
        if spec is None:
            raise ConfigError("task needs a 'morse_function' input")
        return _function_from_json(spec, self.theta_grid)

    def build_family(self):
        spec = self.raw.get("family")
        if spec is None:
            raise ConfigError("task needs a 'family' input")
        kind = spec.get("kind", "closed_form")
        if kind == "closed_form":
            if "expr" not in spec:
                raise ConfigError("closed_form family needs 'expr'")
            return MorseCerfFamily(
                spec["expr"],
                eta_points=int(spec.get("eta_points", self.eta_grid)),
                theta_points=int(spec.get("theta_points", self.theta_grid)),
            )
        if kind == "abstract":
            comps = [
                FilteredComplex.from_json(self.group, c)
                for c in spec.get("complexes", [])
            ]
            return AbstractCerfFamily(
                self.group,
                comps,
                spec.get("steps"),
                [(Fraction(str(a)), Fraction(str(b)))
                 for a, b in spec.get("bounds", [])] or None,
            )
        raise ConfigError(f"unknown family kind {kind!r}")


def _function_from_json(spec: Mapping, default_grid: int) -> MorseFunction1D:
    kind = spec.get("kind", "closed_form")
    drift = Fraction(str(spec.get("drift", 0)))
    if kind == "closed_form":
        if "expr" not in spec:
            raise ConfigError("closed_form function needs 'expr'")
        return MorseFunction1D.closed_form(
            spec["expr"], N=int(spec.get("grid", default_grid)), drift=drift
        )
    if kind == "samples":
        values = spec.get("values")
        if not values:
            raise ConfigError("samples function needs 'values'")
        return MorseFunction1D.from_samples([float(v) for v in values], drift=drift)
    raise ConfigError(f"unknown function kind {kind!r}")
