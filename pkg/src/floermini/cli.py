"""Configuration-driven runner and artifact writer.

Exit codes: 0 success, 2 validation failure (non-generic family and the
like), 1 configuration or engine error; failures emit a structured JSON
object on standard error.  Re-running a config produces byte-identical
artifacts.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .action import ActionValue
from .cerf import bifurcation_diagram, classify_events
from .config import RunConfig
from .continuation import (
    classify_entries,
    continuation_map,
    dichotomy_constant,
    rho_curve,
    step_maps,
    variation_bounds,
)
from .errors import ConfigError, FloerminiError, NonCerfError, ValidationFailure
from .hofer import gamma as hofer_gamma
from .morse import build_circle_valued, build_s1_morse
from .render import render_curve_svg, render_diagram_svg
from .spectral import check_spectrality, rho


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode()


def _write(path: Path, data) -> None:
    if isinstance(data, str):
        data = data.encode()
    path.write_bytes(data)


def _csv(rows, header) -> str:
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(str(c) for c in row))
    return "\n".join(out) + "\n"


def _fmt_float(x: float) -> str:
    return f"{x:.12g}"


class Runner:
    def __init__(self, cfg: RunConfig, out_dir: Path):
        self.cfg = cfg
        self.out = out_dir
        self.report: dict = {}
        self.exit_code = 0
        self._diagram = None
        self._family = None

    # -- shared inputs -------------------------------------------------------

    def family(self):
        if self._family is None:
            self._family = self.cfg.build_family()
        return self._family

    def diagram(self):
        if self._diagram is None:
            self._diagram = bifurcation_diagram(self.family())
        return self._diagram

    def source_complex(self):
        kind = self.cfg.source_kind
        if kind == "complex":
            return self.cfg.build_complex()
        if kind == "morse_function":
            f = self.cfg.build_function()
            if f.drift != 0:
                return build_circle_valued(f, self.cfg.eps).complex
            return build_s1_morse(f, self.cfg.eps).complex
        raise ConfigError("task needs a complex or morse_function input")

    # -- tasks ------------------------------------------------------------

    def task_rho(self):
        X = self.source_complex()
        wanted = self.cfg.classes
        classes = X.homology_basis()
        if wanted != "all":
            classes = [X.homology_class(c) for c in wanted]
        results = []
        for c in classes:
            res = rho(X, c)
            cert = check_spectrality(X, c)
            entry = res.to_json()
            entry["spectral"] = bool(cert.ok)
            results.append(entry)
        self.report["rho"] = results

    def task_spectrum(self):
        X = self.source_complex()
        self.report["spectrum"] = {
            "orbit_levels": [
                {"orbit": oid, "level": lvl.to_json()}
                for oid, lvl in X.spectrum().levels
            ],
            "gap": X.filtration_gap().__repr__(),
        }

    def task_diagram(self):
        d = self.diagram()
        rows = []
        for b in sorted(d.branches, key=lambda b: b.id):
            for eta, v in zip(b.etas, b.values):
                rows.append((b.id, _fmt_float(eta), _fmt_float(v), b.index))
        _write(self.out / "branches.csv", _csv(rows, ["branch_id", "eta", "value", "index"]))
        ev = []
        for c in sorted(d.cusps, key=lambda c: c.eta):
            ev.append(("cusp:" + c.kind, _fmt_float(c.eta), _fmt_float(c.value),
                       c.branches[0], c.branches[1]))
        for c in sorted(d.crossings, key=lambda c: c.eta):
            ev.append(("crossing", _fmt_float(c.eta), _fmt_float(c.value),
                       c.branch_a, c.branch_b))
        _write(self.out / "events.csv",
               _csv(ev, ["type", "eta", "value", "branch_a", "branch_b"]))
        _write(self.out / "diagram.svg",
               render_diagram_svg(d, self.cfg.ghost_translates))
        report = classify_events(d)
        self.report["diagram"] = {
            "branches": len(d.branches),
            "cusps": len(d.cusps),
            "crossings": len(d.crossings),
            "valid": report.ok,
            "violations": report.violations,
            "metadata": d.metadata,
        }
        if not report.ok:
            self.exit_code = 2

    def task_continuation(self):
        fam = self.family()
        h = continuation_map(fam)
        vb = variation_bounds(fam)
        a0 = dichotomy_constant(fam)
        eps = ActionValue.rational(
            max((a + b for a, b in vb.contributions), default=0)
        )
        entry = {
            "map": h.to_json(),
            "e_minus": vb.e_minus.to_json(),
            "e_plus": vb.e_plus.to_json(),
            "dichotomy_constant": (
                a0.to_json() if isinstance(a0, ActionValue) else repr(a0)
            ),
        }
        # the thin-or-slide dichotomy is a short-run statement: classify the
        # per-interval step maps, never the accumulated composite
        if a0 > eps + eps:
            thin = slides = 0
            violations = []
            for step in step_maps(fam):
                cls = classify_entries(step, a0, eps)
                thin += len(cls.thin)
                slides += len(cls.slides)
                violations += [
                    [list(k), repr(s), msg] for k, s, msg in cls.violations
                ]
            entry["dichotomy"] = {
                "thin": thin,
                "slides": slides,
                "violations": violations,
            }
            if violations:
                self.exit_code = 2
        self.report["continuation"] = entry

    def task_rho_curve(self):
        fam = self.family()
        cls = "point" if self.cfg.classes == "all" else self.cfg.classes[0]
        curve = rho_curve(fam, cls)
        rows = []
        etas, values = [], []
        for eta, res in curve:
            orbit, cap = res.witness
            rows.append((
                _fmt_float(eta),
                _fmt_float(float(res.value)),
                orbit,
                "[" + " ".join(str(c) for c in cap) + "]",
            ))
            etas.append(eta)
            values.append(res.value)
        _write(self.out / "rho_curve.csv",
               _csv(rows, ["eta", "value", "peak_orbit", "peak_cap"]))
        _write(self.out / "rho_curve.svg", render_curve_svg(etas, values))
        self.report["rho_curve"] = {
            "class": cls,
            "samples": len(rows),
            "first": values[0].to_json(),
            "last": values[-1].to_json(),
        }

    def task_hofer(self):
        f = self.cfg.build_function()
        rep = hofer_gamma(f, self.cfg.eps)
        self.report["hofer"] = rep.to_json()
        sweep = int(self.cfg.raw.get("hofer_sweep", 0))
        if sweep:
            self._hofer_sweep(sweep)

    def _hofer_sweep(self, count: int):
        """Random-pair property table: unit-class values of f, g and f+g,
        the subadditivity verdict, and the continuity bound per row."""
        import random
        from fractions import Fraction

        from .hofer import hofer_quantities, rho_unit
        from .morse import MorseFunction1D

        rng = random.Random(self.cfg.seed)

        def rand_function():
            terms = []
            for k in (1, 2, 3):
                a = rng.randint(-8, 8)
                b = rng.randint(-8, 8)
                if a:
                    terms.append(f"({a}/8)*cos({k}*theta)")
                if b:
                    terms.append(f"({b}/8)*sin({k}*theta)")
            expr = " + ".join(terms) if terms else "cos(theta)"
            return expr, MorseFunction1D.closed_form(expr, N=1 << 12)

        slack = Fraction(4, 10**12)
        rows = []
        while len(rows) < count:
            try:
                expr_f, f = rand_function()
                expr_g, g = rand_function()
                rf = rho_unit(f, self.cfg.eps)
                rg = rho_unit(g, self.cfg.eps)
                rsum = rho_unit(f.added(g), self.cfg.eps)
                _, _, dist = hofer_quantities(f.added(g.negated()), self.cfg.eps)
            except FloerminiError:
                continue
            subadditive = rsum <= rf + rg + ActionValue.rational(slack)
            gap = rf - rg
            mag = gap if gap >= ActionValue.rational(0) else -gap
            rows.append((
                expr_f.replace(",", ";"),
                expr_g.replace(",", ";"),
                _fmt_float(float(rf)),
                _fmt_float(float(rg)),
                _fmt_float(float(rsum)),
                int(subadditive),
                int(mag <= dist + ActionValue.rational(slack)),
            ))
        _write(
            self.out / "hofer_sweep.csv",
            _csv(rows, ["f", "g", "rho_f", "rho_g", "rho_sum",
                        "subadditive", "continuity"]),
        )
        self.report["hofer_sweep"] = {
            "rows": len(rows),
            "all_subadditive": all(r[5] for r in rows),
            "all_continuous": all(r[6] for r in rows),
        }

    def task_validate(self):
        violations = []
        if self.cfg.source_kind == "family":
            try:
                report = classify_events(self.diagram())
                violations += report.violations
            except NonCerfError as e:
                violations.append(str(e))
        elif self.cfg.source_kind:
            X = self.source_complex()
            gap = X.filtration_gap()
            violations += [] if gap > ActionValue.rational(0) else ["nonpositive gap"]
        self.report["validate"] = {"violations": violations, "ok": not violations}
        if violations:
            self.exit_code = 2

    def run_tasks(self):
        handlers = {
            "rho": self.task_rho,
            "spectrum": self.task_spectrum,
            "diagram": self.task_diagram,
            "continuation": self.task_continuation,
            "rho_curve": self.task_rho_curve,
            "hofer": self.task_hofer,
            "validate": self.task_validate,
        }
        for t in self.cfg.tasks:
            handlers[t]()


def run(config_path, out_dir=None, seed=None, grid=None) -> int:
    """Execute a config; returns the exit code and writes artifacts."""
    path = Path(config_path)
    try:
        raw_bytes = path.read_bytes()
    except OSError as e:
        _error("missing-file", str(e))
        return 1
    try:
        raw = json.loads(raw_bytes)
    except json.JSONDecodeError as e:
        _error("bad-json", str(e))
        return 1
    if seed is not None:
        raw["seed"] = seed
    if grid is not None:
        raw.setdefault("grid", {})["eta"] = grid
    try:
        cfg = RunConfig(raw)
    except ConfigError as e:
        _error("schema", str(e))
        return 1

    out = Path(out_dir or cfg.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    runner = Runner(cfg, out)
    try:
        runner.run_tasks()
    except (NonCerfError, ValidationFailure) as e:
        _error("validation", str(e))
        runner.report["validation_error"] = str(e)
        runner.exit_code = 2
    except FloerminiError as e:
        _error("engine", str(e))
        return 1

    report = {
        "engine_version": __version__,
        "config_hash": hashlib.sha256(raw_bytes).hexdigest(),
        "grid": {"theta": cfg.theta_grid, "eta": cfg.eta_grid},
        "seed": cfg.seed,
        "tolerances": cfg.tolerances,
        "results": runner.report,
    }
    _write(out / "report.json", _json_bytes(report))
    return runner.exit_code


def _error(kind: str, message: str):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="floermini",
        description="Spectral invariants of filtered Novikov complexes",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="execute a JSON config")
    runp.add_argument("config", help="path to the config file")
    runp.add_argument("--out", default=None, help="output directory")
    runp.add_argument("--seed", type=int, default=None, help="override the seed")
    runp.add_argument("--grid", type=int, default=None, help="override the eta grid")
    args = parser.parse_args(argv)
    if args.command == "run":
        return run(args.config, args.out, args.seed, args.grid)
    return 1


if __name__ == "__main__":
    sys.exit(main())
