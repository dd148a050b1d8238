import json
from pathlib import Path

import pytest

from floermini.cli import main, run

GOLDEN = Path(__file__).parent / "golden"


def read_all(d: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.is_file()}


class TestRun:
    def test_cgamma_rho_exact(self, tmp_path):
        code = run(GOLDEN / "cgamma_rho.json", tmp_path)
        assert code == 0
        rep = json.loads((tmp_path / "report.json").read_text())
        rho = rep["results"]["rho"]
        assert len(rho) == 1
        entry = rho[0]
        assert entry["rho"]["q"] == "3/10"
        assert entry["rho"]["irr"] == "-1"
        assert entry["witness"] == {"orbit": "x2", "cap": [1]}
        assert entry["tight_cycle"] == [
            {"orbit": "x2", "scalar": [{"cap": [1], "coeff": "1"}]}
        ]
        assert entry["spectral"] is True
        assert rep["results"]["validate"]["ok"]
        assert "config_hash" in rep and "engine_version" in rep
        assert "tolerances" in rep

    def test_constant_family_diagram(self, tmp_path):
        code = run(GOLDEN / "constant_diagram.json", tmp_path)
        assert code == 0
        branches = (tmp_path / "branches.csv").read_text().splitlines()
        assert branches[0] == "branch_id,eta,value,index"
        ids = {line.split(",")[0] for line in branches[1:]}
        assert ids == {"b0", "b1"}
        events = (tmp_path / "events.csv").read_text().splitlines()
        assert events == ["type,eta,value,branch_a,branch_b"]

    def test_missing_tasks_is_schema_error(self, tmp_path, capsys):
        code = run(GOLDEN / "malformed.json", tmp_path)
        assert code == 1
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert err["error"] == "schema"
        assert "tasks" in err["message"]

    def test_missing_file(self, tmp_path, capsys):
        code = run(tmp_path / "nope.json", tmp_path)
        assert code == 1
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert err["error"] == "missing-file"

    def test_hofer_task(self, tmp_path):
        code = run(GOLDEN / "hofer_cos.json", tmp_path)
        assert code == 0
        rep = json.loads((tmp_path / "report.json").read_text())
        h = rep["results"]["hofer"]
        assert h["e_minus"]["q"] == "1/10"
        assert h["gamma"]["q"] == "1/5"
        assert h["positive"] is False

    def test_abstract_family_round_trip(self, tmp_path):
        cfg = {
            "family": {
                "kind": "abstract",
                "complexes": [
                    {
                        "orbits": [
                            {"id": "x", "level": {"q": "3"}, "index": 1},
                            {"id": "y", "level": {"q": "5"}, "index": 1},
                            {"id": "w", "level": {"q": "6"}, "index": 2},
                        ],
                        "boundary": [
                            {"from": "w", "to": "y",
                             "scalar": [{"cap": [], "coeff": "1"}]},
                            {"from": "w", "to": "x",
                             "scalar": [{"cap": [], "coeff": "-1"}]},
                        ],
                    },
                    {
                        "orbits": [
                            {"id": "x", "level": {"q": "3"}, "index": 1},
                            {"id": "y", "level": {"q": "5"}, "index": 1},
                            {"id": "w", "level": {"q": "6"}, "index": 2},
                        ],
                        "boundary": [
                            {"from": "w", "to": "x",
                             "scalar": [{"cap": [], "coeff": "-1"}]}
                        ],
                    },
                ],
                "steps": [
                    {"type": "slide", "slide_from": "x", "slide_over": "y",
                     "cap": [], "coeff": "1", "eta": 0.5, "value": 4.0}
                ],
                "bounds": [["1/8", "1/8"]],
            },
            "tasks": ["diagram", "continuation"],
        }
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(cfg))
        code = run(p, tmp_path / "out")
        assert code == 0
        rep = json.loads((tmp_path / "out" / "report.json").read_text())
        cont = rep["results"]["continuation"]
        slide_entries = [
            e for e in cont["map"] if e["provenance"] == "slide"
        ]
        assert slide_entries == [
            {"from": "x", "to": "y", "scalar": [{"cap": [], "coeff": "1"}],
             "provenance": "slide"}
        ]
        assert cont["dichotomy"]["violations"] == []
        assert cont["dichotomy"]["slides"] == 1

    def test_non_cerf_family_exit_2(self, tmp_path):
        cfg = {
            "family": {
                "kind": "closed_form",
                "expr": "(1-eta)*cos(theta) + eta*cos(theta + pi)",
                "eta_points": 17,
            },
            "tasks": ["validate"],
        }
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(cfg))
        code = run(p, tmp_path / "out")
        assert code == 2

    def test_cli_entry_point(self, tmp_path, capsys):
        code = main(["run", str(GOLDEN / "hofer_cos.json"), "--out", str(tmp_path)])
        assert code == 0

    def test_ghost_translates_render_dashed(self, tmp_path):
        cfg = {
            "period_group": {"generators": [{"rational": "1/2"}], "c1": [0]},
            "family": {
                "kind": "abstract",
                "complexes": [
                    {"orbits": [{"id": "x", "level": {"q": "0"}, "index": 0}],
                     "boundary": []},
                    {"orbits": [{"id": "x", "level": {"q": "0"}, "index": 0}],
                     "boundary": []},
                ],
            },
            "tasks": ["diagram"],
            "ghost_translates": 1,
        }
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(cfg))
        assert run(p, tmp_path / "out") == 0
        svg = (tmp_path / "out" / "diagram.svg").read_text()
        assert "stroke-dasharray" in svg


class TestRendering:
    def test_empty_diagram_axes_only(self):
        from floermini.cerf import CerfDiagram
        from floermini.render import render_diagram_svg

        from floermini.action import make_period_group

        d = CerfDiagram([], [], [], make_period_group([], []), {})
        svg = render_diagram_svg(d)
        assert svg.startswith("<svg")
        assert svg.rstrip().endswith("</svg>")
        assert "eta" in svg and "action" in svg
        assert "polyline" not in svg

    def test_constant_diagram_two_polylines(self, tmp_path):
        run(GOLDEN / "constant_diagram.json", tmp_path)
        svg = (tmp_path / "diagram.svg").read_text()
        assert svg.count("<polyline") == 2


class TestDeterminism:
    @pytest.mark.parametrize(
        "config",
        ["cgamma_rho.json", "constant_diagram.json", "bd_diagram.json", "hofer_cos.json"],
    )
    def test_rerun_byte_identical(self, tmp_path, config):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(GOLDEN / config, a) == run(GOLDEN / config, b)
        fa, fb = read_all(a), read_all(b)
        assert fa.keys() == fb.keys()
        for name in fa:
            assert fa[name] == fb[name], f"{config}:{name} differs between runs"

    def test_birth_death_svg_matches_golden(self, tmp_path):
        run(GOLDEN / "bd_diagram.json", tmp_path)
        got = (tmp_path / "diagram.svg").read_bytes()
        assert got == (GOLDEN / "bd_diagram.svg").read_bytes()
