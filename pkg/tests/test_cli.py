import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from pseudohyp import figures
from pseudohyp.barbot import standard_barbot_surface
from pseudohyp.cli import main
from pseudohyp.linalg import QuadraticSpace
from pseudohyp.verify import Config, run_criteria, run_verify

SURF = standard_barbot_surface(QuadraticSpace(2))


def test_crown_subcommand_writes_fixture_format(tmp_path):
    out = tmp_path / "crown.json"
    assert main(["crown", "--standard", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert set(data) == {"n", "vertices", "lift_signs", "samples_per_edge"}
    assert len(data["vertices"]) == 4


def test_polygon_subcommand_builds_pentagon(tmp_path):
    out = tmp_path / "pentagon.json"
    assert main(["polygon", "--vertices", "5", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert len(data["vertices"]) == 5


def test_polygon_then_renorm_pipeline(tmp_path):
    loop_file = tmp_path / "pentagon.json"
    assert main(["polygon", "--vertices", "5", "--out", str(loop_file)]) == 0
    out = tmp_path / "renorm.json"
    code = main(["renorm", "--loop", str(loop_file), "--schedule", "geometric:0.5",
                 "--steps", "10", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["final"] < data["distances"][0]
    assert data["final"] <= 1e-2


def test_renorm_subcommand_on_fixture(tmp_path):
    out = tmp_path / "renorm.json"
    code = main(["renorm", "--loop", "fixture", "--schedule", "geometric:0.5",
                 "--steps", "12", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["final"] <= 1e-3
    assert len(data["distances"]) == 13


def test_cone_subcommand_report(tmp_path):
    code = main(["cone", "--poly", "1,0.3,0.1", "--perimeter", "1,2,4",
                 "--resolution", "201", "--emit", "csv", "--out", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "cone_report.json").read_text())
    assert data["degree"] == 2
    assert len(data["cone_points"]) == 2
    assert abs(data["total_curvature"] + np.pi) <= 1e-9
    assert len(data["perimeter_table"]) == 3
    with open(tmp_path / "cone_perimeters.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["radius", "perimeter_over_r"]


def test_tits_subcommand_barbot(tmp_path, capsys):
    assert main(["tits", "--surface", "barbot", "--pairs", "3"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert abs(data["perimeter"] - 2 * np.pi) <= 1e-9
    assert all(p["identity_residual"] <= 1e-6 for p in data["pairs"])


def test_barbot_subcommand_sampling(tmp_path):
    code = main(["barbot", "--sample", "grid:5x5", "--geodesic", "0,0,1,1",
                 "--tmax", "10", "--out", str(tmp_path)])
    assert code == 0
    with open(tmp_path / "barbot_samples.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 26  # header + 5x5


def test_figures_vertex_horoball_line_is_straight(tmp_path):
    figures.vertex_horoball(SURF, str(tmp_path), level=0.5)
    with open(tmp_path / "vertex_horoball.csv") as fh:
        rows = list(csv.reader(fh))[1:]
    us = np.array([float(r[0]) for r in rows])
    assert np.max(np.abs(us - us[0])) <= 1e-9
    assert (tmp_path / "vertex_horoball.svg").exists()


def test_figures_geodesic_fan_classes(tmp_path):
    out = tmp_path / "nested" / "figs"  # missing directories are created
    rows = figures.geodesic_fan(SURF, str(out))
    bases = {(r[0], r[1]) for r in rows}
    assert len(bases) == 2
    kinds = {r[4] for r in rows}
    assert kinds == {"vertex", "edge-midpoint"}
    assert (out / "geodesic_fan.svg").exists()


def test_verify_tolerance_override_forces_failure():
    cfg = Config(tolerances={"renorm_final": 0.0})
    slots = run_criteria(cfg, ["renormalization"], echo=False)
    assert not slots[0]["passed"]


def test_verify_work_pool_matches_sequential():
    names = ["spacelike_distance_closed_form", "crown_machinery", "cone_exact_values"]
    seq = run_criteria(Config(workers=1), names, echo=False)
    pool = run_criteria(Config(workers=3), names, echo=False)
    assert json.dumps(seq, sort_keys=True) == json.dumps(pool, sort_keys=True)


def test_verify_cli_exit_code_and_summary(tmp_path):
    cmd = [sys.executable, "-m", "pseudohyp.cli", "verify",
           "--resolution", "201", "--out", str(tmp_path)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert proc.returncode == (0 if summary["passed"] else 1)
    assert summary["passed"]
    assert len(summary["criteria"]) == 13
    # forcing a zero tolerance must flip the exit code
    proc2 = subprocess.run(cmd + ["--tol.renorm_final", "0"],
                           capture_output=True, text=True)
    assert proc2.returncode == 1


def test_verify_config_file_parsing(tmp_path):
    cfgfile = tmp_path / "conf"
    cfgfile.write_text("seed = 99\nresolution = 201\ntol.renorm_final = 0.5\n# comment\n")
    cmd = [sys.executable, "-m", "pseudohyp.cli", "verify",
           "--config", str(cfgfile), "--out", str(tmp_path / "o")]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["config"]["seed"] == 99
    assert summary["config"]["tolerances"]["renorm_final"] == 0.5
    assert proc.returncode == 0
