"""CLI commands: exit codes, outputs, and manifest reproducibility."""

import json
from pathlib import Path

import numpy as np
import pytest

from fsptools.cli import main
from fsptools.fieldio import read_field, write_field
from fsptools.spectral import GridSpec, RealField, random_smooth_field

GRID8 = GridSpec((8, 8, 8), (6.0, 6.0, 6.0), 0.8)


def write_input_field(tmp_path, name="u.fld", zero=False):
    if zero:
        u = RealField.zeros(GRID8)
    else:
        u = random_smooth_field(GRID8, np.random.default_rng(3))
    path = tmp_path / name
    write_field(path, u)
    return path


class TestPoissonCommand:
    def test_zero_field(self, tmp_path):
        inp = write_input_field(tmp_path, zero=True)
        out = tmp_path / "out"
        assert main(["poisson", str(inp), "--out", str(out)]) == 0
        phi = read_field(out / "phi.fld")
        assert np.all(phi.values == 0.0)
        report = json.loads((out / "poisson_report.json").read_text())
        assert report["method"] == "padded_convolution"

    def test_oracle_mode_writes_defect(self, tmp_path):
        inp = write_input_field(tmp_path)
        out = tmp_path / "out"
        assert main(["poisson", str(inp), "--out", str(out), "--oracle"]) == 0
        report = json.loads((out / "poisson_report.json").read_text())
        assert report["oracle_max_rel_defect"] <= 1e-10

    def test_bad_magic_exit_2(self, tmp_path, capsys):
        inp = write_input_field(tmp_path)
        raw = bytearray(inp.read_bytes())
        raw[0:4] = b"XXXX"
        inp.write_bytes(bytes(raw))
        assert main(["poisson", str(inp), "--out", str(tmp_path / "out")]) == 2
        assert "offset 0" in capsys.readouterr().err

    def test_missing_file_exit_2(self, tmp_path):
        assert main(["poisson", str(tmp_path / "nope.fld"), "--out", str(tmp_path / "o")]) == 2

    def test_missing_input_argument_exit_3(self, tmp_path):
        assert main(["poisson", "--out", str(tmp_path / "o")]) == 3


class TestCheckCommand:
    def test_builtin_log_quartic_passes(self, tmp_path):
        out = tmp_path / "out"
        code = main([
            "check", "--grid", "10", "--box", "10,11,12", "--alpha", "1.0",
            "--nonlinearity", "log_quartic", "--out", str(out),
        ])
        assert code == 0
        report = json.loads((out / "hypothesis_report.json").read_text())
        assert report["all_passed"] is True

    def test_builtin_exp_power_passes(self, tmp_path):
        code = main([
            "check", "--grid", "10", "--box", "10,11,12",
            "--nonlinearity", "exp_power:p=5", "--out", str(tmp_path / "o"),
        ])
        assert code == 0

    def test_cubic_counterexample_fails_with_h2_witness(self, tmp_path):
        out = tmp_path / "out"
        code = main([
            "check", "--grid", "10", "--box", "10,11,12",
            "--nonlinearity", "cubic", "--out", str(out),
        ])
        assert code == 1
        report = json.loads((out / "hypothesis_report.json").read_text())
        assert report["results"]["H2"]["passed"] is False
        assert len(report["results"]["H2"]["witnesses"]) >= 1

    def test_unknown_nonlinearity_exit_3(self, tmp_path):
        assert main(["check", "--nonlinearity", "bogus", "--out", str(tmp_path / "o")]) == 3

    def test_unknown_config_key_exit_3(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("solver.tols = 1e-6\n")
        assert main(["check", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3


GEOM_ARGS = [
    "--grid", "10", "--box", "10,11,12", "--alpha", "1.0",
    "--nonlinearity", "exp_power:p=5", "--modes", "14", "--seed", "5",
]


def geom_config(tmp_path):
    cfg = tmp_path / "geom.cfg"
    cfg.write_text(
        "geometry.k = 2\n"
        "geometry.rays = 3\n"
        "geometry.rho = 0.5\n"
        "geometry.samples = 40\n"
        "geometry.m_samples = 60\n"
        "geometry.beta_k = 3,5\n"
    )
    return cfg


class TestGeometryCommand:
    def test_reference_model_passes(self, tmp_path):
        out = tmp_path / "out"
        code = main(["geometry", "--config", str(geom_config(tmp_path)), *GEOM_ARGS,
                     "--out", str(out)])
        assert code == 0
        summary = json.loads((out / "geometry_summary.json").read_text())
        assert summary["selection"]["m"] >= 1
        assert all(r["passed"] for r in summary["ring"])
        assert (out / "coercivity_rays.csv").exists()
        assert (out / "ring_checks.csv").exists()
        assert (out / "beta_table.csv").exists()

    def test_zero_nonlinearity_reports_no_radius(self, tmp_path):
        out = tmp_path / "out"
        code = main(["geometry", "--config", str(geom_config(tmp_path)), *GEOM_ARGS[:-4],
                     "--nonlinearity", "none", "--modes", "14", "--out", str(out)])
        assert code == 1
        rows = (out / "coercivity_rays.csv").read_text().strip().splitlines()
        assert len(rows) == 4  # header + 3 rays
        assert all(row.split(",")[2] == "" for row in rows[1:])

    def test_modes_below_k_exit_3(self, tmp_path):
        cfg = tmp_path / "geom.cfg"
        cfg.write_text("geometry.k = 6\n")
        code = main(["geometry", "--config", str(cfg), "--grid", "10", "--box", "10,11,12",
                     "--modes", "6", "--out", str(tmp_path / "o")])
        assert code == 3


SOLVE_ARGS = [
    "--grid", "10", "--box", "10,11.5,13", "--alpha", "1.0",
    "--nonlinearity", "log_quartic", "--modes", "8", "--seed", "21",
]


class TestSolveCommand:
    def test_single_solution_smoke(self, tmp_path):
        out = tmp_path / "out"
        code = main(["solve", *SOLVE_ARGS, "--count", "1", "--tol", "1e-5",
                     "--out", str(out)])
        assert code == 0
        payload = json.loads((out / "solution_set.json").read_text())
        assert payload["count"] == 1
        assert not payload["shortfall"]
        sol = read_field(out / "solutions" / "solution_000.fld")
        assert np.abs(sol.values).max() > 0
        assert len(payload["verification"]) == 1

    def test_impossible_tolerance_shortfall(self, tmp_path):
        cfg = tmp_path / "s.cfg"
        cfg.write_text("solver.max_restarts = 2\nsolver.max_iters = 30\n")
        out = tmp_path / "out"
        code = main(["solve", "--config", str(cfg), *SOLVE_ARGS, "--count", "1",
                     "--tol", "1e-30", "--out", str(out)])
        assert code == 1
        payload = json.loads((out / "solution_set.json").read_text())
        assert payload["shortfall"] is True


class TestManifest:
    def test_written_and_reusable(self, tmp_path):
        out1 = tmp_path / "a"
        assert main(["check", "--grid", "10", "--box", "10,11,12",
                     "--nonlinearity", "log_quartic", "--out", str(out1)]) == 0
        manifest = out1 / "manifest.txt"
        assert manifest.exists()
        # rerun from the manifest itself, only redirecting the output
        out2 = tmp_path / "b"
        assert main(["check", "--config", str(manifest), "--out", str(out2)]) == 0
        r1 = (out1 / "hypothesis_report.json").read_bytes()
        r2 = (out2 / "hypothesis_report.json").read_bytes()
        assert r1 == r2

    def test_repeat_run_bit_exact(self, tmp_path):
        outs = []
        for name in ("x", "y"):
            out = tmp_path / name
            code = main(["geometry", "--config", str(geom_config(tmp_path)), *GEOM_ARGS,
                         "--out", str(out)])
            assert code == 0
            outs.append(out)
        for fname in ("geometry_summary.json", "coercivity_rays.csv",
                      "ring_checks.csv", "beta_table.csv"):
            assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()
        m1 = (outs[0] / "manifest.txt").read_text()
        m2 = (outs[1] / "manifest.txt").read_text()
        # manifests differ only in the out directory line
        d1 = [l for l in m1.splitlines() if not l.startswith("run.out")]
        d2 = [l for l in m2.splitlines() if not l.startswith("run.out")]
        assert d1 == d2
