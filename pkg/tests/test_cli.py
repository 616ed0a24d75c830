"""Command-line surface: verbs, exit codes, CSV schema, and manifest
sidecars.  Commands are invoked in-process through ``main``."""

import csv
import json
import math

import pytest

import upcell.analytic
from upcell.cli import BASE_COLUMNS, CI_COLUMNS, main
from upcell.model import MetricsReport
from upcell.specfun import QuadratureError

PAPER_CONFIG = {
    "tiers": [
        {"lambda_per_km2": 2.0, "rho_o_dbm": -70.0, "theta_db": 0.0, "eta": 4.0}
    ],
    "p_max_watts": 1.0,
    "noise_dbm": -90.0,
    "rho_min_dbm": -90.0,
    "window_km": 20.0,
}

# small, fast geometry for the simulation-backed verbs
SMALL_CONFIG = {
    "tiers": [
        {"lambda_per_km2": 20.0, "rho_o_dbm": -70.0, "theta_db": 0.0, "eta": 4.0}
    ],
    "p_max_watts": 1.0,
    "noise_dbm": -90.0,
    "rho_min_dbm": None,
    "window_km": 2.0,
    "guard_km": 0.5,
}


@pytest.fixture
def paper_config(tmp_path):
    path = tmp_path / "paper.json"
    path.write_text(json.dumps(PAPER_CONFIG))
    return str(path)


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL_CONFIG))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestAnalyze:
    def test_paper_defaults_row(self, paper_config, tmp_path):
        out = tmp_path / "analyze.csv"
        assert main(["analyze", "--config", paper_config, "--output", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == BASE_COLUMNS
        assert len(rows) == 1
        row = dict(zip(header, rows[0]))
        assert float(row["O_p"]) == pytest.approx(0.5334880910911033, rel=1e-11)
        assert float(row["rho_o_dbm"]) == pytest.approx(-70.0)
        assert float(row["lambda_per_km2"]) == pytest.approx(2.0)
        # manifest sidecar
        manifest = json.loads((tmp_path / "analyze.csv.manifest.json").read_text())
        assert manifest["command"] == "analyze"
        assert manifest["iterations"] is None
        assert len(manifest["config_digest"]) == 64

    def test_row_per_tier_by_default(self, tmp_path):
        cfg = dict(PAPER_CONFIG)
        cfg["tiers"] = [
            {"lambda_per_km2": 2.0, "rho_o_dbm": -70.0},
            {"lambda_per_km2": 5.0, "rho_o_dbm": -75.0},
        ]
        path = tmp_path / "two.json"
        path.write_text(json.dumps(cfg))
        out = tmp_path / "two.csv"
        assert main(["analyze", "--config", str(path), "--output", str(out)]) == 0
        _, rows = read_csv(out)
        assert len(rows) == 2

    def test_divergent_exponent_exits_2(self, tmp_path, capsys):
        cfg = dict(PAPER_CONFIG)
        cfg["tiers"] = [{"lambda_per_km2": 2.0, "rho_o_dbm": -70.0, "eta": 2.0}]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(cfg))
        code = main(["analyze", "--config", str(path), "--output",
                     str(tmp_path / "x.csv")])
        assert code == 2
        assert "tiers[0].eta" in capsys.readouterr().err

    def test_missing_file_exits_2(self, tmp_path):
        code = main(["analyze", "--config", str(tmp_path / "nope.json"),
                     "--output", str(tmp_path / "x.csv")])
        assert code == 2

    def test_numeric_failure_exits_3(self, paper_config, tmp_path, monkeypatch):
        def broken(*args, **kwargs):
            raise QuadratureError("synthetic non-convergence")

        monkeypatch.setattr(upcell.analytic, "full_report", broken)
        code = main(["analyze", "--config", paper_config, "--output",
                     str(tmp_path / "x.csv")])
        assert code == 3

    def test_digest_stable_under_key_order(self, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        a.write_text(json.dumps(SMALL_CONFIG, sort_keys=True))
        b.write_text(json.dumps(dict(reversed(list(SMALL_CONFIG.items())))))
        for name in ("a", "b"):
            assert main(["analyze", "--config", str(tmp_path / f"{name}.json"),
                         "--output", str(tmp_path / f"{name}.csv")]) == 0
        da = json.loads((tmp_path / "a.csv.manifest.json").read_text())
        db = json.loads((tmp_path / "b.csv.manifest.json").read_text())
        assert da["config_digest"] == db["config_digest"]


class TestSimulate:
    def test_deterministic_output_bytes(self, small_config, tmp_path):
        out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        for out in (out1, out2):
            code = main([
                "simulate", "--config", small_config, "--output", str(out),
                "--iterations", "120", "--seed", "9", "--workers", "2",
            ])
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()
        header, rows = read_csv(out1)
        assert header == BASE_COLUMNS + CI_COLUMNS + ["n_discarded"]
        assert len(rows) == 1
        assert float(dict(zip(header, rows[0]))["O_s"]) <= 1.0

    def test_iteration_floor_exits_2(self, small_config, tmp_path):
        code = main([
            "simulate", "--config", small_config, "--output",
            str(tmp_path / "x.csv"), "--iterations", "50", "--seed", "1",
        ])
        assert code == 2

    def test_infeasible_saturation_exits_4(self, tmp_path):
        cfg = dict(SMALL_CONFIG)
        cfg["tiers"] = [{"lambda_per_km2": 2.0, "rho_o_dbm": 0.0}]
        path = tmp_path / "hard.json"
        path.write_text(json.dumps(cfg))
        code = main([
            "simulate", "--config", str(path), "--output",
            str(tmp_path / "x.csv"), "--iterations", "100", "--seed", "1",
            "--workers", "2",
        ])
        assert code == 4


class TestValidate:
    def test_agreement_exits_0(self, small_config, tmp_path):
        out = tmp_path / "val.csv"
        code = main([
            "validate", "--config", small_config, "--output", str(out),
            "--iterations", "400", "--seed", "3", "--workers", "2",
        ])
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["metric", "analytic", "simulated", "ci95_half_width",
                          "abs_gap", "within"]
        metrics = {row[0] for row in rows}
        assert {"O_p", "O_s", "O_t", "R_nats", "R_eff_nats", "E_P_w"} == metrics

    def test_corrupted_constant_exits_5(self, small_config, tmp_path, monkeypatch):
        real = upcell.analytic.full_report

        def corrupted(config, tier, **kwargs):
            report = real(config, tier, **kwargs)
            return MetricsReport.from_components(
                min(report.truncation_outage + 0.4, 0.99),
                report.sinr_outage,
                report.spectral_efficiency,
                report.mean_tx_power,
            )

        monkeypatch.setattr(upcell.analytic, "full_report", corrupted)
        code = main([
            "validate", "--config", small_config, "--output",
            str(tmp_path / "x.csv"), "--iterations", "400", "--seed", "3",
            "--workers", "2",
        ])
        assert code == 5


class TestSweepVerbs:
    def test_two_point_grid_stars_better_endpoint(self, paper_config, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main([
            "sweep", "--config", paper_config, "--output", str(out),
            "--from", "-80", "--to", "-60", "--steps", "2",
        ])
        assert code == 0
        header, rows = read_csv(out)
        assert header == BASE_COLUMNS + ["is_optimum"]
        assert len(rows) == 3
        grid = [r for r in rows if r[-1] == "0"]
        starred = [r for r in rows if r[-1] == "1"]
        assert len(starred) == 1
        o_t = [float(dict(zip(header, r))["O_t"]) for r in grid]
        best = grid[0] if o_t[0] <= o_t[1] else grid[1]
        assert starred[0][:-1] == best[:-1]

    def test_optimize_beats_grid(self, paper_config, tmp_path):
        out = tmp_path / "opt.csv"
        code = main([
            "optimize", "--config", paper_config, "--output", str(out),
            "--from", "-100", "--to", "-60", "--steps", "21",
            "--tol-db", "0.05",
        ])
        assert code == 0
        header, rows = read_csv(out)
        o_t = {float(dict(zip(header, r))["rho_o_dbm"]):
               float(dict(zip(header, r))["O_t"]) for r in rows}
        starred = [r for r in rows if r[-1] == "1"]
        star = dict(zip(header, starred[0]))
        assert float(star["O_t"]) <= min(o_t.values()) + 1e-12

    def test_usage_error_without_grid(self, paper_config, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(["sweep", "--config", paper_config, "--output",
                  str(tmp_path / "x.csv")])
        assert info.value.code == 2
