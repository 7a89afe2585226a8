"""End-to-end command line runs and exit-code contract."""

import csv
import json
import os

import numpy as np
import pytest

from funcgrad.cli import main

from conftest import synthetic_growth_table, write_growth_csvs


def run(*argv):
    return main(list(argv))


@pytest.fixture
def simulated(tmp_path):
    out = tmp_path / "sim"
    code = run(
        "simulate",
        "--preset", "expdecay-b1-beta1",
        "--n", "120",
        "--m", "51",
        "--sigma", "0.05",
        "--seed", "3",
        "--out", str(out),
    )
    assert code == 0
    return out


class TestSimulate:
    def test_writes_curves_responses_summary(self, simulated):
        assert (simulated / "curves.csv").exists()
        assert (simulated / "y.csv").exists()
        with open(simulated / "summary.json") as fh:
            data = json.load(fh)
        assert data["n"] == 120
        assert len(data["eigenvalues"]) == 8

    def test_deterministic_rerun(self, tmp_path, simulated):
        out2 = tmp_path / "sim2"
        assert run(
            "simulate", "--preset", "expdecay-b1-beta1", "--n", "120", "--m", "51",
            "--sigma", "0.05", "--seed", "3", "--out", str(out2),
        ) == 0
        a = (simulated / "curves.csv").read_text()
        b = (out2 / "curves.csv").read_text()
        assert a == b

    def test_unknown_preset_is_input_error(self, tmp_path):
        assert run(
            "simulate", "--preset", "wiener", "--out", str(tmp_path / "x")
        ) == 2


class TestFpcaCommand:
    def test_outputs(self, tmp_path, simulated):
        out = tmp_path / "fp"
        assert run(
            "fpca", "--input", str(simulated / "curves.csv"),
            "--fve", "0.99", "--out", str(out),
        ) == 0
        with open(out / "eigen.csv", newline="") as fh:
            header = next(csv.reader(fh))
        assert header[:2] == ["t", "mean"]
        with open(out / "summary.json") as fh:
            data = json.load(fh)
        assert data["n_components"] >= 1
        assert data["n_curves"] == 120

    def test_missing_input_is_input_error(self, tmp_path):
        assert run(
            "fpca", "--input", str(tmp_path / "none.csv"), "--out", str(tmp_path / "o")
        ) == 2


class TestFitCommand:
    def test_estimate_at_mean(self, tmp_path, simulated):
        out = tmp_path / "fit"
        assert run(
            "fit",
            "--input", str(simulated / "curves.csv"),
            "--responses", str(simulated / "y.csv"),
            "--at", "mean",
            "--out", str(out),
        ) == 0
        with open(out / "summary.json") as fh:
            data = json.load(fh)
        assert np.isfinite(data["estimate"])
        assert data["bandwidth"] > 0

    def test_tiny_bandwidth_is_estimation_failure(self, tmp_path, simulated):
        assert run(
            "fit",
            "--input", str(simulated / "curves.csv"),
            "--responses", str(simulated / "y.csv"),
            "--bandwidth", "1e-9",
            "--out", str(tmp_path / "f2"),
        ) == 3

    def test_mismatched_ids_is_input_error(self, tmp_path, simulated):
        bad = tmp_path / "bad_y.csv"
        with open(simulated / "y.csv") as fh:
            rows = list(csv.reader(fh))
        rows[1][0] = "someone_else"
        with open(bad, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)
        assert run(
            "fit",
            "--input", str(simulated / "curves.csv"),
            "--responses", str(bad),
            "--out", str(tmp_path / "f3"),
        ) == 2


class TestDeriveCommand:
    def test_gradients_at_mean(self, tmp_path, simulated):
        out = tmp_path / "d"
        assert run(
            "derive",
            "--input", str(simulated / "curves.csv"),
            "--responses", str(simulated / "y.csv"),
            "--components", "2",
            "--at", "mean",
            "--out", str(out),
        ) == 0
        with open(out / "gamma.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][:3] == ["id", "grad1", "grad2"]
        assert rows[1][0] == "mean"
        with open(out / "dgf.csv", newline="") as fh:
            head = next(csv.reader(fh))
        assert head == ["t", "mean"]

    def test_at_all_includes_every_curve_plus_mean(self, tmp_path, simulated):
        out = tmp_path / "dall"
        assert run(
            "derive",
            "--input", str(simulated / "curves.csv"),
            "--responses", str(simulated / "y.csv"),
            "--components", "1",
            "--at", "all",
            "--out", str(out),
        ) == 0
        with open(out / "gamma.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 120 + 1


class TestSmallballCommand:
    def test_table_and_summary(self, tmp_path):
        out = tmp_path / "sb"
        assert run(
            "smallball", "--B", "2", "--beta", "1", "--b", "1",
            "--u-grid", "0.5,0.2", "--mc", "20000", "--seed", "0",
            "--out", str(out),
        ) == 0
        with open(out / "smallball.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["u", "mc_probability", "asymptote", "log_ratio"]
        assert len(rows) == 3
        mc = float(rows[1][1])
        assert 0.0 < mc < 1.0


class TestGrowthDemo:
    def test_full_pipeline(self, tmp_path, growth_table):
        heights, ages = write_growth_csvs(growth_table, tmp_path)
        out = tmp_path / "demo"
        assert run(
            "growth-demo", "--heights", heights, "--ages", ages, "--out", str(out)
        ) == 0
        with open(out / "summary.json") as fh:
            data = json.load(fh)
        assert data["n_components"] == 3
        assert data["response_age"] == 18.0
        with open(out / "gamma.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 39 + 1

    def test_too_high_cut_is_input_error(self, tmp_path, growth_table):
        heights, ages = write_growth_csvs(growth_table, tmp_path)
        assert run(
            "growth-demo", "--heights", heights, "--ages", ages,
            "--predictor-max-age", "1.1", "--out", str(tmp_path / "x"),
        ) == 2


class TestExitCodes:
    def test_unwritable_output_is_io_error(self, tmp_path, simulated):
        blocker = tmp_path / "blocker"
        blocker.write_text("a file, not a directory")
        assert run(
            "fpca",
            "--input", str(simulated / "curves.csv"),
            "--out", str(blocker / "sub"),
        ) == 4

    def test_unknown_subcommand_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2
