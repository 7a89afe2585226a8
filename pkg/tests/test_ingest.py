"""CSV loading, growth-rate preprocessing, report export."""

import csv
import json
import os

import numpy as np
import pytest

import funcgrad as fg
from funcgrad.derivative import FunctionalGradientEstimator
from funcgrad.errors import FormatError, InsufficientTimepoints
from funcgrad.fpca import fit_eigensystem
from funcgrad.ingest import (
    LongitudinalTable,
    ReportBundle,
    export_report,
    growth_rates,
    load_curves_csv,
    load_longitudinal,
    load_responses_csv,
    save_curves_csv,
    save_responses_csv,
)

from conftest import synthetic_growth_table, write_growth_csvs


def write_lines(path, lines):
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


class TestLoadCurves:
    def test_well_formed_file(self, tmp_path):
        p = tmp_path / "curves.csv"
        write_lines(
            p,
            [
                "t,a,b",
                "0.0,1.0,2.0",
                "0.5,1.5,2.5",
                "1.0,2.0,3.0",
                "1.5,2.5,3.5",
                "2.0,3.0,4.0",
            ],
        )
        s = load_curves_csv(str(p))
        assert s.n == 2 and s.m == 5
        assert s.ids == ["a", "b"]
        assert s.time_range == (0.0, 2.0)
        assert s.grid.points[0] == 0.0 and s.grid.points[-1] == 1.0

    def test_single_row_rejected(self, tmp_path):
        p = tmp_path / "curves.csv"
        write_lines(p, ["t,a", "0.0,1.0"])
        with pytest.raises(FormatError):
            load_curves_csv(str(p))

    def test_non_monotone_grid_rejected(self, tmp_path):
        p = tmp_path / "curves.csv"
        write_lines(p, ["t,a", "0.0,1.0", "0.5,1.0", "0.5,1.0"])
        with pytest.raises(FormatError):
            load_curves_csv(str(p))

    def test_ragged_rows_rejected(self, tmp_path):
        p = tmp_path / "curves.csv"
        write_lines(p, ["t,a,b", "0.0,1.0,2.0", "0.5,1.5", "1.0,2.0,3.0"])
        with pytest.raises(FormatError):
            load_curves_csv(str(p))

    def test_non_numeric_rejected(self, tmp_path):
        p = tmp_path / "curves.csv"
        write_lines(p, ["t,a", "0.0,1.0", "0.5,oops", "1.0,2.0"])
        with pytest.raises(FormatError):
            load_curves_csv(str(p))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_curves_csv(str(tmp_path / "nope.csv"))


class TestRoundTrip:
    def test_curves_survive_save_load_bit_identically(self, tmp_path, expdecay_process):
        s = fg.sample_process(expdecay_process, 7, seed=11)
        p = tmp_path / "out.csv"
        save_curves_csv(str(p), s, names=[f"c{i}" for i in range(7)])
        back = load_curves_csv(str(p))
        assert np.array_equal(back.values, s.values)
        assert np.array_equal(back.grid.points, s.grid.points)

    def test_responses_round_trip(self, tmp_path):
        p = tmp_path / "y.csv"
        ids = ["u", "v", "w"]
        y = np.array([1.25, -3.5e-7, 19.0 / 3.0])
        save_responses_csv(str(p), ids, y)
        ids2, y2 = load_responses_csv(str(p))
        assert ids2 == ids
        assert np.array_equal(y2, y)


class TestGrowthRates:
    def test_difference_quotient_formula(self):
        table = LongitudinalTable(
            ages=np.array([1.0, 1.25, 1.5]),
            heights=np.array([[100.0, 104.0, 108.0]]),
            ids=["kid"],
        )
        rates = growth_rates(table)
        assert np.allclose(rates.values, [[16.0, 16.0]])
        assert rates.time_range == (1.125, 1.375)
        assert rates.grid.points[0] == 0.0 and rates.grid.points[-1] == 1.0

    def test_constant_heights_give_zero_rates(self):
        table = LongitudinalTable(
            ages=np.array([1.0, 2.0, 4.0, 5.0]),
            heights=np.full((3, 4), 120.0),
            ids=["a", "b", "c"],
        )
        assert np.all(growth_rates(table).values == 0.0)

    def test_grid_count_drops_by_one(self, growth_table):
        keep = growth_table.ages <= 10.0
        table = LongitudinalTable(
            growth_table.ages[keep], growth_table.heights[:, keep], growth_table.ids
        )
        rates = growth_rates(table)
        assert table.ages.shape[0] == 15
        assert rates.m == 14

    def test_midpoints_strictly_inside_age_range(self, growth_table):
        keep = growth_table.ages <= 10.0
        table = LongitudinalTable(
            growth_table.ages[keep], growth_table.heights[:, keep], growth_table.ids
        )
        rates = growth_rates(table)
        lo, hi = rates.time_range
        assert table.ages[0] < lo < hi < table.ages[-1]

    def test_too_few_ages_rejected(self):
        table = LongitudinalTable(
            ages=np.array([1.0, 2.0]), heights=np.array([[100.0, 110.0]]), ids=["kid"]
        )
        with pytest.raises(InsufficientTimepoints):
            growth_rates(table)


class TestLoadLongitudinal:
    def test_round_trip_through_demo_schema(self, tmp_path, growth_table):
        heights_path, ages_path = write_growth_csvs(growth_table, tmp_path)
        table = load_longitudinal(heights_path, ages_path)
        assert np.array_equal(table.ages, growth_table.ages)
        assert np.array_equal(table.heights, growth_table.heights)
        assert table.ids == growth_table.ids

    def test_width_mismatch_rejected(self, tmp_path):
        write_lines(tmp_path / "ages.csv", ["age", "1.0", "2.0", "3.0"])
        write_lines(tmp_path / "h.csv", ["id,a1,a2,a3", "kid,100,110"])
        with pytest.raises(FormatError):
            load_longitudinal(str(tmp_path / "h.csv"), str(tmp_path / "ages.csv"))

    def test_decreasing_ages_rejected(self):
        with pytest.raises(FormatError):
            LongitudinalTable(
                ages=np.array([1.0, 3.0, 2.0]),
                heights=np.ones((1, 3)),
                ids=["kid"],
            )


class TestExportReport:
    def test_empty_bundle_writes_headers_only(self, tmp_path):
        out = tmp_path / "report"
        export_report(ReportBundle(), str(out))
        for name, header in [
            ("eigen.csv", ["t", "mean"]),
            ("scores.csv", ["id"]),
            ("gamma.csv", ["id"]),
            ("dgf.csv", ["t"]),
        ]:
            with open(out / name, newline="") as fh:
                rows = list(csv.reader(fh))
            assert rows == [header]
        with open(out / "summary.json") as fh:
            assert json.load(fh) == {}

    def test_score_file_shape(self, tmp_path, growth_table):
        keep = growth_table.ages <= 10.0
        rates = growth_rates(
            LongitudinalTable(
                growth_table.ages[keep], growth_table.heights[:, keep], growth_table.ids
            )
        )
        eig = fit_eigensystem(rates, fve_threshold=0.995)
        export_report(
            ReportBundle(eigen=eig, sample_ids=rates.ids), str(tmp_path / "r")
        )
        with open(tmp_path / "r" / "scores.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 39
        assert len(rows[0]) == 1 + 3

    def test_eigen_file_reimports_bit_identically(self, tmp_path, expdecay_process):
        s = fg.sample_process(expdecay_process, 40, seed=12)
        eig = fit_eigensystem(s, n_components=3)
        export_report(ReportBundle(eigen=eig), str(tmp_path / "r"))
        back = load_curves_csv(str(tmp_path / "r" / "eigen.csv"))
        assert back.ids == ["mean", "ef1", "ef2", "ef3"]
        assert np.array_equal(back.values[0], eig.mean.values)
        assert np.array_equal(back.values[1:], eig.eigenfunctions)

    def test_gradient_rows_carry_absence_flags(self, tmp_path, expdecay_process, linear_functional):
        proc = expdecay_process
        s = fg.sample_process(proc, 60, seed=13)
        y = fg.gen_response(s, linear_functional, sigma=0.0, seed=13, process=proc)
        est = FunctionalGradientEstimator(n_components=2).fit(s, y)
        good = est.gradient_at_mean()
        assert not good.absent.any()
        bad = est.gradient_at_mean()
        object.__setattr__(
            bad, "coeffs", np.array([bad.coeffs[0], np.nan])
        )
        object.__setattr__(bad, "pair_counts", np.array([bad.pair_counts[0], 0]))
        export_report(
            ReportBundle(
                eigen=est.eigensystem_,
                gradients=[("g", good), ("partial", bad)],
            ),
            str(tmp_path / "r"),
        )
        with open(tmp_path / "r" / "gamma.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == [
            "id", "grad1", "grad2", "pairs1", "pairs2", "absent1", "absent2",
        ]
        assert rows[2][0] == "partial"
        assert rows[2][2] == ""  # absent value left blank
        assert rows[2][6] == "1"
        # dgf only for complete estimates
        with open(tmp_path / "r" / "dgf.csv", newline="") as fh:
            head = next(csv.reader(fh))
        assert head == ["t", "g"]

    def test_summary_carries_spectrum(self, tmp_path, expdecay_process):
        s = fg.sample_process(expdecay_process, 30, seed=14)
        eig = fit_eigensystem(s, n_components=2)
        export_report(ReportBundle(eigen=eig, summary={"command": "x"}), str(tmp_path / "r"))
        with open(tmp_path / "r" / "summary.json") as fh:
            data = json.load(fh)
        assert data["command"] == "x"
        assert len(data["eigenvalues"]) == 2
        assert data["fve"][-1] <= 1.0


def test_seventeen_digit_floats(tmp_path):
    # a value with a full-precision mantissa survives the trip
    value = 0.1 + 0.2  # 0.30000000000000004
    p = tmp_path / "y.csv"
    save_responses_csv(str(p), ["a"], np.array([value]))
    _, y = load_responses_csv(str(p))
    assert y[0] == value
