import csv
import math

import numpy as np
import pytest

from spheremls import (SweepConfig, TestFunctionParams, default_r_factors,
                       default_test_function, estimate_order,
                       random_uniform_sphere, run_sweep, stable_records,
                       write_sweep_csvs)
from spheremls.benchmark import AnsatzRecord, SweepRecord

E3 = np.array([0.0, 0.0, 1.0])

# oracle: direct python summation over the published parameter rows with
# normalized centers (frozen value, see oracle_value_at_north_pole below)
F_AT_NORTH_POLE = 1.676735732049919


def oracle_value_at_north_pole():
    rows = [
        ((0.0, 0.0, 1.0), 5.0, 2.0),
        ((0.932039, 0.0, 0.362358), 7.0, 0.5),
        ((-0.362154, 0.612280, 0.696707), 6.0, -2.0),
        ((0.904035, 0.279651, -0.323290), 5.0, -2.0),
        ((-0.047932, -0.424684, -0.904072), 2.1, 0.2),
    ]
    total = 0.0
    for p, a, c in rows:
        norm = math.sqrt(sum(x * x for x in p))
        dot = p[2] / norm
        total += c * math.exp(-a * (1.0 - dot))
    return total


class TestTestFunction:
    def test_first_term_at_own_center(self):
        f = default_test_function()
        single = TestFunctionParams(
            centers=f.centers, decay=f.decay,
            amplitude=[2.0, 0.0, 0.0, 0.0, 0.0],
            term_exponents=f.term_exponents)
        assert single.evaluate(E3) == 2.0

    def test_value_at_north_pole_frozen_oracle(self):
        assert oracle_value_at_north_pole() == pytest.approx(
            F_AT_NORTH_POLE, abs=1e-15)
        assert default_test_function().evaluate(E3) == pytest.approx(
            F_AT_NORTH_POLE, abs=1e-12)

    def test_first_term_at_antipode(self):
        f = default_test_function()
        single = TestFunctionParams(
            centers=f.centers, decay=f.decay,
            amplitude=[2.0, 0.0, 0.0, 0.0, 0.0],
            term_exponents=f.term_exponents)
        assert single.evaluate(-E3) == pytest.approx(2 * math.exp(-10),
                                                     rel=1e-14)

    def test_term_exponent_flag_multiplies_decay(self):
        with_flag = default_test_function(use_term_exponents=True)
        f = default_test_function()
        y = np.array([0.0, 1.0, 0.0])
        # only term 3 has exponent 2; recompute it by hand
        base = f.evaluate(y)
        p3 = f.centers[2]
        term3 = -2.0 * math.exp(-6.0 * (1.0 - y @ p3))
        term3_doubled = -2.0 * math.exp(-12.0 * (1.0 - y @ p3))
        assert with_flag.evaluate(y) == pytest.approx(
            base - term3 + term3_doubled, rel=1e-12)

    def test_batched_evaluation_matches_scalar(self, rng):
        from conftest import random_sphere
        f = default_test_function()
        pts = random_sphere(rng, 10)
        batch = f.evaluate(pts)
        for i in range(10):
            assert batch[i] == pytest.approx(f.evaluate(pts[i]), rel=1e-14)

    def test_centers_are_normalized(self):
        f = default_test_function()
        assert np.abs(np.linalg.norm(f.centers, axis=1) - 1).max() <= 1e-15

    def test_garbage_centers_rejected(self):
        with pytest.raises(ValueError):
            TestFunctionParams(centers=[[1.0, 1.0, 1.0]], decay=[1.0],
                               amplitude=[1.0], term_exponents=[1])


class TestRandomUniformSphere:
    def test_count_and_norms(self):
        pts = random_uniform_sphere(100_000, seed=1)
        assert pts.shape == (100_000, 3)
        assert np.abs(np.linalg.norm(pts, axis=1) - 1).max() <= 1e-12

    def test_seed_determinism(self):
        assert np.array_equal(random_uniform_sphere(500, seed=42),
                              random_uniform_sphere(500, seed=42))

    def test_mean_vector_small(self):
        pts = random_uniform_sphere(100_000, seed=7)
        assert np.linalg.norm(pts.mean(axis=0)) <= 0.01

    def test_invalid_count(self):
        with pytest.raises(ValueError):
            random_uniform_sphere(0, seed=0)


def synthetic_records(h_values, errors, kind="even_harm"):
    records = []
    for h, err in zip(h_values, errors):
        rec = AnsatzRecord(linf_error=err, worst_condition=10.0,
                           max_lebesgue=1.5, n_failed=0, delta=0.1)
        records.append(SweepRecord(k=0, n_nodes=0, fill_deg=h, sep_deg=h / 1.7,
                                   uniformity=1.7, results={kind: rec}))
    return records


class TestEstimateOrder:
    def test_exact_quartic_power_law(self):
        h = np.array([8.0, 4.0, 2.0, 1.0, 0.5])
        records = synthetic_records(h, h ** 4)
        est = estimate_order(records, "even_harm", (0.1, 10.0))
        assert est.slope == pytest.approx(4.0, abs=1e-10)
        assert est.residual <= 1e-12

    def test_intercept_independence(self):
        h = np.array([6.0, 3.0, 1.5, 0.75])
        for c in (1e-3, 1.0, 1e3):
            records = synthetic_records(h, c * h ** 2)
            est = estimate_order(records, "even_harm", (0.1, 10.0))
            assert est.slope == pytest.approx(2.0, abs=1e-10)

    def test_window_filters_records(self):
        h = np.array([20.0, 8.0, 4.0, 2.0, 1.0])
        errors = np.array([123.0, *(h[1:] ** 3)])  # outlier outside window
        records = synthetic_records(h, errors)
        est = estimate_order(records, "even_harm", (0.5, 10.0))
        assert est.n_used == 4
        assert est.slope == pytest.approx(3.0, abs=1e-10)

    def test_too_few_records(self):
        records = synthetic_records([4.0, 2.0], [1.0, 0.1])
        with pytest.raises(ValueError, match="at least 3"):
            estimate_order(records, "even_harm", (0.1, 10.0))


class TestDefaultRFactors:
    def test_values(self):
        factors = default_r_factors()
        assert factors["all_harm"] == 4.5
        assert factors["even_harm"] == 3.5
        assert factors["even_mon_cent"] == 3.5
        assert factors["tangent"] == 3.5


@pytest.fixture(scope="module")
def small_sweep(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("sweep")
    config = SweepConfig(
        grid_exponents=[1, 2, 3],
        ansatz_kinds=("even_harm", "even_mon_cent"),
        test_set_size=300,
        seed=5,
        outdir=outdir,
        fill_samples=2_000,
    )
    records = run_sweep(config)
    return config, records, outdir


class TestRunSweep:
    def test_record_count_matches_grids(self, small_sweep):
        _, records, _ = small_sweep
        assert len(records) == 3
        assert [r.n_nodes for r in records] == [21, 41, 81]

    def test_delta_uses_default_r_factors(self, small_sweep):
        _, records, _ = small_sweep
        for record in records:
            h_rad = record.fill_deg * np.pi / 180.0
            assert record.results["even_harm"].delta == pytest.approx(
                3.5 * h_rad, rel=1e-12)

    def test_errors_decrease(self, small_sweep):
        _, records, _ = small_sweep
        errs = [r.results["even_mon_cent"].linf_error for r in records]
        assert errs[0] > errs[1] > errs[2]

    def test_csv_files_and_headers(self, small_sweep):
        _, _, outdir = small_sweep
        with open(outdir / "errors.csv", encoding="utf-8") as fh:
            header = fh.readline().strip()
        assert header == "filldist_deg,all_harm,even_harm,even_mon_cent,tangent"
        with open(outdir / "grid.csv", encoding="utf-8") as fh:
            assert fh.readline().strip() == "N,fill_deg,sep_deg,uniformity"
        with open(outdir / "lebesgue.csv", encoding="utf-8") as fh:
            assert fh.readline().strip() == \
                "filldist_deg,even_harm,even_mon_cent"

    def test_unswept_kinds_have_empty_fields(self, small_sweep):
        _, _, outdir = small_sweep
        with open(outdir / "errors.csv", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert all(row["all_harm"] == "" for row in rows)
        assert all(row["tangent"] == "" for row in rows)
        assert all(row["even_harm"] != "" for row in rows)

    def test_csv_round_trip_17_digits(self, small_sweep):
        _, records, outdir = small_sweep
        with open(outdir / "errors.csv", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        for record, row in zip(records, rows):
            assert float(row["filldist_deg"]) == record.fill_deg
            assert float(row["even_harm"]) == \
                record.results["even_harm"].linf_error

    def test_deterministic_rerun(self, small_sweep, tmp_path):
        config, _, outdir = small_sweep
        rerun = SweepConfig(
            grid_exponents=[1, 2, 3],
            ansatz_kinds=("even_harm", "even_mon_cent"),
            test_set_size=300,
            seed=5,
            outdir=tmp_path,
            fill_samples=2_000,
        )
        run_sweep(rerun)
        for name in ("errors.csv", "conds.csv", "lebesgue.csv", "grid.csv"):
            assert (tmp_path / name).read_bytes() == \
                (outdir / name).read_bytes()


class TestStableRecords:
    def test_filters_failures_conditions_and_wide_support(self):
        def rec(n_failed=0, cond=10.0, delta=0.3):
            return SweepRecord(k=0, n_nodes=0, fill_deg=1.0, sep_deg=0.5,
                               uniformity=2.0,
                               results={"even_harm": AnsatzRecord(
                                   linf_error=0.1, worst_condition=cond,
                                   max_lebesgue=1.0, n_failed=n_failed,
                                   delta=delta)})
        records = [rec(), rec(n_failed=3), rec(cond=1e9),
                   rec(delta=2.0), rec()]
        stable = stable_records(records, "even_harm")
        assert len(stable) == 2

    def test_missing_kind_excluded(self):
        records = synthetic_records([1.0], [0.1], kind="tangent")
        assert stable_records(records, "even_harm") == []


class TestWriteCsvEmptyOnFailure:
    def test_failed_record_leaves_field_empty(self, tmp_path):
        rec = AnsatzRecord(linf_error=0.5, worst_condition=1e3,
                           max_lebesgue=2.0, n_failed=7, delta=0.2)
        records = [SweepRecord(k=1, n_nodes=21, fill_deg=30.0, sep_deg=20.0,
                               uniformity=1.5, results={"tangent": rec})]
        write_sweep_csvs(records, tmp_path, kinds=("tangent",))
        with open(tmp_path / "errors.csv", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["tangent"] == ""
