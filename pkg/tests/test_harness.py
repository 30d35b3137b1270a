import csv

import pytest

from composition import BoundKind
from harness import (
    SweepConfig,
    generate_figures,
    monte_carlo_validate,
    run_validation_grid,
    sweep_approx2,
    sweep_product,
    sweep_tensor,
    trial_seeds,
    write_trial_csv,
)


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class TestSweeps:
    def test_product_columns_and_ordering(self):
        rows = sweep_product(SweepConfig(0.01, 101))
        assert list(rows[0]) == ["m", "exact", "approx1", "sum"]
        assert len(rows) == 101
        for row in rows:
            assert row["sum"] >= row["approx1"] >= 0
            assert row["sum"] >= row["exact"] - 1e-15

    def test_product_all_methods(self):
        cfg = SweepConfig(0.1, 11, frozenset(BoundKind))
        assert list(sweep_product(cfg)[0]) == ["m", "exact", "approx1", "approx2", "sum"]

    def test_tensor_below_sum(self):
        rows = sweep_tensor(SweepConfig(0.01, 101, kind="tensor"))
        assert rows[0]["tensor"] == pytest.approx(rows[0]["sum"])
        assert all(r["tensor"] < r["sum"] for r in rows[1:])

    def test_approx2_difference(self):
        rows = sweep_approx2(SweepConfig(1e-2, 101))
        for row in rows:
            assert row["difference"] == pytest.approx(row["exact"] - row["approx2"])
        # Approximation-II overshoots the exact fold at small m
        assert rows[1]["difference"] < 0

    def test_rejects_bad_config(self):
        with pytest.raises(ValueError):
            SweepConfig(0.0, 10)
        with pytest.raises(ValueError):
            SweepConfig(0.1, 10, kind="sum")


class TestFigures:
    def test_twelve_files(self, tmp_path):
        written = generate_figures(tmp_path)
        assert len(written) == 12
        names = {p.name for p in written}
        assert {"fig3_eps0.01.csv", "fig4_eps1e-08.csv", "fig5_eps0.0001.csv"} <= names

    def test_file_contents(self, tmp_path):
        generate_figures(tmp_path)
        for path in tmp_path.glob("fig3_*.csv"):
            rows = read_rows(path)
            eps = float(path.stem.split("eps")[1])
            for row in rows:
                exact, approx1, total = float(row["exact"]), float(row["approx1"]), float(row["sum"])
                assert total >= approx1 >= 0 and total >= exact - 1e-8
                if int(row["m"]) * eps <= 0.4:
                    assert abs(approx1 - exact) <= 0.01 * exact
        header = (tmp_path / "fig5_eps0.1.csv").read_text().splitlines()[0]
        assert header == "m,tensor,sum"

    def test_nine_significant_digits(self, tmp_path):
        generate_figures(tmp_path)
        second = (tmp_path / "fig3_eps0.1.csv").read_text().splitlines()[2]
        assert second.split(",")[1] == f"{float(second.split(',')[1]):.9g}"


class TestTrialSeeds:
    def test_deterministic_and_distinct(self):
        assert trial_seeds(42, 3, 4) == trial_seeds(42, 3, 4)
        assert trial_seeds(42, 3, 4) != trial_seeds(42, 4, 4)
        assert len(set(trial_seeds(42, 0, 10))) == 10


class TestMonteCarlo:
    @pytest.mark.parametrize("kind,n_qubits,m,eps", [
        ("product", 2, 5, 0.02),
        ("tensor", 1, 3, 0.05),
    ])
    def test_bound_never_exceeded(self, kind, n_qubits, m, eps):
        result = monte_carlo_validate(n_qubits, m, eps, trials=1000, seed=42, kind=kind)
        assert result.violations == 0
        assert 0 < result.max_ratio <= 1 + 1e-8
        assert [r.trial_id for r in result.records] == list(range(1000))
        for record in result.records:
            assert record.measured_dp <= record.bound_values["exact"] + 1e-10

    def test_single_factor_uses_its_own_error(self):
        # with m = 1 the composed distance is the perturbation itself
        for eps in (0.01, 0.07, 0.3):
            result = monte_carlo_validate(2, 1, [eps], trials=20, seed=3)
            for record in result.records:
                assert record.measured_dp == pytest.approx(eps, abs=1e-12)

    def test_tensor_soundness_is_tight(self):
        # Pauli perturbations on separate factors reach the tensor bound exactly
        result = monte_carlo_validate(1, 3, 0.05, trials=200, seed=7, kind="tensor")
        assert result.violations == 0
        assert result.max_ratio == pytest.approx(1.0, abs=1e-9)

    def test_mixed_errors(self):
        result = monte_carlo_validate(1, 4, [0.01, 0.05, 0.1, 0.02], trials=100, seed=1)
        assert result.violations == 0
        assert result.records[0].eps_list == (0.01, 0.05, 0.1, 0.02)

    def test_deterministic(self, tmp_path):
        a = monte_carlo_validate(2, 3, 0.03, trials=50, seed=42)
        b = monte_carlo_validate(2, 3, 0.03, trials=50, seed=42)
        write_trial_csv(a, tmp_path / "a.csv")
        write_trial_csv(b, tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_parallel_matches_serial(self):
        serial = monte_carlo_validate(1, 3, 0.05, trials=40, seed=9)
        parallel = monte_carlo_validate(1, 3, 0.05, trials=40, seed=9, workers=2)
        assert [r.measured_dp for r in serial.records] == [r.measured_dp for r in parallel.records]

    def test_limits(self):
        with pytest.raises(ValueError):
            monte_carlo_validate(2, 11, 0.01, trials=1, seed=0)
        with pytest.raises(ValueError):
            monte_carlo_validate(2, 3, 0.01, trials=1, seed=0, kind="tensor")  # 64x64
        with pytest.raises(ValueError):
            monte_carlo_validate(1, 3, [0.01, 0.02], trials=1, seed=0)

    def test_default_grid(self):
        results = run_validation_grid(trials=50, seed=42)
        assert len(results) == 4
        assert sum(r.violations for r in results) == 0
