import math

import numpy as np
import pytest

from budget import (
    CostModel,
    InfeasibleBudgetError,
    allocation_tcount,
    constrained_allocation,
    cost_delta,
    cost_delta_selinger,
    cost_model,
    equal_split_gpi,
    equal_split_opnorm,
    gpi_advantage_threshold,
    gpi_per_gate_error,
    tcount_rz,
    verify_equal_split_optimality,
)
from distances import DistanceKind


@pytest.fixture
def kmm():
    return cost_model("KMM15")


class TestCostModels:
    def test_lookup_is_case_insensitive(self):
        assert cost_model("selinger15").name == "Selinger15"
        with pytest.raises(ValueError, match="Unknown cost model"):
            cost_model("SK97")

    def test_leading_order_warning(self, caplog):
        model = cost_model("RossSelinger16")
        assert model.leading_order_only
        assert "leading-order only" in caplog.text

    def test_tcount_rz_base_two(self, kmm):
        assert tcount_rz(0.5, kmm) == pytest.approx(0.0)  # 3.067 - 4.322 < 0 clamps
        assert tcount_rz(2 ** -10, kmm) == pytest.approx(3.067 * 10 - 4.322)

    def test_log_base_override(self):
        natural = cost_model("Selinger15", log_base=math.e)
        assert tcount_rz(0.01, natural) == pytest.approx(4 * math.log(100) + 10)

    def test_rejects_bad_inputs(self, kmm):
        with pytest.raises(ValueError):
            tcount_rz(0.0, kmm)
        with pytest.raises(ValueError):
            CostModel("bad", k=3.0, k2=0.0, log_base=1.0)

    def test_allocation_tcount(self, kmm):
        assert allocation_tcount([0.01, 0.001], kmm) == pytest.approx(tcount_rz(0.01, kmm) + tcount_rz(0.001, kmm))


class TestEqualSplit:
    def test_comparison_at_hundred_rotations(self, kmm):
        gpi = equal_split_gpi(100, 0.01, 0.0, 7.5, kmm)
        opnorm = equal_split_opnorm(100, 0.01, kmm)
        assert gpi.total_tcount == pytest.approx(3515.9, abs=0.5)
        assert opnorm.total_tcount == pytest.approx(3643.1, abs=0.5)
        assert cost_delta(100, 0.01, 0.0, 7.5, kmm) == pytest.approx(127.3, abs=2)

    def test_below_threshold_gpi_costs_more(self, kmm):
        assert cost_delta(10, 0.01, 0.0, 7.5, kmm) < 0

    def test_threshold(self):
        assert gpi_advantage_threshold(0.01, 0.0, 7.5) == pytest.approx(56.25)
        assert gpi_advantage_threshold(0.01, 0.005, 1.0) == pytest.approx(4.0)

    def test_delta_sign_follows_threshold(self, kmm):
        threshold = gpi_advantage_threshold(0.01, 0.0, 7.5)
        for n_r in (60, 100, 500, 2000):
            assert n_r > threshold and cost_delta(n_r, 0.01, 0.0, 7.5, kmm) > 0

    @pytest.mark.parametrize("eps", [1e-4, 1e-3, 1e-2, 0.05, 0.1])
    @pytest.mark.parametrize("c", [1.0, 2.0, 3.5, 5.0, 7.5])
    @pytest.mark.parametrize("delta_ratio", [0.0, 0.01])
    def test_sign_law_on_grid(self, kmm, eps, c, delta_ratio):
        delta = delta_ratio * eps
        n_r = math.ceil(1.05 * gpi_advantage_threshold(eps, delta, c))
        assert cost_delta(n_r, eps, delta, c, kmm) > 0

    @pytest.mark.parametrize("solver", ["gpi", "opnorm"])
    def test_monotone_in_eps_and_n_r(self, kmm, solver):
        def solve(n_r, eps):
            if solver == "gpi":
                return equal_split_gpi(n_r, eps, 0.0, 7.5, kmm)
            return equal_split_opnorm(n_r, eps, kmm)

        eps_grid = [1e-4, 1e-3, 5e-3, 1e-2, 0.05, 0.1]
        for n_r in (1, 10, 100, 1000):
            totals = [solve(n_r, eps).total_tcount for eps in eps_grid]
            per_gate = [solve(n_r, eps).per_gate_eps for eps in eps_grid]
            assert all(a > b for a, b in zip(totals, totals[1:]))
            assert all(a < b for a, b in zip(per_gate, per_gate[1:]))
        for eps in eps_grid:
            totals = [solve(n_r, eps).total_tcount for n_r in (1, 10, 100, 1000)]
            per_gate = [solve(n_r, eps).per_gate_eps for n_r in (1, 10, 100, 1000)]
            assert all(a < b for a, b in zip(totals, totals[1:]))
            assert all(a > b for a, b in zip(per_gate, per_gate[1:]))

    def test_single_rotation(self, kmm):
        sol = equal_split_gpi(1, 0.01, 0.0, 1.0, kmm)
        assert sol.per_gate_eps == pytest.approx(0.01, rel=1e-12)
        assert equal_split_opnorm(1, 0.01, kmm).per_gate_eps == 0.01

    def test_gpi_split_meets_constraint(self):
        eps_r = gpi_per_gate_error(50, 0.02, 0.005, 3.0)
        assert 1 - (1 - eps_r ** 2) ** 50 == pytest.approx((0.02 - 0.005) ** 2 / 9.0, rel=1e-9)

    def test_split_is_model_independent(self):
        a = equal_split_gpi(20, 0.01, model=cost_model("KMM15"))
        b = equal_split_gpi(20, 0.01, model=cost_model("Selinger15"))
        assert a.per_gate_eps == b.per_gate_eps
        assert a.regime is DistanceKind.GPI

    def test_integer_total(self, kmm):
        sol = equal_split_opnorm(100, 0.01, kmm)
        assert sol.total_tcount_int == 100 * math.ceil(sol.per_gate_tcount)
        assert sol.to_dict()["regime"] == "opnorm"

    def test_infeasible_delta(self):
        with pytest.raises(InfeasibleBudgetError):
            equal_split_gpi(10, 0.01, delta=0.01)

    def test_infeasible_c(self):
        with pytest.raises(InfeasibleBudgetError):
            equal_split_gpi(10, 0.5, delta=0.0, c=0.4)

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            equal_split_opnorm(0, 0.01)
        with pytest.raises(ValueError):
            equal_split_gpi(5, 1.5)

    def test_selinger_comparison_positive(self):
        for c in (1.0, 7.5):
            for n_r in (2, 10, 100):
                assert cost_delta_selinger(n_r, 0.01, 0.0, c) > 0


class TestOptimality:
    def test_equal_split_not_beaten(self, kmm):
        report = verify_equal_split_optimality(3, 0.01, 0.0, 1.0, kmm, trials=10_000, seed=1)
        assert not report.violated
        assert report.best_found_cost >= report.equal_split_cost - 1e-9

    def test_allocations_lie_on_constraint(self, rng):
        weights = rng.dirichlet(np.ones(4), size=100)
        alloc = constrained_allocation(weights, 0.01, 0.0, 2.0)
        products = np.prod(1 - alloc ** 2, axis=1)
        np.testing.assert_allclose(products, 1 - (0.01 / 2.0) ** 2, rtol=1e-12)

    def test_equal_weights_reproduce_equal_split(self):
        alloc = constrained_allocation(np.full(5, 0.2), 0.01, 0.0, 1.0)
        np.testing.assert_allclose(alloc, gpi_per_gate_error(5, 0.01, 0.0, 1.0), rtol=1e-12)

    def test_single_gate(self, kmm):
        report = verify_equal_split_optimality(1, 0.01, 0.0, 1.0, kmm, trials=10)
        assert report.best_found_cost == pytest.approx(report.equal_split_cost)

    def test_gate_limit(self, kmm):
        with pytest.raises(ValueError):
            verify_equal_split_optimality(6, 0.01, model=kmm)
