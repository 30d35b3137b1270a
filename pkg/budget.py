"""
Budget - Optimal Error Distribution over R_z Rotations

When R_z rotations are the only approximately synthesized gates, a total error
budget eps must be split among N_R of them so that the summed T-count is minimal.

Regimes:
    GPI            - constraint c^2 (1 - prod(1 - eps_i^2)) = (eps - delta)^2
                     (Approximation-II), solved by the equal split
                     eps_r = sqrt(1 - (1 - (eps - delta)^2 / c^2)^(1/N_R))
    Operator norm  - sum-of-error constraint, equal split eps_r' = eps / N_R

Cost models:
    C(eps) = max{0, k log(1/eps) + k2}, logarithm base 2 by default.

Dependencies:
    - numpy: seeded sampling of allocations on the constraint surface
    - config: cost-model table and defaults
    - distances: DistanceKind labels for the regime
"""

import math
import logging
from dataclasses import dataclass, asdict

import numpy as np

from config import (
    DEFAULT_C,
    DEFAULT_DELTA,
    DEFAULT_LOG_BASE,
    MAX_OPTIMALITY_GATES,
    OPTIMALITY_TOL,
    get_cost_model_params,
)
from distances import DistanceKind

logger = logging.getLogger(__name__)


class InfeasibleBudgetError(ValueError):
    """The error budget cannot satisfy the constraint."""


# ----------------
# Cost models
# ----------------

@dataclass(frozen=True)
class CostModel:
    """T-count law for one approximated R_z: k log(1/eps) + k2."""
    name: str
    k: float
    k2: float
    leading_order_only: bool = False
    log_base: float = DEFAULT_LOG_BASE

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"Cost model slope k must be positive, got {self.k}")
        if not (self.log_base > 0 and self.log_base != 1):
            raise ValueError(f"Log base must be positive and != 1, got {self.log_base}")


def cost_model(name: str, log_base: float = DEFAULT_LOG_BASE) -> CostModel:
    """
    Build a named cost model from config.COST_MODELS.

    Args:
        name: 'KMM15', 'Selinger15' or 'RossSelinger16' (case-insensitive)
        log_base: Base of the logarithm in the cost law

    Returns:
        CostModel; RossSelinger16 logs a warning because its O(log log(1/eps))
        term is dropped
    """
    params = get_cost_model_params(name)
    model = CostModel(params["name"], params["k"], params["k2"], params["leading_order_only"], log_base)
    if model.leading_order_only:
        logger.warning(f"Cost model {model.name} is leading-order only (log log term dropped)")
    return model


def tcount_rz(eps: float, model: CostModel) -> float:
    """
    Expected T-count of one R_z approximated to error eps.

    Args:
        eps: Per-gate error, 0 < eps < 1
        model: Cost model

    Returns:
        max{0, k log(1/eps) + k2}

    Raises:
        ValueError: if eps is outside (0, 1)
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"Per-gate error must satisfy 0 < eps < 1, got {eps}")
    return max(0.0, model.k * math.log(1.0 / eps, model.log_base) + model.k2)


def allocation_tcount(eps_list, model: CostModel) -> float:
    """Sum of tcount_rz over an allocation."""
    return float(sum(tcount_rz(float(e), model) for e in eps_list))


# ----------------
# Solutions
# ----------------

@dataclass(frozen=True)
class BudgetSolution:
    """Equal-split allocation and its T-count for one regime."""
    per_gate_eps: float
    per_gate_tcount: float
    total_tcount: float
    total_tcount_int: int
    regime: DistanceKind
    n_r: int
    eps: float
    delta: float
    c: float
    model: str
    leading_order_only: bool

    def to_dict(self) -> dict:
        out = asdict(self)
        out["regime"] = self.regime.value
        return out


def _check_common(n_r: int, eps: float) -> None:
    if not isinstance(n_r, (int, np.integer)) or n_r < 1:
        raise ValueError(f"Number of rotations must be a positive integer, got {n_r!r}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"Total error must satisfy 0 < eps < 1, got {eps}")


def _constraint_target(eps: float, delta: float, c: float) -> float:
    """Return (eps - delta)^2 / c^2 after feasibility checks."""
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    if delta >= eps:
        raise InfeasibleBudgetError(f"delta = {delta} leaves no budget out of eps = {eps}")
    if eps - delta >= c:
        raise InfeasibleBudgetError(f"(eps - delta) = {eps - delta} must be below c = {c}")
    return ((eps - delta) / c) ** 2


def _solution(per_gate_eps: float, regime: DistanceKind, n_r: int, eps: float,
              delta: float, c: float, model: CostModel) -> BudgetSolution:
    per_gate = tcount_rz(per_gate_eps, model)
    return BudgetSolution(
        per_gate_eps=per_gate_eps,
        per_gate_tcount=per_gate,
        total_tcount=n_r * per_gate,
        total_tcount_int=int(n_r * math.ceil(per_gate)),
        regime=regime,
        n_r=int(n_r),
        eps=eps,
        delta=delta,
        c=c,
        model=model.name,
        leading_order_only=model.leading_order_only,
    )


def gpi_per_gate_error(n_r: int, eps: float, delta: float = DEFAULT_DELTA, c: float = DEFAULT_C) -> float:
    """
    eps_r = sqrt(1 - (1 - (eps - delta)^2 / c^2)^(1/N_R)).

    Raises:
        InfeasibleBudgetError: if delta >= eps or (eps - delta) >= c
    """
    _check_common(n_r, eps)
    target = _constraint_target(eps, delta, c)
    return math.sqrt(-math.expm1(math.log1p(-target) / n_r))


def equal_split_gpi(n_r: int, eps: float, delta: float = DEFAULT_DELTA, c: float = DEFAULT_C,
                    model: CostModel | None = None) -> BudgetSolution:
    """
    Optimal allocation under the GPI distance.

    Args:
        n_r: Number of approximated R_z gates
        eps: Total error budget, 0 < eps < 1
        delta: Slack reserved for the approximation, 0 <= delta < eps
        c: Approximation-II constant
        model: Cost model (KMM15 when omitted)

    Returns:
        BudgetSolution with every gate at eps_r; the split does not depend on model

    Raises:
        InfeasibleBudgetError: if the constraint cannot be met
    """
    model = model or cost_model("KMM15")
    per_gate_eps = gpi_per_gate_error(n_r, eps, delta, c)
    return _solution(per_gate_eps, DistanceKind.GPI, n_r, eps, delta, c, model)


def equal_split_opnorm(n_r: int, eps: float, model: CostModel | None = None) -> BudgetSolution:
    """
    Optimal allocation under the operator norm: eps / N_R per gate.
    """
    model = model or cost_model("KMM15")
    _check_common(n_r, eps)
    return _solution(eps / n_r, DistanceKind.OPERATOR_NORM, n_r, eps, 0.0, 1.0, model)


# ----------------
# Comparisons
# ----------------

def gpi_advantage_threshold(eps: float, delta: float = DEFAULT_DELTA, c: float = DEFAULT_C) -> float:
    """N_R above which the GPI split is cheaper: c^2 / (1 - delta/eps)^2."""
    if not 0.0 <= delta < eps:
        raise InfeasibleBudgetError(f"delta = {delta} leaves no budget out of eps = {eps}")
    return c * c / (1.0 - delta / eps) ** 2


def cost_delta(n_r: int, eps: float, delta: float = DEFAULT_DELTA, c: float = DEFAULT_C,
               model: CostModel | None = None) -> float:
    """
    Operator-norm total minus GPI total under the same cost model.

    Positive when n_r >= gpi_advantage_threshold(eps, delta, c).
    """
    model = model or cost_model("KMM15")
    gpi = equal_split_gpi(n_r, eps, delta, c, model)
    opnorm = equal_split_opnorm(n_r, eps, model)
    return opnorm.total_tcount - gpi.total_tcount


def cost_delta_selinger(n_r: int, eps: float, delta: float = DEFAULT_DELTA, c: float = DEFAULT_C,
                        log_base: float = DEFAULT_LOG_BASE) -> float:
    """
    Operator-norm total under Selinger15 minus GPI total under KMM15.

    This is the mixed comparison between the operator-norm synthesis cost and the
    GPI synthesis cost; it is positive for eps <= 0.1 and n_r >= 2 at c in [1, 7.5].
    """
    gpi = equal_split_gpi(n_r, eps, delta, c, cost_model("KMM15", log_base))
    opnorm = equal_split_opnorm(n_r, eps, cost_model("Selinger15", log_base))
    return opnorm.total_tcount - gpi.total_tcount


# ----------------
# Optimality check
# ----------------

@dataclass(frozen=True)
class OptimalityReport:
    best_found_cost: float
    equal_split_cost: float
    violated: bool
    trials: int


def constrained_allocation(weights, eps: float, delta: float = DEFAULT_DELTA, c: float = DEFAULT_C) -> np.ndarray:
    """
    Map simplex weights onto the constraint surface prod(1 - eps_i^2) = 1 - (eps - delta)^2 / c^2.

    Args:
        weights: Nonnegative weights summing to 1 (last axis), one per gate

    Returns:
        eps_i = sqrt(1 - exp(-w_i L)) with L = -log(1 - (eps - delta)^2 / c^2)
    """
    target = _constraint_target(eps, delta, c)
    total_log = -math.log1p(-target)
    return np.sqrt(-np.expm1(-np.asarray(weights, dtype=float) * total_log))


def _batch_tcount(allocations: np.ndarray, model: CostModel) -> np.ndarray:
    with np.errstate(divide="ignore"):
        per_gate = model.k * np.log(1.0 / allocations) / math.log(model.log_base) + model.k2
    return np.sum(np.maximum(0.0, per_gate), axis=-1)


def verify_equal_split_optimality(n_r: int, eps: float, delta: float = DEFAULT_DELTA, c: float = DEFAULT_C,
                                  model: CostModel | None = None, trials: int = 10000,
                                  seed: int = 0) -> OptimalityReport:
    """
    Sample random feasible allocations and confirm none beats the equal split.

    Args:
        n_r: Gate count, 1..MAX_OPTIMALITY_GATES
        eps, delta, c: Budget parameters
        model: Cost model
        trials: Number of allocations drawn (Dirichlet(1, ..., 1) weights)
        seed: Sampler seed

    Returns:
        OptimalityReport; violated is True iff some allocation costs less than the
        equal split by more than OPTIMALITY_TOL

    Raises:
        InfeasibleBudgetError: if the constraint cannot be met
    """
    model = model or cost_model("KMM15")
    _check_common(n_r, eps)
    if n_r > MAX_OPTIMALITY_GATES:
        raise ValueError(f"n_r must be at most {MAX_OPTIMALITY_GATES} for the optimality check, got {n_r}")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")

    equal_cost = equal_split_gpi(n_r, eps, delta, c, model).total_tcount
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    weights = rng.dirichlet(np.ones(n_r), size=trials) if n_r > 1 else np.ones((trials, 1))
    # Dirichlet draws can hit exact zeros, which would mean eps_i = 0 and infinite cost
    weights = np.clip(weights, 1e-300, None)
    costs = _batch_tcount(constrained_allocation(weights, eps, delta, c), model)
    best = float(np.min(costs))
    violated = best < equal_cost - OPTIMALITY_TOL
    if violated:
        logger.warning(f"Allocation with cost {best:.9g} beats equal split {equal_cost:.9g}")
    return OptimalityReport(best, equal_cost, bool(violated), int(trials))
