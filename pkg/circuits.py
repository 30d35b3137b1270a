"""
Circuits - QFT, Approximate QFT and QPE Resource Estimates

Builds T-count estimates for the quantum Fourier transform family on top of the
composition bounds and the budget solvers.

Flow (approximate QFT):
    1. Count the controlled-R_k gates per k (census)
    2. Price the pruned ones: GPI error accumulated with Approximation-I, or
       operator-norm error summed per the sum-of-error rule
    3. Subtract the pruning error from the budget (in quadrature for GPI,
       linearly for the operator norm)
    4. Split what remains equally over the R_z leaves of the kept rotations
    5. Add the fixed Fredkin overhead of every kept rotation

Dependencies:
    - budget: equal-split solvers and cost models
    - composition: Approximation-I accumulation
    - distances: DistanceKind
    - config: default decomposition of a controlled-R_k
"""

import math
import logging
from dataclasses import dataclass

from config import DEFAULT_C, DEFAULT_DELTA, DEFAULT_FIXED_TCOUNT_PER_CRK, DEFAULT_RZ_PER_CRK
from budget import BudgetSolution, CostModel, InfeasibleBudgetError, cost_model, equal_split_gpi, equal_split_opnorm
from composition import mult_bound_approx1
from distances import DistanceKind

logger = logging.getLogger(__name__)


# ----------------
# Specs and plans
# ----------------

@dataclass(frozen=True)
class QftSpec:
    """QFT on n qubits; every controlled-R_k costs rz_per_crk R_z leaves plus fixed T gates."""
    n: int
    rz_per_crk: int = DEFAULT_RZ_PER_CRK
    fixed_tcount_per_crk: int = DEFAULT_FIXED_TCOUNT_PER_CRK

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"QFT needs n >= 2 qubits, got {self.n}")
        if self.rz_per_crk < 1:
            raise ValueError(f"rz_per_crk must be positive, got {self.rz_per_crk}")
        if self.fixed_tcount_per_crk < 0:
            raise ValueError(f"fixed_tcount_per_crk must be nonnegative, got {self.fixed_tcount_per_crk}")


@dataclass(frozen=True)
class PruningPlan:
    """Which rotation orders k in {2..n} are kept; the rest are replaced by identity."""
    n: int
    kept: frozenset

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"Pruning plan needs n >= 2, got {self.n}")
        object.__setattr__(self, "kept", frozenset(self.kept))
        outside = sorted(k for k in self.kept if not 2 <= k <= self.n)
        if outside:
            raise ValueError(f"Kept orders {outside} fall outside 2..{self.n}")

    @property
    def pruned(self) -> frozenset:
        return frozenset(range(2, self.n + 1)) - self.kept

    @classmethod
    def full(cls, n: int) -> "PruningPlan":
        """Keep every rotation (exact QFT)."""
        return cls(n, frozenset(range(2, n + 1)))

    @classmethod
    def keep_up_to(cls, n: int, k_max: int) -> "PruningPlan":
        """Keep cR_k for k <= k_max, pruning the small-angle rotations."""
        if k_max < 1:
            raise ValueError(f"k_max must be positive, got {k_max}")
        return cls(n, frozenset(range(2, min(n, k_max) + 1)))


@dataclass(frozen=True)
class RotationCensus:
    total: int
    per_k: dict


def qft_rotation_census(n: int) -> RotationCensus:
    """
    Count controlled-R_k gates in the n-qubit QFT.

    Returns:
        total = n(n-1)/2 and per_k[k] = n - k + 1 for k in 2..n

    Raises:
        ValueError: if n < 2
    """
    if n < 2:
        raise ValueError(f"QFT needs n >= 2 qubits, got {n}")
    per_k = {k: n - k + 1 for k in range(2, n + 1)}
    return RotationCensus(n * (n - 1) // 2, per_k)


def _execution_order(n: int) -> list[int]:
    # Target qubit j = 1..n-1 receives cR_2 .. cR_{n-j+1}
    return [k for j in range(1, n) for k in range(2, n - j + 2)]


# ----------------
# Pruning errors
# ----------------

def _check_order(k: int) -> None:
    if k < 2:
        raise ValueError(f"Rotation order k must be >= 2, got {k}")


def prune_error_gpi(k: int) -> float:
    """
    D_P(cR_k, I) = sqrt(1 - sqrt(1 + 3 cos^2(theta_k/2)) / 2), theta_k = 2 pi / 2^k.

    Implementation:
        Evaluated as (3/4) sin^2(theta_k/2) / (1 + sqrt(1 + 3 cos^2(theta_k/2)) / 2)
        under the root, which is the same quantity without cancellation at large k.
    """
    _check_order(k)
    half = math.pi / 2 ** k
    root = math.sqrt(1.0 + 3.0 * math.cos(half) ** 2) / 2.0
    return math.sqrt(0.75 * math.sin(half) ** 2 / (1.0 + root))


def prune_error_opnorm(k: int) -> float:
    """||cR_k - I|| = 2 sin(theta_k / 2); never below prune_error_gpi(k)."""
    _check_order(k)
    return 2.0 * math.sin(math.pi / 2 ** k)


def aqft_pruning_error(n: int, plan: PruningPlan, dist: DistanceKind) -> float:
    """
    Algorithmic error of replacing the pruned cR_k gates by identity.

    Args:
        n: QFT width
        plan: Pruning plan for the same n
        dist: GPI (Approximation-I over the pruned gates in execution order) or
              OPERATOR_NORM (sum of N_k * 2 sin(theta_k/2))

    Returns:
        0 when nothing is pruned

    Raises:
        ValueError: on a plan for another width or an unsupported distance
    """
    if plan.n != n:
        raise ValueError(f"Pruning plan is for n = {plan.n}, not {n}")
    pruned = plan.pruned
    if not pruned:
        return 0.0
    if dist is DistanceKind.GPI:
        errors = [prune_error_gpi(k) for k in _execution_order(n) if k in pruned]
        return mult_bound_approx1(errors)
    if dist is DistanceKind.OPERATOR_NORM:
        per_k = qft_rotation_census(n).per_k
        return float(sum(per_k[k] * prune_error_opnorm(k) for k in sorted(pruned)))
    raise ValueError(f"Pruning error is defined for gpi and opnorm, not {dist.value}")


def remaining_budget(eps_budget: float, pruning_error: float, dist: DistanceKind) -> float:
    """
    Budget left for synthesis after pruning.

    GPI subtracts in quadrature, sqrt(eps^2 - p^2); the operator norm subtracts linearly.

    Raises:
        InfeasibleBudgetError: if the pruning error already uses the whole budget
    """
    if pruning_error >= eps_budget:
        raise InfeasibleBudgetError(
            f"Pruning error {pruning_error:.9g} exhausts the budget {eps_budget:.9g}"
        )
    if dist is DistanceKind.GPI:
        return math.sqrt(eps_budget * eps_budget - pruning_error * pruning_error)
    return eps_budget - pruning_error


def _split(n_leaves: int, budget: float, dist: DistanceKind, model: CostModel,
           delta: float, c: float) -> BudgetSolution | None:
    if n_leaves == 0:
        return None
    if dist is DistanceKind.GPI:
        return equal_split_gpi(n_leaves, budget, delta, c, model)
    return equal_split_opnorm(n_leaves, budget, model)


# ----------------
# Approximate QFT
# ----------------

@dataclass(frozen=True)
class AqftReport:
    n: int
    distance: DistanceKind
    model: str
    leading_order_only: bool
    kept: list
    pruned: list
    per_k_count: dict
    per_k_error_gpi: dict
    per_k_error_opnorm: dict
    eps_qft_gpi: float
    eps_qft_opnorm: float
    eps_budget: float
    remaining_budget: float
    kept_rotations: int
    n_leaves: int
    per_gate_eps: float | None
    synthesis_tcount: float
    fixed_tcount: int
    total_tcount: float
    total_tcount_int: int

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["distance"] = self.distance.value
        return out


def aqft_tcount(spec: QftSpec, plan: PruningPlan, eps_budget: float, model: CostModel | None = None,
                dist: DistanceKind = DistanceKind.GPI, delta: float = DEFAULT_DELTA,
                c: float = DEFAULT_C) -> AqftReport:
    """
    Estimate the T-count of an (approximate) QFT under one distance.

    Args:
        spec: QFT width and controlled-R_k decomposition
        plan: Which rotation orders are kept
        eps_budget: Total error budget, 0 < eps_budget < 1
        model: Cost model (KMM15 when omitted)
        dist: GPI or OPERATOR_NORM
        delta, c: GPI solver parameters

    Returns:
        AqftReport with per-k errors, accumulated pruning errors in both distances,
        the remaining budget and the total T-count

    Raises:
        InfeasibleBudgetError: if pruning exhausts the budget
    """
    model = model or cost_model("KMM15")
    if not 0.0 < eps_budget < 1.0:
        raise ValueError(f"Error budget must satisfy 0 < eps < 1, got {eps_budget}")
    if dist not in (DistanceKind.GPI, DistanceKind.OPERATOR_NORM):
        raise ValueError(f"T-count estimates use gpi or opnorm, not {dist.value}")
    if plan.n != spec.n:
        raise ValueError(f"Pruning plan is for n = {plan.n}, QFT has n = {spec.n}")

    census = qft_rotation_census(spec.n)
    eps_gpi = aqft_pruning_error(spec.n, plan, DistanceKind.GPI)
    eps_op = aqft_pruning_error(spec.n, plan, DistanceKind.OPERATOR_NORM)
    pruning = eps_gpi if dist is DistanceKind.GPI else eps_op
    remaining = remaining_budget(eps_budget, pruning, dist)

    kept_rotations = sum(census.per_k[k] for k in plan.kept)
    n_leaves = kept_rotations * spec.rz_per_crk
    solution = _split(n_leaves, remaining, dist, model, delta, c)
    synthesis = solution.total_tcount if solution else 0.0
    synthesis_int = solution.total_tcount_int if solution else 0
    fixed = kept_rotations * spec.fixed_tcount_per_crk

    logger.info(
        f"AQFT n={spec.n} {dist.value}: pruned {sorted(plan.pruned)}, "
        f"pruning error {pruning:.3e}, {n_leaves} R_z leaves"
    )
    return AqftReport(
        n=spec.n,
        distance=dist,
        model=model.name,
        leading_order_only=model.leading_order_only,
        kept=sorted(plan.kept),
        pruned=sorted(plan.pruned),
        per_k_count=dict(census.per_k),
        per_k_error_gpi={k: prune_error_gpi(k) for k in census.per_k},
        per_k_error_opnorm={k: prune_error_opnorm(k) for k in census.per_k},
        eps_qft_gpi=eps_gpi,
        eps_qft_opnorm=eps_op,
        eps_budget=eps_budget,
        remaining_budget=remaining,
        kept_rotations=kept_rotations,
        n_leaves=n_leaves,
        per_gate_eps=solution.per_gate_eps if solution else None,
        synthesis_tcount=synthesis,
        fixed_tcount=fixed,
        total_tcount=synthesis + fixed,
        total_tcount_int=synthesis_int + fixed,
    )


# ----------------
# Phase estimation
# ----------------

@dataclass(frozen=True)
class QpeSpec:
    """n accurate bits with success probability p; eps_qpe is the phase-approximation error."""
    n: int
    p: float
    eps_qpe: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"QPE needs n >= 1 accuracy bits, got {self.n}")
        if not 0.0 <= self.p < 1.0:
            raise ValueError(f"Success probability must satisfy 0 <= p < 1, got {self.p}")
        if self.eps_qpe < 0:
            raise ValueError(f"eps_qpe must be nonnegative, got {self.eps_qpe}")


def qpe_bits(n: int, p: float) -> int:
    """
    Register size t = n + ceil(log2(2 + 1/(2(1-p)))).

    Raises:
        ValueError: if p is outside [0, 1) or n < 1
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= p < 1.0:
        raise ValueError(f"Success probability must satisfy 0 <= p < 1, got {p}")
    return n + math.ceil(math.log2(2.0 + 1.0 / (2.0 * (1.0 - p))))


@dataclass(frozen=True)
class QpeReport:
    n: int
    p: float
    t: int
    distance: DistanceKind
    model: str
    leading_order_only: bool
    eps_total: float
    eps_qpe: float
    synthesis_budget: float
    pruned: list
    pruning_error: float
    remaining_budget: float
    controlled_rotations: int
    target_rotations: int
    n_leaves: int
    per_gate_eps: float
    synthesis_tcount: float
    fixed_tcount: int
    total_tcount: float
    total_tcount_int: int

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["distance"] = self.distance.value
        return out


def qpe_tcount(spec: QpeSpec, eps_total: float, model: CostModel | None = None,
               dist: DistanceKind = DistanceKind.GPI, target_rotations: int = 1,
               plan: PruningPlan | None = None, qft: QftSpec | None = None,
               delta: float = DEFAULT_DELTA, c: float = DEFAULT_C) -> QpeReport:
    """
    Estimate the T-count of phase estimation on U = R_z(alpha)-style targets.

    Args:
        spec: Accuracy bits, success probability and phase-approximation error
        eps_total: Overall error budget; synthesis gets eps_total - eps_qpe
        model: Cost model (KMM15 when omitted)
        dist: GPI or OPERATOR_NORM
        target_rotations: Approximable rotations in the controlled-U powers
        plan: Pruning plan for the inverse QFT on t qubits (no pruning by default)
        qft: Controlled-R_k decomposition (width is replaced by t)
        delta, c: GPI solver parameters

    Returns:
        QpeReport; Hadamard columns and measurement are exact and cost nothing

    Raises:
        InfeasibleBudgetError: if eps_qpe or the pruning error uses up the budget
    """
    model = model or cost_model("KMM15")
    if not 0.0 < eps_total < 1.0:
        raise ValueError(f"Error budget must satisfy 0 < eps < 1, got {eps_total}")
    if target_rotations < 1:
        raise ValueError(f"target_rotations must be positive, got {target_rotations}")
    if dist not in (DistanceKind.GPI, DistanceKind.OPERATOR_NORM):
        raise ValueError(f"T-count estimates use gpi or opnorm, not {dist.value}")
    synthesis_budget = eps_total - spec.eps_qpe
    if synthesis_budget <= 0:
        raise InfeasibleBudgetError(
            f"Phase-approximation error {spec.eps_qpe} leaves no synthesis budget out of {eps_total}"
        )

    t = qpe_bits(spec.n, spec.p)
    rz_per_crk = qft.rz_per_crk if qft else DEFAULT_RZ_PER_CRK
    fixed_per_crk = qft.fixed_tcount_per_crk if qft else DEFAULT_FIXED_TCOUNT_PER_CRK
    plan = plan or PruningPlan.full(t)
    if plan.n != t:
        raise ValueError(f"Pruning plan is for n = {plan.n}, inverse QFT has t = {t}")

    census = qft_rotation_census(t)
    pruning = aqft_pruning_error(t, plan, dist)
    remaining = remaining_budget(synthesis_budget, pruning, dist)
    controlled = sum(census.per_k[k] for k in plan.kept)
    n_leaves = controlled * rz_per_crk + target_rotations
    solution = _split(n_leaves, remaining, dist, model, delta, c)
    fixed = controlled * fixed_per_crk

    logger.info(f"QPE n={spec.n} p={spec.p} -> t={t}, {n_leaves} R_z leaves ({dist.value})")
    return QpeReport(
        n=spec.n,
        p=spec.p,
        t=t,
        distance=dist,
        model=model.name,
        leading_order_only=model.leading_order_only,
        eps_total=eps_total,
        eps_qpe=spec.eps_qpe,
        synthesis_budget=synthesis_budget,
        pruned=sorted(plan.pruned),
        pruning_error=pruning,
        remaining_budget=remaining,
        controlled_rotations=controlled,
        target_rotations=target_rotations,
        n_leaves=n_leaves,
        per_gate_eps=solution.per_gate_eps,
        synthesis_tcount=solution.total_tcount,
        fixed_tcount=fixed,
        total_tcount=solution.total_tcount + fixed,
        total_tcount_int=solution.total_tcount_int + fixed,
    )
