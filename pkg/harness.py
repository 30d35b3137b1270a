"""
Harness - Error-Propagation Sweeps and Monte-Carlo Soundness Checks

This module reproduces the error-propagation curves for products and tensor
products of approximated unitaries, and certifies the composition bounds against
brute-force matrix arithmetic on random instances.

Responsibilities:
    - Sweeps over m = 1..m_max with equal per-gate error (product, tensor, Approximation-II)
    - Monte-Carlo trials: Haar-random V_i, U_i at exact distance eps_i, measured D_P
      of the full composition compared with every bound
    - Writing the reference CSV families

Determinism:
    Trial t draws from np.random.SeedSequence([seed, t]), so serial and parallel
    runs (multiprocessing pool, results kept in trial order) give identical records.

Dependencies:
    - numpy: seed expansion and matrix products
    - multiprocessing: optional worker pool for trials
    - matrixcore, distances, composition: the objects under test
    - reports: CSV output
"""

import logging
import multiprocessing
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path

import numpy as np

from config import (
    APPROX2_SWEEPS,
    DEFAULT_C,
    DEFAULT_VALIDATION_GRID,
    MAX_COMPOSITION,
    MAX_MATRIX_DIM,
    PRODUCT_SWEEPS,
    TENSOR_SWEEPS,
    VIOLATION_SLACK,
    figure_filename,
)
from composition import (
    BoundKind,
    check_errors,
    mult_bound_approx1,
    mult_bound_approx1_prefix,
    mult_bound_approx2,
    mult_bound_approx2_prefix,
    mult_bound_exact,
    mult_bound_exact_prefix,
    sum_bound,
    sum_bound_prefix,
    tensor_bound,
    tensor_bound_prefix,
    uniform_errors,
)
from distances import dist_gpi
from matrixcore import perturb_unitary, random_unitary
from reports import write_csv

logger = logging.getLogger(__name__)

KINDS = ("product", "tensor")
DEFAULT_METHODS = frozenset({BoundKind.EXACT, BoundKind.APPROX1, BoundKind.SUM})


# ----------------
# Sweeps
# ----------------

@dataclass(frozen=True)
class SweepConfig:
    eps: float
    m_max: int
    methods: frozenset = DEFAULT_METHODS
    kind: str = "product"
    c: float = DEFAULT_C

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"Sweep eps must satisfy 0 < eps < 1, got {self.eps}")
        if self.m_max < 1:
            raise ValueError(f"m_max must be >= 1, got {self.m_max}")
        if self.kind not in KINDS:
            raise ValueError(f"Sweep kind must be one of {KINDS}, got {self.kind!r}")
        object.__setattr__(self, "methods", frozenset(BoundKind(m) for m in self.methods))


def _rows(columns: dict) -> list[dict]:
    m_max = len(next(iter(columns.values())))
    return [
        {"m": m, **{name: float(values[m - 1]) for name, values in columns.items()}}
        for m in range(1, m_max + 1)
    ]


def sweep_product(cfg: SweepConfig) -> list[dict]:
    """
    Product bounds on [eps] * m for m = 1..m_max.

    Returns:
        Rows with 'm' followed by the requested columns in the order
        exact, approx1, approx2, sum
    """
    values = uniform_errors(cfg.eps, cfg.m_max)
    columns = {}
    if BoundKind.EXACT in cfg.methods:
        columns["exact"] = mult_bound_exact_prefix(values)
    if BoundKind.APPROX1 in cfg.methods:
        columns["approx1"] = mult_bound_approx1_prefix(values)
    if BoundKind.APPROX2 in cfg.methods:
        columns["approx2"] = mult_bound_approx2_prefix(values, cfg.c)
    if BoundKind.SUM in cfg.methods:
        columns["sum"] = sum_bound_prefix(values)
    if not columns:
        raise ValueError("Sweep needs at least one bound method")
    return _rows(columns)


def sweep_tensor(cfg: SweepConfig) -> list[dict]:
    """Tensor bound against the sum of errors: rows (m, tensor, sum)."""
    values = uniform_errors(cfg.eps, cfg.m_max)
    return _rows({"tensor": tensor_bound_prefix(values), "sum": sum_bound_prefix(values)})


def sweep_approx2(cfg: SweepConfig) -> list[dict]:
    """Approximation-II against the exact fold: rows (m, exact, approx2, difference = exact - approx2)."""
    values = uniform_errors(cfg.eps, cfg.m_max)
    exact = mult_bound_exact_prefix(values)
    approx2 = mult_bound_approx2_prefix(values, cfg.c)
    return _rows({"exact": exact, "approx2": approx2, "difference": exact - approx2})


def generate_figures(out_dir: str | Path, c: float = DEFAULT_C) -> list[Path]:
    """
    Write every reference sweep as CSV.

    Files:
        fig3_eps{eps}.csv  product sweeps (m, exact, approx1, sum)
        fig4_eps{eps}.csv  Approximation-II comparisons (m, exact, approx2, difference)
        fig5_eps{eps}.csv  tensor sweeps (m, tensor, sum)

    Returns:
        Paths written, in the order above
    """
    out_dir = Path(out_dir)
    written = []
    for eps, m_max in PRODUCT_SWEEPS.items():
        rows = sweep_product(SweepConfig(eps, m_max, DEFAULT_METHODS, "product", c))
        written.append(write_csv(rows, out_dir / figure_filename("fig3", eps)))
    for eps, m_max in APPROX2_SWEEPS.items():
        rows = sweep_approx2(SweepConfig(eps, m_max, frozenset({BoundKind.EXACT, BoundKind.APPROX2}), "product", c))
        written.append(write_csv(rows, out_dir / figure_filename("fig4", eps)))
    for eps, m_max in TENSOR_SWEEPS.items():
        rows = sweep_tensor(SweepConfig(eps, m_max, frozenset(), "tensor", c))
        written.append(write_csv(rows, out_dir / figure_filename("fig5", eps)))
    logger.info(f"Wrote {len(written)} figure files to {out_dir}")
    return written


# ----------------
# Monte-Carlo validation
# ----------------

@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    n_qubits: int
    m: int
    eps_list: tuple
    measured_dp: float
    bound_values: dict
    violation: bool

    def to_row(self) -> dict:
        return {
            "trial_id": self.trial_id,
            "n_qubits": self.n_qubits,
            "m": self.m,
            "eps_list": ";".join(f"{e:.9g}" for e in self.eps_list),
            "measured_dp": self.measured_dp,
            **self.bound_values,
            "violation": self.violation,
        }


@dataclass
class ValidationResult:
    kind: str
    n_qubits: int
    m: int
    eps_list: tuple
    trials: int
    seed: int
    records: list = field(default_factory=list)
    violations: int = 0
    max_ratio: float = 0.0

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "n_qubits": self.n_qubits,
            "m": self.m,
            "eps_list": list(self.eps_list),
            "trials": self.trials,
            "seed": self.seed,
            "violations": self.violations,
            "max_ratio": self.max_ratio,
        }


def trial_seeds(seed: int, trial_id: int, count: int) -> list[int]:
    """Expand (master seed, trial id) into count independent 64-bit seeds."""
    sequence = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(trial_id)])
    return [int(s) for s in sequence.generate_state(count, dtype=np.uint64)]


def _bounds(kind: str, eps: list[float], c: float) -> dict:
    # 'exact' is the composition rule that must never be violated for the kind
    if kind == "tensor":
        return {"exact": tensor_bound(eps), "sum": sum_bound(eps)}
    return {
        "exact": mult_bound_exact(eps),
        "approx1": mult_bound_approx1(eps),
        "approx2": mult_bound_approx2(eps, c),
        "sum": sum_bound(eps),
    }


def _run_trial(task: tuple) -> TrialRecord:
    # Module level so the multiprocessing pool can pickle it
    trial_id, n_qubits, eps, seed, kind, c = task
    seeds = trial_seeds(seed, trial_id, 2 * len(eps))
    targets = [random_unitary(n_qubits, seeds[2 * i]) for i in range(len(eps))]
    approximations = [perturb_unitary(v, eps[i], seeds[2 * i + 1]) for i, v in enumerate(targets)]

    if kind == "tensor":
        v_total = reduce(np.kron, (v.matrix for v in targets))
        u_total = reduce(np.kron, (u.matrix for u in approximations))
    else:
        # targets[0] is applied first: V = V_m ... V_1
        v_total = reduce(lambda acc, v: v.matrix @ acc, targets[1:], targets[0].matrix)
        u_total = reduce(lambda acc, u: u.matrix @ acc, approximations[1:], approximations[0].matrix)

    measured = dist_gpi(u_total, v_total)
    bounds = _bounds(kind, list(eps), c)
    return TrialRecord(
        trial_id=trial_id,
        n_qubits=n_qubits,
        m=len(eps),
        eps_list=tuple(eps),
        measured_dp=measured,
        bound_values=bounds,
        violation=measured > bounds["exact"] + VIOLATION_SLACK,
    )


def monte_carlo_validate(n_qubits: int, m: int, eps_list, trials: int, seed: int,
                         kind: str = "product", c: float = DEFAULT_C, workers: int = 1) -> ValidationResult:
    """
    Check the composition bounds against brute-force matrices.

    Args:
        n_qubits: Qubits per factor
        m: Number of factors (<= MAX_COMPOSITION)
        eps_list: Per-factor errors, or a single float used for every factor
        trials: Number of random instances
        seed: Master seed
        kind: 'product' (V_m ... V_1) or 'tensor' (V_1 ⊗ ... ⊗ V_m)
        c: Approximation-II constant for the reported approx2 column
        workers: Processes to use; 1 runs in-process

    Returns:
        ValidationResult with records in trial order, the number of exact-bound
        violations and the largest measured/bound ratio

    Raises:
        ValueError: if the composed matrix would exceed MAX_MATRIX_DIM or m is out of range
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    if not 1 <= m <= MAX_COMPOSITION:
        raise ValueError(f"m must be in 1..{MAX_COMPOSITION}, got {m}")
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be positive, got {n_qubits}")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    total_qubits = n_qubits * m if kind == "tensor" else n_qubits
    if 2 ** total_qubits > MAX_MATRIX_DIM:
        raise ValueError(
            f"Composed matrix would be {2 ** total_qubits}x{2 ** total_qubits}, above {MAX_MATRIX_DIM}"
        )
    eps = [float(eps_list)] * m if isinstance(eps_list, (int, float)) else [float(e) for e in eps_list]
    if len(eps) != m:
        raise ValueError(f"Expected {m} errors, got {len(eps)}")
    check_errors(eps)

    tasks = [(t, n_qubits, tuple(eps), seed, kind, c) for t in range(trials)]
    if workers > 1:
        with multiprocessing.Pool(workers) as pool:
            records = pool.map(_run_trial, tasks, chunksize=max(1, trials // (4 * workers)))
    else:
        records = [_run_trial(task) for task in tasks]

    result = ValidationResult(kind, n_qubits, m, tuple(eps), trials, seed, records)
    result.violations = sum(1 for r in records if r.violation)
    ratios = [r.measured_dp / r.bound_values["exact"] for r in records if r.bound_values["exact"] > 0]
    result.max_ratio = max(ratios, default=0.0)
    if result.violations:
        logger.error(f"{result.violations} bound violations in {kind} validation (n={n_qubits}, m={m})")
    else:
        logger.info(f"{kind} validation n={n_qubits} m={m}: {trials} trials, max ratio {result.max_ratio:.6f}")
    return result


def run_validation_grid(trials: int, seed: int, workers: int = 1, c: float = DEFAULT_C,
                        grid: list | None = None) -> list[ValidationResult]:
    """Run monte_carlo_validate over every (kind, n_qubits, m, eps) entry of the grid."""
    grid = DEFAULT_VALIDATION_GRID if grid is None else grid
    return [
        monte_carlo_validate(n_qubits, m, eps, trials, seed, kind, c, workers)
        for kind, n_qubits, m, eps in grid
    ]


def write_trial_csv(result: ValidationResult, path: str | Path) -> Path:
    """Write one row per trial."""
    return write_csv([r.to_row() for r in result.records], path)
