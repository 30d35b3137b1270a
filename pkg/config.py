"""
Central configuration for the GPI resource estimator.
Single source of truth for tolerances, cost models and experiment tables.

This module centralizes all configuration parameters used across the application,
ensuring consistency and making it easy to add cost models or sweep settings.
"""

# ========== NUMERICAL TOLERANCES ==========
# Maximum entry of |U†U - I| accepted when constructing a Unitary
UNITARITY_TOL = 1e-10
# Power iteration on A†A: relative tolerance on the Rayleigh quotient and iteration cap
POWER_ITER_RTOL = 1e-12
POWER_ITER_MAX = 10000
# Slack added to every bound before a Monte-Carlo measurement counts as a violation
VIOLATION_SLACK = 1e-10

# ========== DESK-SCALE LIMITS ==========
MAX_QUBITS = 5        # random_unitary / perturb_unitary
MAX_MATRIX_DIM = 32   # largest composed matrix in the harness
MAX_COMPOSITION = 10  # largest m for monte_carlo_validate
MAX_OPTIMALITY_GATES = 5

# ========== COST MODELS ==========
# T-count laws C(eps) = k log(1/eps) + k2 for a single approximated R_z.
# RossSelinger16 drops its O(log log(1/eps)) term, so it is leading-order only.
COST_MODELS = {
    "KMM15": {"k": 3.067, "k2": -4.322, "leading_order_only": False},
    "Selinger15": {"k": 4.0, "k2": 10.0, "leading_order_only": False},
    "RossSelinger16": {"k": 3.0, "k2": 0.0, "leading_order_only": True},
}
DEFAULT_COST_MODEL = "KMM15"
DEFAULT_LOG_BASE = 2.0


def get_cost_model_params(name: str) -> dict:
    """
    Look up the (k, k2) coefficients of a named cost model.

    Args:
        name: One of the keys of COST_MODELS (case-insensitive)

    Returns:
        Dictionary with keys 'name', 'k', 'k2', 'leading_order_only'

    Raises:
        ValueError: if the model name is unknown
    """
    for key, params in COST_MODELS.items():
        if key.lower() == name.lower():
            return {"name": key, **params}
    raise ValueError(f"Unknown cost model '{name}' (expected one of {get_cost_model_names()})")


def get_cost_model_names() -> list[str]:
    """
    Get list of cost model names in declaration order.

    Returns:
        Example: ['KMM15', 'Selinger15', 'RossSelinger16']
    """
    return list(COST_MODELS)


# ========== BUDGET ==========
# Approximation-II constant; the reference comparison uses c = 7.5 for m <= 110
DEFAULT_C = 7.5
# Slack reserved inside the total budget; 0 reproduces the worked comparisons
DEFAULT_DELTA = 0.0
# Any sampled allocation beating the equal split by more than this breaks optimality
OPTIMALITY_TOL = 1e-9

# ========== CIRCUITS ==========
# Each controlled-R_k: three approximable R_z leaves plus exact Fredkin overhead
DEFAULT_RZ_PER_CRK = 3
DEFAULT_FIXED_TCOUNT_PER_CRK = 7

# ========== HARNESS ==========
# Reference sweeps: per-gate eps -> largest m plotted
PRODUCT_SWEEPS = {1e-1: 11, 1e-2: 101, 1e-3: 1001, 1e-4: 10001}
APPROX2_SWEEPS = {1e-2: 101, 1e-4: 101, 1e-6: 101, 1e-8: 101}
TENSOR_SWEEPS = {1e-1: 11, 1e-2: 101, 1e-3: 1001, 1e-4: 10001}

# Figure families written by the `figures` command
FIGURE_FAMILIES = {
    "fig3": "product",
    "fig4": "approx2",
    "fig5": "tensor",
}

# Default Monte-Carlo grid: (kind, qubits per factor, m, per-factor eps)
DEFAULT_VALIDATION_GRID = [
    ("product", 2, 5, 0.02),
    ("tensor", 1, 3, 0.05),
    ("product", 1, 10, 0.05),
    ("product", 3, 3, 0.01),
]
DEFAULT_TRIALS = 1000
DEFAULT_SEED = 42

# ========== DATABASE ==========
# SQLite archive for validation runs (only written when --db is given)
DEFAULT_DB_FILE = "validation_runs.db"


def figure_filename(family: str, eps: float) -> str:
    """
    Build the CSV file name for one reference sweep.

    Args:
        family: Figure family key ('fig3', 'fig4' or 'fig5')
        eps: Per-gate error of the sweep

    Returns:
        File name such as 'fig3_eps0.01.csv' or 'fig4_eps1e-08.csv'
    """
    return f"{family}_eps{eps:g}.csv"


# ========== OUTPUT ==========
CSV_SIGNIFICANT_DIGITS = 9
SCHEMA_VERSION = 1

# ========== EXIT CODES ==========
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_INFEASIBLE = 3
EXIT_IO_ERROR = 4
