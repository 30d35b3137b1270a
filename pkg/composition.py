"""
Composition - Error Bounds for Products and Tensor Products of Unitaries

Given component unitaries U_i that approximate V_i with D_P(U_i, V_i) <= eps_i,
this module bounds the GPI distance of the composed circuit.

Bounds:
    - tensor_bound:      sqrt(1 - prod(1 - eps_i^2)) for U_1 ⊗ ... ⊗ U_m
    - mult_bound_pair:   two-factor product bound, folded left by mult_bound_exact
    - mult_bound_approx1 / mult_bound_approx2: compact surrogates for the fold
    - sum_bound:         the operator-norm sum-of-error rule, for comparison

Trees:
    CompositionTree nodes (Leaf / Product / Tensor) describe circuits built from
    both kinds of composition; compose_tree_bound evaluates them recursively.

Dependencies:
    - numpy: vectorized prefix evaluation for the reference sweeps
    - config: default Approximation-II constant c
"""

import json
import math
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Union

import numpy as np

from config import DEFAULT_C

logger = logging.getLogger(__name__)


class BoundKind(str, Enum):
    EXACT = "exact"
    APPROX1 = "approx1"
    APPROX2 = "approx2"
    SUM = "sum"


@dataclass(frozen=True)
class BoundMethod:
    """Selected product rule; c is only used by APPROX2."""
    kind: BoundKind = BoundKind.EXACT
    c: float = DEFAULT_C

    def __post_init__(self):
        object.__setattr__(self, "kind", BoundKind(self.kind))
        if self.kind is BoundKind.APPROX2 and not self.c > 0:
            raise ValueError(f"Approximation-II constant c must be positive, got {self.c}")

    @classmethod
    def parse(cls, name: str, c: float = DEFAULT_C) -> "BoundMethod":
        try:
            return cls(BoundKind(name.strip().lower()), c)
        except ValueError:
            raise ValueError(
                f"Unknown bound method '{name}' (expected one of {[k.value for k in BoundKind]})"
            ) from None


# ----------------
# Error lists
# ----------------

def check_errors(eps) -> np.ndarray:
    """
    Validate an ErrorList.

    Returns:
        1-D float array of the values

    Raises:
        ValueError: on an empty list or any value outside [0, 1)
    """
    values = np.asarray(eps, dtype=float).ravel()
    if values.size == 0:
        raise ValueError("Error list must not be empty")
    bad = ~np.isfinite(values) | (values < 0.0) | (values >= 1.0)
    if np.any(bad):
        raise ValueError(f"Errors must lie in [0, 1), got {values[bad][0]!r}")
    return values


def uniform_errors(eps: float, m: int) -> list[float]:
    """[eps] * m, the setting of the reference sweeps."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return [float(eps)] * m


# ----------------
# Tensor products
# ----------------

def _one_minus_prod(values: np.ndarray) -> np.ndarray:
    # 1 - cumprod(1 - e^2), computed without cancellation; e == 1 gives log1p(-1) = -inf
    with np.errstate(divide="ignore"):
        return -np.expm1(np.cumsum(np.log1p(-values * values)))


def tensor_bound(eps) -> float:
    """
    Bound for a tensor product: sqrt(1 - prod(1 - eps_i^2)).

    Strictly below sum(eps) whenever at least two entries are positive.
    """
    values = check_errors(eps)
    return float(min(1.0, math.sqrt(max(0.0, _one_minus_prod(values)[-1]))))


def tensor_bound_prefix(eps) -> np.ndarray:
    """tensor_bound of eps[:m] for m = 1..len(eps)."""
    values = check_errors(eps)
    return np.minimum(1.0, np.sqrt(np.maximum(0.0, _one_minus_prod(values))))


# ----------------
# Products
# ----------------

def _pair(e1: float, e2: float) -> float:
    # Accepts e1 == 1 so a clamped fold can keep going
    a2, b2 = e1 * e1, e2 * e2
    radicand = a2 + b2 - a2 * b2 + 2.0 * e1 * e2 * math.sqrt((1.0 - a2 / 2.0) * (1.0 - b2 / 2.0))
    return min(1.0, math.sqrt(max(0.0, radicand)))


def mult_bound_pair(e1: float, e2: float) -> float:
    """
    Two-factor product bound.

    min{1, sqrt(1 - (1-e1^2)(1-e2^2) + 2 e1 e2 sqrt((1-e1^2/2)(1-e2^2/2)))}

    Raises:
        ValueError: if either input is outside [0, 1)
    """
    for e in (e1, e2):
        if not 0.0 <= e < 1.0:
            raise ValueError(f"Errors must lie in [0, 1), got {e!r}")
    return _pair(float(e1), float(e2))


def mult_bound_exact_prefix(eps) -> np.ndarray:
    """Left fold of mult_bound_pair, reporting the bound after every factor."""
    values = check_errors(eps)
    out = np.empty(values.size)
    bound = float(values[0])
    out[0] = bound
    for i in range(1, values.size):
        bound = _pair(bound, float(values[i]))
        out[i] = bound
    return out


def mult_bound_exact(eps) -> float:
    """
    Iterated pair bound for U_m...U_1 vs V_m...V_1.

    b_1 = eps_1, b_k = mult_bound_pair(b_{k-1}, eps_k); first gate first.
    """
    return float(mult_bound_exact_prefix(eps)[-1])


def _approx1_prefix(values: np.ndarray) -> np.ndarray:
    before = np.concatenate(([0.0], np.cumsum(values)[:-1]))  # sum_{j<i} eps_j
    root = np.sqrt(np.maximum(0.0, 1.0 - values * values - before * before))
    radicand = np.cumsum(values * values + 2.0 * values * before * root)
    return np.minimum(1.0, np.sqrt(np.maximum(0.0, radicand)))


def mult_bound_approx1_prefix(eps) -> np.ndarray:
    """mult_bound_approx1 of eps[:m] for m = 1..len(eps)."""
    return _approx1_prefix(check_errors(eps))


def mult_bound_approx1(eps) -> float:
    """
    Approximation-I of the product bound.

    min{1, sqrt(sum eps_i^2 + 2 sum_{i>=2} eps_i S_i sqrt(max{0, 1 - eps_i^2 - S_i^2}))}
    with S_i = sum_{j<i} eps_j.

    Note:
        Derived by dropping higher-order terms for small errors. It tracks the exact
        fold within 1% while m*eps stays below about 0.4.
    """
    return float(mult_bound_approx1_prefix(eps)[-1])


def mult_bound_approx2_prefix(eps, c: float = DEFAULT_C) -> np.ndarray:
    """mult_bound_approx2 of eps[:m] for m = 1..len(eps)."""
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    return np.minimum(1.0, c * tensor_bound_prefix(eps))


def mult_bound_approx2(eps, c: float = DEFAULT_C) -> float:
    """
    Approximation-II: min{1, c * sqrt(1 - prod(1 - eps_i^2))}.

    Note:
        Exceeds the exact fold when m is below roughly c^2 (about 56 for c = 7.5).
    """
    return float(mult_bound_approx2_prefix(eps, c)[-1])


def sum_bound(eps) -> float:
    """Sum-of-error bound, left unclamped."""
    return float(np.sum(check_errors(eps)))


def sum_bound_prefix(eps) -> np.ndarray:
    return np.cumsum(check_errors(eps))


def product_bound(eps, method: BoundMethod) -> float:
    """Apply the product rule selected by method to an ErrorList."""
    if method.kind is BoundKind.EXACT:
        return mult_bound_exact(eps)
    if method.kind is BoundKind.APPROX1:
        return mult_bound_approx1(eps)
    if method.kind is BoundKind.APPROX2:
        return mult_bound_approx2(eps, method.c)
    return sum_bound(eps)


# ----------------------------
# Composition trees
# ----------------------------

class TreeError(ValueError):
    """Malformed composition tree; path names the offending node."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class Leaf:
    eps: float
    qubits: int = 1
    label: str = ""


@dataclass(frozen=True)
class Product:
    """Children in execution order: children[0] is applied first."""
    children: tuple = field(default_factory=tuple)

    @property
    def qubits(self) -> int:
        return self.children[0].qubits if self.children else 0


@dataclass(frozen=True)
class Tensor:
    children: tuple = field(default_factory=tuple)

    @property
    def qubits(self) -> int:
        return sum(child.qubits for child in self.children)


CompositionTree = Union[Leaf, Product, Tensor]


def validate_tree(tree: CompositionTree, path: str = "root") -> None:
    """
    Check leaf ranges, child counts and qubit consistency.

    Raises:
        TreeError: naming the first offending node, e.g. 'root.children[1]'
    """
    if isinstance(tree, Leaf):
        if isinstance(tree.qubits, bool) or not isinstance(tree.qubits, int) or tree.qubits < 1:
            raise TreeError(path, f"leaf qubits must be a positive integer, got {tree.qubits!r}")
        if isinstance(tree.eps, bool) or not (isinstance(tree.eps, (int, float)) and 0.0 <= tree.eps < 1.0):
            raise TreeError(path, f"leaf eps must lie in [0, 1), got {tree.eps!r}")
        return
    if not isinstance(tree, (Product, Tensor)):
        raise TreeError(path, f"unknown node type {type(tree).__name__}")
    kind = "product" if isinstance(tree, Product) else "tensor"
    if len(tree.children) < 2:
        raise TreeError(path, f"{kind} node needs at least 2 children, got {len(tree.children)}")
    for i, child in enumerate(tree.children):
        validate_tree(child, f"{path}.children[{i}]")
    if isinstance(tree, Product):
        widths = {child.qubits for child in tree.children}
        if len(widths) > 1:
            raise TreeError(path, f"product children act on different qubit counts {sorted(widths)}")


def _evaluate(node: CompositionTree, method: BoundMethod, path: str, trace: list | None) -> float:
    if isinstance(node, Leaf):
        value = float(node.eps)
        kind = "leaf"
    else:
        child_values = np.array([
            _evaluate(child, method, f"{path}.children[{i}]", trace)
            for i, child in enumerate(node.children)
        ])
        if method.kind is BoundKind.SUM:
            value = float(np.sum(child_values))
        elif isinstance(node, Tensor):
            value = float(min(1.0, math.sqrt(max(0.0, _one_minus_prod(np.minimum(child_values, 1.0))[-1]))))
        elif method.kind is BoundKind.EXACT:
            value = float(child_values[0])
            for e in child_values[1:]:
                value = _pair(value, float(e))
        elif method.kind is BoundKind.APPROX1:
            value = float(_approx1_prefix(child_values)[-1])
        else:
            tensor = math.sqrt(max(0.0, _one_minus_prod(np.minimum(child_values, 1.0))[-1]))
            value = min(1.0, method.c * tensor)
        kind = "product" if isinstance(node, Product) else "tensor"
    if trace is not None:
        trace.append({"path": path, "kind": kind, "qubits": node.qubits, "bound": value})
    return value


def compose_tree_bound(tree: CompositionTree, method: BoundMethod) -> float:
    """
    Bound D_P of a whole circuit described by a composition tree.

    Args:
        tree: Leaf / Product / Tensor structure
        method: Product rule; Tensor nodes always use tensor_bound (SUM sums everywhere)

    Returns:
        Overall bound, clamped to [0, 1] except for the sum-of-error method

    Raises:
        TreeError: if the tree is malformed
    """
    validate_tree(tree)
    return _evaluate(tree, method, "root", None)


def compose_tree_breakdown(tree: CompositionTree, method: BoundMethod) -> list[dict]:
    """
    Evaluate a tree and return every node's intermediate bound.

    Returns:
        Post-order list of {'path', 'kind', 'qubits', 'bound'}; the last entry is the root
    """
    validate_tree(tree)
    trace: list = []
    _evaluate(tree, method, "root", trace)
    return trace


# ----------------
# Constructors
# ----------------

def uniform_product(eps: float, m: int, qubits: int = 1) -> Product:
    """Product of m leaves that all carry eps."""
    if m < 2:
        raise ValueError(f"A product needs at least 2 factors, got {m}")
    return Product(tuple(Leaf(eps, qubits, f"U{i + 1}") for i in range(m)))


def uniform_tensor(eps: float, m: int, qubits: int = 1) -> Tensor:
    """Tensor product of m leaves that all carry eps."""
    if m < 2:
        raise ValueError(f"A tensor needs at least 2 factors, got {m}")
    return Tensor(tuple(Leaf(eps, qubits, f"U{i + 1}") for i in range(m)))


def layered_product(eps_layers: list[list[float]]) -> Product:
    """Product over layers, each layer a tensor of single-qubit leaves."""
    layers = []
    for i, layer in enumerate(eps_layers):
        leaves = tuple(Leaf(e, 1, f"U{i + 1}{j + 1}") for j, e in enumerate(layer))
        layers.append(leaves[0] if len(leaves) == 1 else Tensor(leaves))
    return Product(tuple(layers))


# ----------------
# JSON serialization
# ----------------

def tree_from_dict(data: dict, path: str = "root") -> CompositionTree:
    """
    Build a tree from its JSON form.

    Format:
        {"kind": "leaf", "eps": 0.01, "qubits": 1, "label": "T1"}
        {"kind": "product" | "tensor", "children": [...]}   children[0] applied first
    """
    if not isinstance(data, dict):
        raise TreeError(path, f"expected an object, got {type(data).__name__}")
    kind = data.get("kind")
    if kind == "leaf":
        if "eps" not in data:
            raise TreeError(path, "leaf is missing 'eps'")
        eps = data["eps"]
        if isinstance(eps, bool) or not isinstance(eps, (int, float)):
            raise TreeError(path, f"leaf eps must be a number, got {eps!r}")
        return Leaf(float(eps), data.get("qubits", 1), str(data.get("label", "")))
    if kind in ("product", "tensor"):
        children = data.get("children")
        if not isinstance(children, list):
            raise TreeError(path, "composite node needs a 'children' array")
        built = tuple(tree_from_dict(child, f"{path}.children[{i}]") for i, child in enumerate(children))
        return Product(built) if kind == "product" else Tensor(built)
    raise TreeError(path, f"unknown kind {kind!r} (expected leaf, product or tensor)")


def tree_to_dict(tree: CompositionTree) -> dict:
    """Inverse of tree_from_dict."""
    if isinstance(tree, Leaf):
        out = {"kind": "leaf", "eps": tree.eps, "qubits": tree.qubits}
        if tree.label:
            out["label"] = tree.label
        return out
    kind = "product" if isinstance(tree, Product) else "tensor"
    return {"kind": kind, "children": [tree_to_dict(child) for child in tree.children]}


def load_tree(path: str | Path) -> CompositionTree:
    """
    Read and validate a tree file.

    Raises:
        OSError: if the file cannot be read
        json.JSONDecodeError: on malformed JSON
        TreeError: on a malformed tree
    """
    with open(path, encoding="utf-8") as f:
        tree = tree_from_dict(json.load(f))
    validate_tree(tree)
    logger.info(f"Loaded composition tree from {path} ({tree.qubits} qubits)")
    return tree
