"""
Matrix Core - Dense Complex Linear Algebra and Random Unitaries

This module provides the small dense-matrix toolkit that every brute-force check
in the project is built on. All matrices are numpy complex128 arrays of at most
32x32 (five qubits), so nothing here needs sparse or blocked formats.

Responsibilities:
    - Validated matrix products, Kronecker products, adjoints and traces
    - Pauli strings and the Clifford+T gate constants
    - Haar-random unitaries and exact-distance perturbations, seeded explicitly

Dependencies:
    - numpy: complex arrays, QR factorization, seeded generators
    - config: unitarity tolerance and desk-scale limits

Note:
    Every function is pure and takes an explicit seed where randomness is involved,
    so there is no shared generator state between threads or processes.
"""

import math
import logging
from dataclasses import dataclass

import numpy as np

from config import UNITARITY_TOL, MAX_QUBITS

logger = logging.getLogger(__name__)

# Dense row-major complex matrix
ComplexMatrix = np.ndarray

# ========== GATE CONSTANTS ==========

IDENTITY2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
PHASE_S = np.array([[1, 0], [0, 1j]], dtype=complex)
T_GATE = np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

# sigma_0..sigma_3
PAULIS = (IDENTITY2, PAULI_X, PAULI_Y, PAULI_Z)


# ----------------
# Validation helpers
# ----------------

def as_matrix(a) -> ComplexMatrix:
    """
    Coerce input into a finite 2-D complex128 array.

    Args:
        a: Array-like or Unitary

    Returns:
        2-D complex ndarray (a view when no conversion is needed)

    Raises:
        ValueError: if the input is not 2-D, empty, or holds NaN/Inf
    """
    if isinstance(a, Unitary):
        return a.matrix
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"Expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("Matrix entries must be finite (no NaN/Inf)")
    return m


def _rng(seed: int) -> np.random.Generator:
    # Negative seeds are folded into the unsigned 64-bit range
    return np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)


# ----------------
# Unitary type
# ----------------

@dataclass(frozen=True, eq=False)
class Unitary:
    """
    Square unitary matrix acting on n qubits (dimension N = 2^n).

    Construction checks max|U†U - I| <= UNITARITY_TOL and that the dimension
    is a power of two.
    """
    matrix: ComplexMatrix

    def __post_init__(self):
        m = as_matrix(self.matrix)
        rows, cols = m.shape
        if rows != cols:
            raise ValueError(f"Unitary must be square, got {rows}x{cols}")
        if rows & (rows - 1):
            raise ValueError(f"Unitary dimension {rows} is not a power of two")
        deviation = float(np.max(np.abs(m.conj().T @ m - np.eye(rows))))
        if deviation > UNITARITY_TOL:
            raise ValueError(f"Matrix is not unitary: max|U†U - I| = {deviation:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1


# ----------------
# Core operations
# ----------------

def matmul(a, b) -> ComplexMatrix:
    """
    Standard matrix product a·b.

    Raises:
        ValueError: if a.cols != b.rows
    """
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"Dimension mismatch in matmul: {a.shape} x {b.shape}")
    return a @ b


def kron(a, b) -> ComplexMatrix:
    """
    Kronecker product with kron(a,b)[i*b.rows + k, j*b.cols + l] = a[i,j]*b[k,l].
    """
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(a) -> ComplexMatrix:
    """Conjugate transpose."""
    return as_matrix(a).conj().T


def trace(a) -> complex:
    """
    Sum of the diagonal.

    Raises:
        ValueError: if the matrix is not square
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"Trace needs a square matrix, got {a.shape}")
    return complex(np.trace(a))


def pauli_string(indices) -> ComplexMatrix:
    """
    Build sigma_{a1} ⊗ sigma_{a2} ⊗ ... ⊗ sigma_{an}.

    Args:
        indices: Non-empty sequence over {0, 1, 2, 3} (I, X, Y, Z)

    Returns:
        2^n x 2^n Pauli string, traceless iff any index is nonzero

    Raises:
        ValueError: on an empty sequence or an index outside 0..3
    """
    indices = list(indices)
    if not indices:
        raise ValueError("Pauli string needs at least one index")
    result = np.ones((1, 1), dtype=complex)
    for idx in indices:
        if idx not in (0, 1, 2, 3):
            raise ValueError(f"Pauli index {idx} outside {{0, 1, 2, 3}}")
        result = np.kron(result, PAULIS[idx])
    return result


def rz(theta: float) -> ComplexMatrix:
    """Single-qubit z-rotation diag(e^{-i theta/2}, e^{i theta/2})."""
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def controlled_phase(theta: float) -> ComplexMatrix:
    """Two-qubit diag(1, 1, 1, e^{i theta})."""
    return np.diag([1, 1, 1, np.exp(1j * theta)]).astype(complex)


def controlled_rk(k: int) -> ComplexMatrix:
    """The QFT rotation cR_k = controlled_phase(2*pi / 2^k)."""
    return controlled_phase(2 * math.pi / 2 ** k)


def with_global_phase(u, phi: float) -> ComplexMatrix:
    """Return e^{i phi} U."""
    return np.exp(1j * phi) * as_matrix(u)


# ----------------
# Random unitaries
# ----------------

def random_unitary(n_qubits: int, seed: int) -> Unitary:
    """
    Draw a Haar-distributed unitary on n qubits.

    Args:
        n_qubits: Qubit count, 1..MAX_QUBITS
        seed: Integer seed; identical seeds give identical matrices

    Returns:
        Unitary of dimension 2^n_qubits

    Implementation:
        QR-factorize an NxN matrix of independent standard complex Gaussians, then
        rescale each column of Q by the phase of the matching diagonal entry of R
        so the distribution is exactly Haar rather than biased by the QR convention.
    """
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
    dim = 2 ** n_qubits
    rng = _rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return Unitary(q)


def _random_nonidentity_pauli(n_qubits: int, rng: np.random.Generator) -> ComplexMatrix:
    # Uniform over the 4^n - 1 nonidentity strings via base-4 digits
    code = int(rng.integers(1, 4 ** n_qubits))
    digits = [(code >> (2 * q)) & 3 for q in range(n_qubits)]
    return pauli_string(digits)


def perturb_unitary(v: Unitary, eps: float, seed: int) -> Unitary:
    """
    Return U = V·(cos θ I + i sin θ σ_a) with D_P(U, V) = eps exactly.

    Args:
        v: Reference unitary
        eps: Target global-phase-invariant distance, 0 <= eps < 1
        seed: Seed for the choice of the nonidentity Pauli string σ_a

    Returns:
        Perturbed unitary

    Note:
        θ = arccos(1 - eps²). Since σ_a is traceless, Tr(V†U) = N cos θ, so
        1 - |Tr(V†U)|/N = eps².
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must satisfy 0 <= eps < 1, got {eps}")
    if eps == 0.0:
        return Unitary(v.matrix.copy())
    theta = math.acos(1.0 - eps * eps)
    pauli = _random_nonidentity_pauli(v.n_qubits, _rng(seed))
    rotation = math.cos(theta) * np.eye(v.dim) + 1j * math.sin(theta) * pauli
    return Unitary(v.matrix @ rotation)
