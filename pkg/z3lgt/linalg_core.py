"""Dense complex linear algebra used by every other module.

Operators are square ``complex128`` numpy arrays, states are 1-D ``complex128``
arrays. Everything here is a pure function of its inputs.
"""
import logging
from functools import reduce
from typing import Tuple

import numpy as np

from z3lgt.errors import ConvergenceError, DimensionError, HermiticityError

logger = logging.getLogger(__name__)

MAX_DIM = 4096
HERMITIAN_TOL = 1e-10
RESIDUAL_TOL = 1e-8


def as_operator(a) -> np.ndarray:
    """Return ``a`` as a square complex128 array, rejecting non-square input."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"Operator must be a non-empty square matrix, got shape {m.shape}")
    return m


def kron(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product with result[(i*db+k),(j*db+l)] = a[i,j]*b[k,l].

    Args:
        a: Left (most significant) factor.
        b: Right factor.
        max_dim (int): Largest allowed result dimension.

    Returns:
        The (a.dim * b.dim) square product.
    """
    a, b = as_operator(a), as_operator(b)
    dim = a.shape[0] * b.shape[0]
    if dim > max_dim:
        raise DimensionError(f"Kronecker product of dim {dim} exceeds maximum {max_dim}")
    return np.kron(a, b)


def kron_all(*factors, max_dim: int = MAX_DIM) -> np.ndarray:
    """Left fold of :func:`kron` over the factors, leftmost most significant."""
    if not factors:
        raise DimensionError("kron_all needs at least one factor")
    return reduce(lambda acc, f: kron(acc, f, max_dim=max_dim), factors[1:], as_operator(factors[0]))


def dagger(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_operator(a).conj().T.copy()


def matvec(a, v) -> np.ndarray:
    """Plain matrix-vector product; the output is not renormalized."""
    a = as_operator(a)
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1 or v.shape[0] != a.shape[0]:
        raise DimensionError(f"Cannot apply a {a.shape[0]}x{a.shape[0]} operator to a vector of shape {v.shape}")
    return a @ v


def hermiticity_deviation(a) -> float:
    a = as_operator(a)
    return float(np.max(np.abs(a - a.conj().T)))


def is_hermitian(a, tol: float = 1e-12) -> bool:
    return hermiticity_deviation(a) < tol


def commutator(a, b) -> np.ndarray:
    a, b = as_operator(a), as_operator(b)
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    a, b = as_operator(a), as_operator(b)
    return a @ b + b @ a


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    """Rotate every column so its largest-magnitude entry is real and positive."""
    idx = np.argmax(np.abs(vecs), axis=0)
    pivots = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(pivots) / pivots)[np.newaxis, :]


def eigh(a, tol: float = HERMITIAN_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """Hermitian eigendecomposition with a residual contract.

    Args:
        a: Hermitian matrix.
        tol (float): Largest tolerated elementwise |a - a^dagger|.

    Returns:
        Tuple of ascending real eigenvalues and orthonormal eigenvector columns.

    Raises:
        HermiticityError: if ``a`` is not Hermitian within ``tol``.
        ConvergenceError: if LAPACK fails or any residual exceeds the bound.
    """
    a = as_operator(a)
    deviation = hermiticity_deviation(a)
    if deviation > tol:
        raise HermiticityError("eigh requires a Hermitian matrix", deviation)

    # symmetrize so the solver sees an exactly Hermitian input
    sym = 0.5 * (a + a.conj().T)
    try:
        values, vectors = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as e:
        raise ConvergenceError(f"Eigensolver did not converge: {e}", float("inf")) from e

    vectors = _fix_phases(vectors)
    residuals = np.linalg.norm(a @ vectors - vectors * values[np.newaxis, :], axis=0)
    bound = RESIDUAL_TOL * max(1.0, float(np.max(np.abs(a))))
    worst = float(np.max(residuals))
    if not worst < bound:
        raise ConvergenceError(f"Eigenpair residual above bound {bound:.3e}", worst)

    logger.debug(f"eigh: dim={a.shape[0]} lowest={values[0]:.10f} residual={worst:.2e}")
    return np.asarray(values, dtype=np.float64), vectors


def ground_state(a) -> Tuple[float, np.ndarray]:
    """Lowest eigenvalue and its (phase-fixed) eigenvector."""
    values, vectors = eigh(a)
    return float(values[0]), vectors[:, 0]


def direct_sum_pad(a, target_dim: int, lam: float) -> np.ndarray:
    """Block-diagonal ``diag(a, lam * I)`` of size ``target_dim``."""
    a = as_operator(a)
    dim = a.shape[0]
    if target_dim < dim:
        raise DimensionError(f"Cannot pad a {dim}x{dim} matrix down to {target_dim}")
    if target_dim > MAX_DIM:
        raise DimensionError(f"Padded dim {target_dim} exceeds maximum {MAX_DIM}")
    out = np.zeros((target_dim, target_dim), dtype=np.complex128)
    out[:dim, :dim] = a
    pad = np.arange(dim, target_dim)
    out[pad, pad] = lam
    return out
