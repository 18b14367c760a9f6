"""Hermitian checks and functional calculus on small complex matrices."""

import numpy as np
import scipy.linalg as la

from src.config import HERMITIAN_TOL, PD_FLOOR
from src.errors import NotHermitian, NotPositiveDefinite


def as_matrix(value) -> np.ndarray:
    """Coerce `value` to a square complex matrix."""
    mat = np.atleast_2d(np.asarray(value, dtype=complex))
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix has non-finite entries")
    return mat


def hermitian_defect(mats: np.ndarray) -> float:
    """Largest entrywise |A - A*| over a stack (..., N, N)."""
    mats = np.asarray(mats)
    if mats.size == 0:
        return 0.0
    return float(np.max(np.abs(mats - np.conj(np.swapaxes(mats, -1, -2)))))


def check_hermitian(mats: np.ndarray, tol: float = HERMITIAN_TOL, what: str = "matrix") -> None:
    defect = hermitian_defect(mats)
    if defect > tol:
        raise NotHermitian(f"{what} is not Hermitian (defect {defect:.3e} > {tol:.1e})")


def hermitian_part(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + np.conj(np.swapaxes(mat, -1, -2)))


def matrix_power_pos(H, t: float) -> np.ndarray:
    """H**t for Hermitian positive-definite H via H = U diag(w) U*."""
    H = as_matrix(H)
    check_hermitian(H)
    w, U = la.eigh(hermitian_part(H))
    if w[0] <= PD_FLOOR:
        raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3e} is below {PD_FLOOR:.1e}")
    return hermitian_part((U * w**t) @ U.conj().T)


def op_norm(mat) -> float:
    """Spectral norm (largest singular value)."""
    return float(np.linalg.norm(np.asarray(mat), 2))


def op_norms(mats: np.ndarray) -> np.ndarray:
    """Spectral norms of a stack (K, N, N)."""
    return np.linalg.norm(mats, ord=2, axis=(-2, -1))
