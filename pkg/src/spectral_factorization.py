"""|F_W(0)|² for matrix weights through the truncated Toeplitz equation.

The weight is scaled to W = λ(I + Δ) with ‖Δ‖∞ < 1, the equation
Ψ + P_M P₊(ΔΨ) = P_M P₊Δ is solved for Ψ on frequencies 1..M, and
|F_W(0)|² is the mean of Φ*WΦ with Φ = I − Ψ.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from scipy.sparse.linalg import LinearOperator, cg

from src.circle_fourier import (
    TWO_PI,
    MatrixCircleFunction,
    MatrixFourierCoeffs,
    PiecewiseArcs,
    fourier_coeff,
    fourier_coeffs,
    pplus_energy,
    sample_on_grid,
    synthesize_on_grid,
)
from src.config import (
    CONSTANCY_GUARD,
    CONSTANCY_WARN_TOL,
    HERMITIAN_TOL,
    NEUMANN_TOL,
    PD_FLOOR,
    RICHARDSON,
    SERIES_N_MAX,
    SOLVER_METHOD,
    TRUNCATION,
)
from src.errors import DimensionMismatch, NoConvergence, NotPositiveDefinite, SingularSystem
from src.matrix_utils import check_hermitian, hermitian_part, matrix_power_pos, op_norms

logger = logging.getLogger(__name__)

METHODS = ("neumann", "direct", "cg")
DIRECT_LIMIT = 8192
CG_RTOL = 1e-13

__all__ = [
    "METHODS",
    "FactorizationResult",
    "NormalizedPerturbation",
    "WeightBounds",
    "factor_at_zero",
    "matrix_power_pos",
    "normalize",
    "perturbation_norm",
    "second_order_approx",
    "solve_psi",
    "szego_geometric_mean",
    "toeplitz_apply",
    "weight_bounds",
]


@dataclass(frozen=True)
class WeightBounds:
    c: float
    C: float


@dataclass(frozen=True, eq=False)
class NormalizedPerturbation:
    lam: float
    delta: MatrixCircleFunction
    contraction: float


@dataclass(frozen=True, eq=False)
class FactorizationResult:
    M0: np.ndarray
    F0: np.ndarray
    constancy_residual: float
    neumann_ratio: float
    truncation: int
    constancy_rms: float
    M0_raw: np.ndarray
    extrapolated: bool
    non_constant: bool
    method: str
    iterations: int


def weight_bounds(W: MatrixCircleFunction) -> WeightBounds:
    values = W.point_values()
    check_hermitian(values, HERMITIAN_TOL, what="weight value")
    eigs = np.linalg.eigvalsh(hermitian_part(values))
    c, C = float(eigs[:, 0].min()), float(eigs[:, -1].max())
    if c <= PD_FLOOR:
        raise NotPositiveDefinite(f"weight has eigenvalue {c:.3e} at or below {PD_FLOOR:.1e}")
    return WeightBounds(c, C)


def perturbation_norm(delta: MatrixCircleFunction) -> float:
    """‖Δ‖∞ over pieces or samples."""
    return float(np.max(op_norms(delta.point_values())))


def normalize(W: MatrixCircleFunction) -> NormalizedPerturbation:
    bounds = weight_bounds(W)
    lam = 0.5 * (bounds.c + bounds.C)
    eye = np.eye(W.dim)
    delta = W.map_values(lambda value: hermitian_part(value) / lam - eye)
    contraction = float(np.max(np.abs(np.linalg.eigvalsh(delta.point_values()))))
    bound = (bounds.C - bounds.c) / (bounds.C + bounds.c)
    if contraction > bound + 1e-12:
        raise ArithmeticError(f"contraction {contraction} exceeds certified bound {bound}")
    return NormalizedPerturbation(lam, delta, contraction)


class _BlockToeplitz:
    """y_m = Σ_n D(m − n) x_n for 0 ≤ m, n < size, by circulant embedding and FFT."""

    def __init__(self, coeffs: MatrixFourierCoeffs, size: int):
        if coeffs.truncation < size - 1:
            raise DimensionMismatch(
                f"need coefficients up to |n| = {size - 1}, have {coeffs.truncation}"
            )
        self.size = size
        self.dim = coeffs.dim
        self.length = 1 << max(1, math.ceil(math.log2(2 * size)))
        mid = coeffs.truncation
        symbol = np.zeros((self.length, self.dim, self.dim), dtype=complex)
        symbol[:size] = coeffs.table[mid : mid + size]
        if size > 1:
            symbol[self.length - size + 1 :] = coeffs.table[mid - size + 1 : mid]
        self._symbol = np.fft.fft(symbol, axis=0)

    def apply(self, x: np.ndarray) -> np.ndarray:
        padded = np.zeros((self.length,) + x.shape[1:], dtype=complex)
        padded[: self.size] = x
        spectrum = np.fft.fft(padded, axis=0)
        product = np.einsum("lij,lj...->li...", self._symbol, spectrum)
        return np.fft.ifft(product, axis=0)[: self.size]

    def dense(self, coeffs: MatrixFourierCoeffs) -> np.ndarray:
        m = np.arange(self.size)
        blocks = coeffs.table[m[:, None] - m[None, :] + coeffs.truncation]
        n = self.size * self.dim
        return blocks.transpose(0, 2, 1, 3).reshape(n, n)


def toeplitz_apply(delta_coeffs: MatrixFourierCoeffs, psi: MatrixFourierCoeffs) -> MatrixFourierCoeffs:
    """P_M P₊(ΔΨ) for Ψ supported on 1..M."""
    if delta_coeffs.dim != psi.dim:
        raise DimensionMismatch(f"dimension {delta_coeffs.dim} vs {psi.dim}")
    size = psi.truncation
    out = MatrixFourierCoeffs.zeros(size, psi.dim)
    if size == 0:
        return out
    op = _BlockToeplitz(delta_coeffs, size)
    out.table[size + 1 :] = op.apply(psi.positive())
    return out


def _neumann(op: _BlockToeplitz, rhs: np.ndarray, contraction: float) -> tuple[np.ndarray, float, int]:
    if contraction >= 1.0 - 1e-9:
        raise NoConvergence(f"Neumann series needs contraction < 1, got {contraction}")
    if contraction <= 0.0:
        max_iter = 1
    else:
        max_iter = max(1, math.ceil(10 * math.log(NEUMANN_TOL) / math.log(contraction)))
    term = np.array(rhs)
    psi = np.array(rhs)
    previous = float(np.linalg.norm(term))
    ratio = 0.0
    iterations = 0
    while previous >= NEUMANN_TOL and iterations < max_iter:
        term = -op.apply(term)
        current = float(np.linalg.norm(term))
        ratio = current / previous
        psi += term
        previous = current
        iterations += 1
    if previous >= NEUMANN_TOL:
        logger.warning(f"Neumann series stopped after {iterations} terms with update {previous:.2e}")
    return psi, ratio, iterations


def _direct(op: _BlockToeplitz, coeffs: MatrixFourierCoeffs, rhs: np.ndarray) -> np.ndarray:
    n = op.size * op.dim
    if n > DIRECT_LIMIT:
        raise ValueError(f"direct solver limited to M*N <= {DIRECT_LIMIT}, got {n}")
    system = np.eye(n) + op.dense(coeffs)
    try:
        solution = la.solve(system, rhs.reshape(n, op.dim), assume_a="her")
    except la.LinAlgError as e:
        raise SingularSystem(f"block Toeplitz system is singular: {e}") from e
    if not np.all(np.isfinite(solution)):
        raise SingularSystem("block Toeplitz solve produced non-finite values")
    return solution.reshape(op.size, op.dim, op.dim)


def _conjugate_gradient(op: _BlockToeplitz, rhs: np.ndarray) -> tuple[np.ndarray, int]:
    size, dim = op.size, op.dim
    n = size * dim

    def matvec(v):
        x = np.asarray(v).reshape(size, dim)
        return (x + op.apply(x)).reshape(n)

    system = LinearOperator((n, n), matvec=matvec, dtype=complex)
    psi = np.zeros_like(rhs)
    total = 0
    for j in range(dim):
        b = rhs[:, :, j].reshape(n)
        scale = float(np.linalg.norm(b))
        if scale == 0.0:
            continue
        count = 0

        def inc(_):
            nonlocal count
            count += 1

        x, info = cg(system, b, rtol=CG_RTOL, atol=0.0, maxiter=10 * n, callback=inc)
        total += count
        if info != 0:
            residual = float(np.linalg.norm(b - matvec(x))) / scale
            if residual > 1e-10:
                raise NoConvergence(f"CG stalled on column {j} with relative residual {residual:.2e}")
            logger.warning(f"CG column {j} stopped at relative residual {residual:.2e}")
        psi[:, :, j] = x.reshape(size, dim)
    return psi, total


def _solve(
    coeffs: MatrixFourierCoeffs, size: int, method: str, contraction: float
) -> tuple[np.ndarray, float, int]:
    if method not in METHODS:
        raise ValueError(f"unknown solver method '{method}', expected one of {METHODS}")
    mid = coeffs.truncation
    rhs = np.array(coeffs.table[mid + 1 : mid + 1 + size])
    op = _BlockToeplitz(coeffs, size)
    if method == "neumann":
        return _neumann(op, rhs, contraction)
    if method == "direct":
        return _direct(op, coeffs, rhs), contraction, 1
    psi, iterations = _conjugate_gradient(op, rhs)
    return psi, contraction, iterations


def solve_psi(
    delta: MatrixCircleFunction,
    M: int,
    method: str = SOLVER_METHOD,
    contraction: float | None = None,
) -> MatrixFourierCoeffs:
    """Ψ on 1..M with Ψ_m + Σ_n Δ̂(m − n)Ψ_n = Δ̂(m)."""
    if M < 1:
        raise ValueError("truncation M must be at least 1")
    if contraction is None:
        contraction = perturbation_norm(delta)
    coeffs = fourier_coeffs(delta, M)
    psi, _, _ = _solve(coeffs, M, method, contraction)
    out = MatrixFourierCoeffs.zeros(M, delta.dim)
    out.table[M + 1 :] = psi
    return out


def _galerkin(norm: NormalizedPerturbation, M: int, method: str):
    """Raw M0, the Φ coefficients 0..M, the ratio and iteration count."""
    coeffs = fourier_coeffs(norm.delta, M)
    psi, ratio, iterations = _solve(coeffs, M, method, norm.contraction)
    dim = norm.delta.dim
    phi = np.empty((M + 1, dim, dim), dtype=complex)
    phi[0] = np.eye(dim)
    phi[1:] = -psi
    weight = MatrixFourierCoeffs(np.array(coeffs.table))
    weight.table[M] += np.eye(dim)
    # mean of Φ*WΦ is Σ_{m,n} Φ̂(m)* Ŵ(m − n) Φ̂(n)
    image = _BlockToeplitz(weight, M + 1).apply(phi)
    m0 = norm.lam * np.einsum("mji,mjk->ik", phi.conj(), image)
    return hermitian_part(m0), phi, ratio, iterations


def _constancy(W: MatrixCircleFunction, phi: np.ndarray, m0: np.ndarray) -> tuple[float, float]:
    M = phi.shape[0] - 1
    grid = max(1024, 8 * M)
    table = np.zeros((2 * M + 1,) + phi.shape[1:], dtype=complex)
    table[M:] = phi
    phi_values = synthesize_on_grid(MatrixFourierCoeffs(table), grid, 0.5)
    w_values = sample_on_grid(W, grid, 0.5)
    product = np.einsum("tji,tjk,tkl->til", phi_values.conj(), w_values, phi_values)
    deviation = op_norms(product - m0)
    rms = float(np.sqrt(np.mean(deviation**2)))
    keep = np.ones(grid, dtype=bool)
    jumps = W.discontinuities() if isinstance(W, PiecewiseArcs) else np.empty(0)
    if jumps.size:
        theta = TWO_PI * (np.arange(grid) + 0.5) / grid
        distance = np.abs(np.angle(np.exp(1j * (theta[:, None] - jumps[None, :]))))
        keep = np.min(distance, axis=1) >= CONSTANCY_GUARD
        if not np.any(keep):
            keep[:] = True
    return float(np.max(deviation[keep])), rms


def factor_at_zero(
    W: MatrixCircleFunction,
    M: int = TRUNCATION,
    method: str = SOLVER_METHOD,
    richardson: bool = RICHARDSON,
) -> FactorizationResult:
    """|F_W(0)|² and its positive square root for an admissible weight W."""
    if M < 1:
        raise ValueError("truncation M must be at least 1")
    norm = normalize(W)
    raw, phi, ratio, iterations = _galerkin(norm, M, method)
    m0 = raw
    extrapolated = False
    if richardson and M >= 8:
        half, _, _, more = _galerkin(norm, M // 2, method)
        iterations += more
        candidate = hermitian_part(2.0 * raw - half)
        if np.linalg.norm(candidate - raw) > 1e-14:
            if np.linalg.eigvalsh(candidate)[0] > PD_FLOOR:
                m0, extrapolated = candidate, True
            else:
                logger.warning("Richardson extrapolate is not positive definite; keeping raw M0")
    residual, rms = _constancy(W, phi, m0)
    non_constant = residual > CONSTANCY_WARN_TOL
    if non_constant:
        logger.warning(
            f"Phi*W*Phi deviates from its mean by {residual:.2e} at M={M}; increase the truncation"
        )
    logger.info(
        f"Factored {W.dim}x{W.dim} weight at M={M} ({method}): residual {residual:.2e}, "
        f"iterations {iterations}"
    )
    return FactorizationResult(
        M0=m0,
        F0=matrix_power_pos(m0, 0.5),
        constancy_residual=residual,
        neumann_ratio=ratio,
        truncation=M,
        constancy_rms=rms,
        M0_raw=raw,
        extrapolated=extrapolated,
        non_constant=non_constant,
        method=method,
        iterations=iterations,
    )


def second_order_approx(
    delta: MatrixCircleFunction, eps: float, n_max: int = SERIES_N_MAX
) -> np.ndarray:
    """I + εΔ̂(0) − ε² Σ_{n≥1} Δ̂(n)*Δ̂(n)."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if eps * perturbation_norm(delta) >= 1.0:
        raise ValueError("eps * ||delta|| must stay below 1")
    energy, _ = pplus_energy(delta, n_max)
    return np.eye(delta.dim) + eps * fourier_coeff(delta, 0) - eps**2 * energy


def szego_geometric_mean(W: MatrixCircleFunction) -> np.ndarray:
    """diag(exp ∫ log w_k dm) for a diagonal weight."""
    values = W.point_values()
    off = values - np.einsum("kii->ki", values)[:, :, None] * np.eye(W.dim)
    if np.max(np.abs(off)) > HERMITIAN_TOL:
        raise ValueError("geometric mean oracle needs a diagonal weight")
    diag = np.einsum("kii->ki", values)
    if np.max(np.abs(diag.imag)) > HERMITIAN_TOL or np.min(diag.real) <= PD_FLOOR:
        raise NotPositiveDefinite("diagonal entries must be real and positive")
    logs = np.log(diag.real)
    if isinstance(W, PiecewiseArcs):
        mean_log = W.partition.measures @ logs
    else:
        mean_log = logs.mean(axis=0)
    return np.diag(np.exp(mean_log)).astype(complex)
