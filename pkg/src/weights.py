"""Builders for the weights and perturbations used across experiments and tests."""

import numpy as np

from src.circle_fourier import (
    TWO_PI,
    Arc,
    ArcPartition,
    PiecewiseArcs,
    Sampled,
    sample_function,
    uniform_partition,
)
from src.config import GRID_SIZE

E12 = np.array([[0, 1], [0, 0]], dtype=complex)
E21 = np.array([[0, 0], [1, 0]], dtype=complex)
R0_EIGHT_ARC = float(np.sqrt(2.0 + 2.0 * np.sqrt(2.0)))


def coupling_matrix(r: float, theta) -> np.ndarray:
    """[[s, r e^{iθ}], [r e^{-iθ}, s]] with s = √(1 + r²), stacked over θ."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    s = np.sqrt(1.0 + r * r)
    out = np.empty((theta.size, 2, 2), dtype=complex)
    out[:, 0, 0] = out[:, 1, 1] = s
    out[:, 0, 1] = r * np.exp(1j * theta)
    out[:, 1, 0] = r * np.exp(-1j * theta)
    return out


def coupled_weight(r: float, grid_size: int = GRID_SIZE) -> Sampled:
    """W^{(r)}; its outer factor at 0 is diag((1+r²)^{1/4}, (1+r²)^{-1/4})."""
    if r < 0:
        raise ValueError("r must be non-negative")
    return sample_function(lambda theta: coupling_matrix(r, theta), grid_size)


def single_frequency_delta(grid_size: int = 64) -> Sampled:
    """γE₁₂ + γ̄E₂₁."""

    def values(theta):
        g = np.exp(1j * theta)[:, None, None]
        return g * E12 + g.conj() * E21

    return sample_function(values, grid_size)


def block_embedding(f_values) -> np.ndarray:
    """Scalar values f ↦ [[0, f̄], [f, 0]]."""
    f = np.asarray(f_values, dtype=complex)
    out = np.zeros((f.size, 2, 2), dtype=complex)
    out[:, 0, 1] = f.conj()
    out[:, 1, 0] = f
    return out


def thirds() -> ArcPartition:
    """T_k = [2(k−1)π/3, 2kπ/3)."""
    return uniform_partition(3)


def quadrants() -> ArcPartition:
    """Q_k = [(k−1)π/2, kπ/2)."""
    return uniform_partition(4)


def three_arc_perturbation(alpha: complex = 1j, swapped: bool = False) -> PiecewiseArcs:
    """Block embedding of α·1_{S₁} + 1_{S₂} with S = (T₁, T₂, T₃), or S′ = (T₁, T₃, T₂)."""
    f = [alpha, 0.0, 1.0] if swapped else [alpha, 1.0, 0.0]
    return PiecewiseArcs(thirds(), block_embedding(f))


def delta_alpha(alpha: complex) -> np.ndarray:
    return np.array([[0, np.conj(alpha)], [alpha, 0]], dtype=complex)


def h_alpha(alpha: complex) -> PiecewiseArcs:
    """α1_{Q₁} − ᾱ1_{Q₂} − α1_{Q₃} + ᾱ1_{Q₄} as a 1×1 function."""
    a = complex(alpha)
    return PiecewiseArcs(quadrants(), np.array([a, -a.conjugate(), -a, a.conjugate()]))


def quadrant_weight(alpha: complex, eps: float, symmetric: bool = False) -> PiecewiseArcs:
    """A = I + εδ_α on Q₁ with inverses and conjugates on the other quadrants.

    The default arrangement is (A, Ā⁻¹, A⁻¹, Ā); the symmetric one is
    (A, Ā⁻¹, Ā, A⁻¹), which satisfies W(γ̄)W(γ) = I.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    A = np.eye(2) + eps * delta_alpha(alpha)
    A_bar = A.conj()
    if symmetric:
        values = [A, np.linalg.inv(A_bar), A_bar, np.linalg.inv(A)]
    else:
        values = [A, np.linalg.inv(A_bar), np.linalg.inv(A), A_bar]
    return PiecewiseArcs(quadrants(), np.array(values))


def eight_arc_weights(r: float = R0_EIGHT_ARC) -> tuple[PiecewiseArcs, PiecewiseArcs]:
    """W^{(r)} frozen at the centre of each J_k = [(k−1)π/4, kπ/4), and at the conjugate centre."""
    partition = uniform_partition(8)
    centres = TWO_PI * (np.arange(8) + 0.5) / 8
    return (
        PiecewiseArcs(partition, coupling_matrix(r, centres)),
        PiecewiseArcs(partition, coupling_matrix(r, -centres)),
    )


def two_valued_weight(A0, A1, gamma1: tuple[Arc, ...]) -> PiecewiseArcs:
    """A₁ on the arcs of Γ₁ and A₀ on the complementary arcs."""
    gamma1 = tuple(sorted(gamma1, key=lambda arc: arc.start))
    arcs: list[Arc] = []
    values = []
    for k, arc in enumerate(gamma1):
        nxt = gamma1[(k + 1) % len(gamma1)]
        arcs.append(arc)
        values.append(A1)
        gap_start = arc.start + arc.length
        gap = (nxt.start - gap_start) % TWO_PI
        if gap > 1e-15:
            arcs.append(Arc(gap_start, gap_start + gap))
            values.append(A0)
    return PiecewiseArcs(ArcPartition(tuple(arcs)), np.array(values, dtype=complex))


def random_pd_matrix(rng: np.random.Generator, dim: int, spread: float = 4.0) -> np.ndarray:
    """Hermitian PD matrix with eigenvalues in [1, spread] and a random eigenbasis."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(z)
    eigs = rng.uniform(1.0, spread, size=dim)
    return (q * eigs) @ q.conj().T


def random_partition(rng: np.random.Generator, pieces: int) -> ArcPartition:
    cuts = np.sort(rng.uniform(0.0, TWO_PI, size=pieces))
    return ArcPartition(tuple(Arc(cuts[k], cuts[(k + 1) % pieces]) for k in range(pieces)))


def random_piecewise_weight(
    rng: np.random.Generator, dim: int = 2, pieces: int = 4, spread: float = 4.0
) -> PiecewiseArcs:
    partition = random_partition(rng, pieces)
    return PiecewiseArcs(partition, np.array([random_pd_matrix(rng, dim, spread) for _ in range(pieces)]))


def random_perturbation(
    rng: np.random.Generator, dim: int = 2, pieces: int = 4, contraction: float = 0.5
) -> PiecewiseArcs:
    """Hermitian piecewise Δ with sup norm exactly `contraction`."""
    partition = random_partition(rng, pieces)
    values = []
    for _ in range(pieces):
        z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        values.append(z + z.conj().T)
    values = np.array(values)
    values *= contraction / np.max(np.linalg.norm(values, 2, axis=(1, 2)))
    return PiecewiseArcs(partition, values)


def self_dual_weight(eps: float, grid_size: int = GRID_SIZE) -> Sampled:
    """exp(εδ(γ)) with δ(γ) = (sin θ)·σ_x, so δ(γ̄) = −δ(γ) and W(γ̄)W(γ) = I."""
    sigma = np.array([[0, 1], [1, 0]], dtype=complex)

    def values(theta):
        t = eps * np.sin(theta)
        return np.cosh(t)[:, None, None] * np.eye(2) + np.sinh(t)[:, None, None] * sigma

    return sample_function(values, grid_size)


def scalar_outer_weight(grid_size: int = 256) -> Sampled:
    """diag(|1 + γ/2|², |1 + γ/2|²); its outer factor at 0 is I."""

    def values(theta):
        w = np.abs(1.0 + 0.5 * np.exp(1j * theta)) ** 2
        return w[:, None, None] * np.eye(2)

    return sample_function(values, grid_size)


def smooth_weight(
    rng: np.random.Generator, dim: int = 2, degree: int = 1, scale: float = 0.3, grid_size: int = GRID_SIZE
) -> Sampled:
    """exp(H(γ)) for a random Hermitian trigonometric polynomial H with ‖H‖∞ ≤ (2·degree + 1)·scale.

    The weight extends to an invertible entire function of γ ≠ 0, so its outer
    factor and the Toeplitz solution converge faster than any power of 1/M.
    """

    def block():
        z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        return scale * z / np.linalg.norm(z, 2)

    h0 = block()
    h0 = 0.5 * (h0 + h0.conj().T)
    blocks = [block() for _ in range(degree)]

    def values(theta):
        H = np.broadcast_to(h0, (theta.size, dim, dim)).copy()
        for k, B in enumerate(blocks, start=1):
            g = np.exp(1j * k * theta)[:, None, None]
            H += g * B + g.conj() * B.conj().T
        eigs, vecs = np.linalg.eigh(H)
        return (vecs * np.exp(eigs)[:, None, :]) @ vecs.conj().transpose(0, 2, 1)

    return sample_function(values, grid_size)
