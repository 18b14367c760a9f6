"""Distorted Hilbert norms on ℂ^N and interpolation of weighted families at 0.

The space ℓ²_A carries the norm x ↦ ‖Ax‖. Interpolating the family of
weighted norms ‖W(γ)^{1/2}x‖ at the origin gives ℓ²_{F(0)} where F is the
outer factor of W, so comparing two families reduces to comparing their
F(0) values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from src.circle_fourier import (
    TWO_PI,
    Arc,
    ArcPartition,
    MatrixCircleFunction,
    PiecewiseArcs,
    Sampled,
    sample_function,
    sample_on_grid,
)
from src.config import GRID_SIZE, TRUNCATION
from src.errors import ClosedFormMismatch, DimensionMismatch, IncompatibleRepresentation, Singular
from src.inner_maps import BlaschkeZero, InnerMap, PartitionDerived, Power, boundary_value, preimage
from src.matrix_utils import as_matrix, hermitian_part, matrix_power_pos, op_norm
from src.spectral_factorization import factor_at_zero

logger = logging.getLogger(__name__)

SINGULAR_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class DistortedHilbert:
    A: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A)
        smallest = np.linalg.svd(A, compute_uv=False)[-1]
        if smallest <= SINGULAR_FLOOR:
            raise Singular(f"smallest singular value {smallest:.3e} is not above {SINGULAR_FLOOR}")
        object.__setattr__(self, "A", A)

    @property
    def dim(self) -> int:
        return self.A.shape[0]


def norm_in(space: DistortedHilbert, x) -> float:
    x = np.asarray(x, dtype=complex)
    if x.shape != (space.dim,):
        raise DimensionMismatch(f"vector of shape {x.shape} in a space of dimension {space.dim}")
    return float(np.linalg.norm(space.A @ x))


def pairing(x, y) -> complex:
    """Bilinear pairing Σ x_n y_n."""
    return complex(np.sum(np.asarray(x) * np.asarray(y)))


def dual_space(space: DistortedHilbert) -> DistortedHilbert:
    return DistortedHilbert(np.linalg.inv(space.A).T)


def conjugate_space(space: DistortedHilbert) -> DistortedHilbert:
    return DistortedHilbert(space.A.conj())


def conj_dual_space(space: DistortedHilbert) -> DistortedHilbert:
    return DistortedHilbert(np.linalg.inv(space.A.conj().T))


def interpolate_at_zero(W: MatrixCircleFunction, M: int = TRUNCATION, **solver) -> DistortedHilbert:
    return DistortedHilbert(factor_at_zero(W, M, **solver).F0)


def two_valued_factor(A0, A1, theta: float) -> np.ndarray:
    """A₀^{1/2}(A₀^{-1/2} A₁ A₀^{-1/2})^θ A₀^{1/2}, i.e. |F(0)|² for a two-valued weight.

    The same matrix pivoting on A₁ with exponent 1 − θ is computed as a check;
    ClosedFormMismatch is raised when the two differ by more than 1e-10.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    A0, A1 = as_matrix(A0), as_matrix(A1)
    if A0.shape != A1.shape:
        raise DimensionMismatch(f"shapes {A0.shape} and {A1.shape} differ")
    result = _geodesic(A0, A1, theta)
    mirrored = _geodesic(A1, A0, 1.0 - theta)
    gap = float(np.max(np.abs(result - mirrored)))
    if gap > 1e-10 * max(1.0, float(np.max(np.abs(result)))):
        raise ClosedFormMismatch(f"two-valued closed forms disagree by {gap:.2e}")
    return result


def _geodesic(A0: np.ndarray, A1: np.ndarray, theta: float) -> np.ndarray:
    half = matrix_power_pos(A0, 0.5)
    inv_half = matrix_power_pos(A0, -0.5)
    inner = hermitian_part(inv_half @ A1 @ inv_half)
    return hermitian_part(half @ matrix_power_pos(inner, theta) @ half)


@dataclass(frozen=True)
class Rotation:
    beta: float


@dataclass(frozen=True)
class Conjugation:
    pass


@dataclass(frozen=True)
class ArcPermutation:
    """values[k] of the result is values[permutation[k]] of the source."""

    permutation: tuple[int, ...]


@dataclass(frozen=True)
class InnerComposition:
    map: InnerMap


RearrangementMap = Rotation | Conjugation | ArcPermutation | InnerComposition


def _pointwise(rmap: RearrangementMap, theta: np.ndarray) -> np.ndarray:
    """Angles of the rearranged point for each θ."""
    if isinstance(rmap, Rotation):
        return theta + rmap.beta
    if isinstance(rmap, Conjugation):
        return -theta
    return np.angle(boundary_value(rmap.map, theta))


def _resample(W: MatrixCircleFunction, rmap: RearrangementMap, grid_size: int, offset: float) -> Sampled:
    def composed(theta):
        return W.evaluate(np.mod(_pointwise(rmap, theta), TWO_PI))

    return sample_function(composed, grid_size, offset)


def _rearrange_pieces(W: PiecewiseArcs, rmap: RearrangementMap) -> PiecewiseArcs | None:
    arcs = W.partition.arcs
    if isinstance(rmap, Rotation):
        return PiecewiseArcs(ArcPartition(tuple(a.rotated(-rmap.beta) for a in arcs)), W.values)
    if isinstance(rmap, Conjugation):
        return PiecewiseArcs(ArcPartition(tuple(a.conjugated() for a in arcs)), W.values)
    if isinstance(rmap, InnerComposition) and isinstance(rmap.map, Power | BlaschkeZero):
        new_arcs: list[Arc] = []
        new_values = []
        for arc, value in zip(arcs, W.values, strict=True):
            pieces = preimage(rmap.map, arc)
            new_arcs.extend(pieces)
            new_values.extend([value] * len(pieces))
        return PiecewiseArcs(ArcPartition(tuple(new_arcs), tol=1e-10), np.array(new_values))
    return None


def _permute_samples(W: Sampled, rmap: RearrangementMap) -> Sampled | None:
    size = W.grid_size
    j = np.arange(size)
    if isinstance(rmap, Rotation):
        shift = rmap.beta * size / TWO_PI
        if abs(shift - round(shift)) < 1e-9:
            return Sampled(W.samples[np.mod(j + round(shift), size)], W.offset)
        return None
    if isinstance(rmap, Conjugation):
        if W.offset == 0.0:
            return Sampled(W.samples[np.mod(-j, size)], 0.0)
        if W.offset == 0.5:
            return Sampled(W.samples[np.mod(-j - 1, size)], 0.5)
        return None
    if isinstance(rmap, InnerComposition) and isinstance(rmap.map, Power) and W.offset == 0.0:
        return Sampled(W.samples[np.mod(rmap.map.n * j, size)], 0.0)
    return None


def rearrange(
    W: MatrixCircleFunction, rmap: RearrangementMap, grid_size: int = GRID_SIZE
) -> MatrixCircleFunction:
    """W ∘ map, kept exact wherever the representation allows it."""
    if isinstance(rmap, ArcPermutation):
        if not isinstance(W, PiecewiseArcs):
            raise IncompatibleRepresentation("arc permutations act on piecewise functions only")
        perm = tuple(rmap.permutation)
        if sorted(perm) != list(range(len(W.partition))):
            raise IncompatibleRepresentation(f"{perm} is not a permutation of the arcs")
        measures = W.partition.measures
        if np.max(np.abs(measures - measures[list(perm)])) > 1e-12:
            raise IncompatibleRepresentation("permuted arcs must have equal measures")
        return PiecewiseArcs(W.partition, W.values[list(perm)])
    if isinstance(W, PiecewiseArcs):
        exact = _rearrange_pieces(W, rmap)
        if exact is not None:
            return exact
        offset = 0.5 if isinstance(rmap, InnerComposition) else 0.0
        return _resample(W, rmap, grid_size, offset)
    exact = _permute_samples(W, rmap)
    if exact is not None:
        return exact
    if isinstance(rmap, InnerComposition) and isinstance(rmap.map, PartitionDerived):
        return _resample(W, rmap, W.grid_size, 0.5)
    return _resample(W, rmap, W.grid_size, W.offset)


def operator_distortion(F0_a: np.ndarray, F0_b: np.ndarray) -> float:
    """‖F0_a F0_b^{-1}‖, the norm of the identity from ℓ²_{F0_b} to ℓ²_{F0_a}."""
    return op_norm(np.linalg.solve(F0_b.T, F0_a.T).T)


def distortion_norm(
    W: MatrixCircleFunction, W2: MatrixCircleFunction, M: int = TRUNCATION, **solver
) -> float:
    if W.dim != W2.dim:
        raise DimensionMismatch(f"weights of dimension {W.dim} and {W2.dim}")
    first = factor_at_zero(W, M, **solver)
    second = factor_at_zero(W2, M, **solver)
    value = operator_distortion(first.F0, second.F0)
    logger.info(f"Distortion between weights at M={M}: {value:.12g}")
    return value


def sampled_copy(W: MatrixCircleFunction, grid_size: int = GRID_SIZE, offset: float = 0.0) -> Sampled:
    """W on a uniform grid."""
    return Sampled(sample_on_grid(W, grid_size, offset), offset)
