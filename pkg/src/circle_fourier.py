"""Fourier analysis of matrix-valued functions on the unit circle.

Angles are radians, the measure is normalized (dθ/2π) and arcs are half-open
``[start, end)``, possibly wrapping across 2π.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from src.config import HERMITIAN_TOL, SERIES_N_MAX
from src.errors import DimensionMismatch, SampledAliasing
from src.matrix_utils import as_matrix, check_hermitian, hermitian_part

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
_CHUNK = 1 << 15


def canonical_angle(theta: float) -> float:
    """Reduce an angle to [0, 2π)."""
    value = float(theta) % TWO_PI
    return 0.0 if value >= TWO_PI else value


@dataclass(frozen=True)
class Arc:
    """Half-open arc [start, end); start == end after reduction means the full circle."""

    start: float
    end: float

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise ValueError("arc endpoints must be finite")
        object.__setattr__(self, "start", canonical_angle(self.start))
        object.__setattr__(self, "end", canonical_angle(self.end))

    @property
    def length(self) -> float:
        span = (self.end - self.start) % TWO_PI
        return TWO_PI if span == 0.0 else span

    @property
    def measure(self) -> float:
        return self.length / TWO_PI

    @property
    def is_full(self) -> bool:
        return self.start == self.end

    def contains(self, theta) -> np.ndarray:
        return np.mod(np.asarray(theta, dtype=float) - self.start, TWO_PI) < self.length

    def rotated(self, beta: float) -> Arc:
        if self.is_full:
            return self
        return Arc(self.start + beta, self.start + beta + self.length)

    def conjugated(self) -> Arc:
        """Image under θ ↦ −θ (up to the endpoints, a null set)."""
        if self.is_full:
            return self
        return Arc(-self.end, -self.start)


def arc_overlap(a: Arc, b: Arc) -> float:
    """Normalized measure of a ∩ b."""
    la, lb = a.length, b.length
    s = (b.start - a.start) % TWO_PI
    first = max(0.0, min(la, s + lb) - s)
    wrapped = max(0.0, min(la, s + lb - TWO_PI))
    return (first + wrapped) / TWO_PI


@dataclass(frozen=True)
class ArcPartition:
    arcs: tuple[Arc, ...]
    tol: float = field(default=1e-12, compare=False)

    def __post_init__(self):
        arcs = tuple(self.arcs)
        object.__setattr__(self, "arcs", arcs)
        if not arcs:
            raise ValueError("partition needs at least one arc")
        total = math.fsum(arc.measure for arc in arcs)
        if abs(total - 1.0) > self.tol:
            raise ValueError(f"arc measures sum to {total!r}, expected 1")
        for i, a in enumerate(arcs):
            for b in arcs[i + 1 :]:
                if arc_overlap(a, b) > self.tol:
                    raise ValueError(f"arcs {a} and {b} overlap")

    def __len__(self) -> int:
        return len(self.arcs)

    @property
    def measures(self) -> np.ndarray:
        return np.array([arc.measure for arc in self.arcs])

    def locate(self, theta) -> np.ndarray:
        """Index of the arc containing each angle."""
        theta = np.asarray(theta, dtype=float)
        index = np.full(theta.shape, -1, dtype=int)
        for k, arc in enumerate(self.arcs):
            index[(index < 0) & arc.contains(theta)] = k
        # endpoints can fall through by rounding; assign them to the nearest start
        missing = index < 0
        if np.any(missing):
            starts = np.array([arc.start for arc in self.arcs])
            gap = np.abs(np.angle(np.exp(1j * (theta[missing][:, None] - starts[None, :]))))
            index[missing] = np.argmin(gap, axis=1)
        return index


def uniform_partition(k: int, start: float = 0.0) -> ArcPartition:
    """k consecutive arcs of measure 1/k beginning at `start`."""
    edges = start + TWO_PI * np.arange(k + 1) / k
    return ArcPartition(tuple(Arc(edges[j], edges[j + 1]) for j in range(k)))


def _stack(values) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if arr.ndim == 1:
        arr = arr[:, None, None]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise DimensionMismatch(f"expected a stack of square matrices, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix values must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class PiecewiseArcs:
    """Matrix function taking values[k] on partition.arcs[k]."""

    partition: ArcPartition
    values: np.ndarray

    def __post_init__(self):
        values = _stack(self.values)
        if values.shape[0] != len(self.partition):
            raise DimensionMismatch(
                f"{values.shape[0]} values for a partition of {len(self.partition)} arcs"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def point_values(self) -> np.ndarray:
        return self.values

    def map_values(self, func: Callable[[np.ndarray], np.ndarray]) -> PiecewiseArcs:
        return PiecewiseArcs(self.partition, np.array([func(v) for v in self.values]))

    def evaluate(self, theta) -> np.ndarray:
        return self.values[self.partition.locate(theta)]

    def discontinuities(self) -> np.ndarray:
        """Arc endpoints where the value actually jumps."""
        points = []
        for k, arc in enumerate(self.partition.arcs):
            if arc.is_full:
                continue
            before = int(self.partition.locate(np.array([arc.start - 1e-9]))[0])
            if before != k and not np.allclose(self.values[before], self.values[k], atol=0.0):
                points.append(arc.start)
        return np.unique(points)


@dataclass(frozen=True, eq=False)
class Sampled:
    """Matrix function sampled at γ_j = exp(2πi(j + offset)/G), G a power of two."""

    samples: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        samples = _stack(self.samples)
        size = samples.shape[0]
        if size < 2 or size & (size - 1):
            raise ValueError(f"grid size must be a power of two, got {size}")
        if not 0.0 <= self.offset < 1.0:
            raise ValueError("grid offset must lie in [0, 1)")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def grid_size(self) -> int:
        return self.samples.shape[0]

    @property
    def angles(self) -> np.ndarray:
        return TWO_PI * (np.arange(self.grid_size) + self.offset) / self.grid_size

    def point_values(self) -> np.ndarray:
        return self.samples

    def map_values(self, func: Callable[[np.ndarray], np.ndarray]) -> Sampled:
        return Sampled(np.array([func(v) for v in self.samples]), self.offset)

    def evaluate(self, theta) -> np.ndarray:
        """Trigonometric interpolation through the samples (|n| ≤ G/2 − 1)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        coeffs = fourier_coeffs(self, self.grid_size // 2 - 1)
        return evaluate(coeffs, theta)

    def discontinuities(self) -> np.ndarray:
        return np.empty(0)


MatrixCircleFunction = PiecewiseArcs | Sampled


def constant(value, dim: int | None = None) -> PiecewiseArcs:
    value = as_matrix(value) if dim is None else np.asarray(value, dtype=complex) * np.eye(dim)
    return PiecewiseArcs(ArcPartition((Arc(0.0, TWO_PI),)), value[None])


def sample_function(func: Callable[[np.ndarray], np.ndarray], grid_size: int, offset: float = 0.0) -> Sampled:
    """Sample a vectorized θ ↦ (len θ, N, N) function on a uniform grid."""
    theta = TWO_PI * (np.arange(grid_size) + offset) / grid_size
    return Sampled(np.asarray(func(theta), dtype=complex), offset)


def sample_on_grid(f: MatrixCircleFunction, grid_size: int, offset: float = 0.0) -> np.ndarray:
    """Values of f on a uniform grid; exact for pieces, FFT resampling for samples."""
    if isinstance(f, PiecewiseArcs):
        return f.evaluate(TWO_PI * (np.arange(grid_size) + offset) / grid_size)
    if grid_size == f.grid_size and offset == f.offset:
        return np.array(f.samples)
    coeffs = fourier_coeffs(f, f.grid_size // 2 - 1)
    return synthesize_on_grid(coeffs, grid_size, offset)


@dataclass(frozen=True, eq=False)
class MatrixFourierCoeffs:
    """Coefficients c_n for −M ≤ n ≤ M, stored with c_n at index n + M."""

    table: np.ndarray

    def __post_init__(self):
        table = _stack(self.table)
        if table.shape[0] % 2 != 1:
            raise DimensionMismatch("coefficient table must have odd length 2M + 1")
        object.__setattr__(self, "table", table)

    @classmethod
    def zeros(cls, truncation: int, dim: int) -> MatrixFourierCoeffs:
        return cls(np.zeros((2 * truncation + 1, dim, dim), dtype=complex))

    @property
    def truncation(self) -> int:
        return self.table.shape[0] // 2

    @property
    def dim(self) -> int:
        return self.table.shape[1]

    @property
    def indices(self) -> np.ndarray:
        m = self.truncation
        return np.arange(-m, m + 1)

    def __getitem__(self, n: int) -> np.ndarray:
        m = self.truncation
        if abs(n) > m:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return self.table[n + m]

    def positive(self) -> np.ndarray:
        """c_1 .. c_M as an (M, N, N) array."""
        return self.table[self.truncation + 1 :]


def indicator_fourier(arc: Arc, n):
    """∫_arc γ^{-n} dm; accepts an integer or an integer array."""
    n_arr = np.asarray(n)
    scalar = n_arr.ndim == 0
    n_arr = np.atleast_1d(n_arr).astype(float)
    out = np.empty(n_arr.shape, dtype=complex)
    zero = n_arr == 0
    out[zero] = arc.measure
    nz = n_arr[~zero]
    if arc.is_full:
        out[~zero] = 0.0
    else:
        # end = start + length keeps wrapping arcs consistent
        end = arc.start + arc.length
        out[~zero] = (np.exp(-1j * nz * arc.start) - np.exp(-1j * nz * end)) / (1j * TWO_PI * nz)
    return complex(out[0]) if scalar else out


def fourier_coeffs(f: MatrixCircleFunction, truncation: int) -> MatrixFourierCoeffs:
    """The table c_{−M} .. c_M of f."""
    indices = np.arange(-truncation, truncation + 1)
    if isinstance(f, PiecewiseArcs):
        weights = np.array([indicator_fourier(arc, indices) for arc in f.partition.arcs])
        return MatrixFourierCoeffs(np.einsum("kn,kij->nij", weights, f.values))
    size = f.grid_size
    if truncation > size // 2 - 1:
        raise SampledAliasing(
            f"|n| = {truncation} exceeds G/2 - 1 = {size // 2 - 1} for a grid of {size}"
        )
    spectrum = np.fft.fft(f.samples, axis=0) / size
    phase = np.exp(-1j * TWO_PI * indices * f.offset / size)
    return MatrixFourierCoeffs(phase[:, None, None] * spectrum[np.mod(indices, size)])


def fourier_coeff(f: MatrixCircleFunction, n: int) -> np.ndarray:
    return fourier_coeffs(f, abs(int(n)))[int(n)]


def project_plus(c: MatrixFourierCoeffs) -> MatrixFourierCoeffs:
    table = np.array(c.table)
    table[: c.truncation + 1] = 0.0
    return MatrixFourierCoeffs(table)


def l2_norm_squared(c: MatrixFourierCoeffs) -> float:
    """Σ_n tr(c_n* c_n)."""
    return float(np.sum(np.abs(c.table) ** 2))


def mean_square(f: MatrixCircleFunction) -> float:
    """∫ tr(f* f) dm (grid mean for samples)."""
    pointwise = np.sum(np.abs(f.point_values()) ** 2, axis=(1, 2))
    if isinstance(f, PiecewiseArcs):
        return float(np.dot(f.partition.measures, pointwise))
    return float(np.mean(pointwise))


def _indicator_gram_imag(arcs: Sequence[Arc], n_max: int) -> np.ndarray:
    """Im Σ_{n=1}^{n_max} 1̂_k(n) conj(1̂_l(n)), chunk partials combined with fsum."""
    k = len(arcs)
    starts = np.array([arc.start for arc in arcs])
    ends = starts + np.array([arc.length for arc in arcs])
    partials: list[list[list[float]]] = [[[] for _ in range(k)] for _ in range(k)]
    for lo in range(1, n_max + 1, _CHUNK):
        n = np.arange(lo, min(lo + _CHUNK, n_max + 1), dtype=float)
        # 2πn·1̂(n) without the 1/i factor; |1/i|² cancels in the product
        num = np.exp(-1j * np.outer(starts, n)) - np.exp(-1j * np.outer(ends, n))
        num = num / (TWO_PI * n)
        block = (num @ num.conj().T).imag
        for a in range(k):
            for b in range(k):
                partials[a][b].append(float(block[a, b]))
    gram = np.array([[math.fsum(partials[a][b]) for b in range(k)] for a in range(k)])
    return gram


def _indicator_gram(arcs: Sequence[Arc], n_max: int) -> tuple[np.ndarray, float]:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    measures = np.array([arc.measure for arc in arcs])
    overlap = np.array([[arc_overlap(a, b) for b in arcs] for a in arcs])
    real = 0.5 * (overlap - np.outer(measures, measures))
    imag = _indicator_gram_imag(arcs, n_max)
    return real + 1j * imag, 1.0 / (np.pi**2 * n_max)


def pplus_inner_product(a: Arc, b: Arc, n_max: int = SERIES_N_MAX) -> tuple[complex, float]:
    """⟨P₊1_a, P₊1_b⟩ = Σ_{n≥1} 1̂_a(n) conj(1̂_b(n)), with a bound on the dropped tail.

    The real part is exact, (m(a∩b) − m(a)m(b))/2; only the imaginary part is
    summed up to `n_max`.
    """
    gram, tail = _indicator_gram((a, b), n_max)
    return complex(gram[0, 1]), tail


def _projected_gram(f: MatrixCircleFunction, n_max: int) -> tuple[np.ndarray, float]:
    """Σ_{n=1}^{n_max} c_n* c_n without any symmetry assumption on f."""
    if isinstance(f, PiecewiseArcs):
        gram, tail = _indicator_gram(f.partition.arcs, n_max)
        values = f.values
        energy = np.einsum("kl,kji,ljm->im", gram.conj(), values.conj(), values, optimize=True)
        scale = len(values) * float(np.max(np.linalg.norm(values, 2, axis=(1, 2))))
        logger.debug(f"Energy of {len(values)}-piece function at n_max={n_max}")
        return hermitian_part(energy), tail * scale**2
    top = f.grid_size // 2 - 1
    coeffs = fourier_coeffs(f, top).positive()
    kept = coeffs[: min(n_max, top)]
    energy = hermitian_part(np.einsum("nji,njk->ik", kept.conj(), kept))
    rest = coeffs[min(n_max, top) :]
    return energy, float(np.sum(np.abs(rest) ** 2))


def pplus_energy(f: MatrixCircleFunction, n_max: int = SERIES_N_MAX) -> tuple[np.ndarray, float]:
    """Σ_{n=1}^{n_max} c_n* c_n for Hermitian-valued f, and a tail bound."""
    check_hermitian(f.point_values(), HERMITIAN_TOL, what="function value")
    return _projected_gram(f, n_max)


def pplus_norm_squared(f: MatrixCircleFunction, n_max: int = SERIES_N_MAX) -> tuple[float, float]:
    """‖P₊f‖₂² = ∫ tr|P₊f|² dm for any (not necessarily Hermitian) f."""
    energy, tail = _projected_gram(f, n_max)
    return float(np.trace(energy).real), tail * f.dim


def evaluate(c: MatrixFourierCoeffs, theta) -> np.ndarray:
    """Σ_n c_n e^{inθ}; a scalar angle gives one matrix, an array gives a stack."""
    theta_arr = np.asarray(theta, dtype=float)
    scalar = theta_arr.ndim == 0
    theta_arr = np.atleast_1d(theta_arr)
    n = c.indices
    out = np.empty((theta_arr.size, c.dim, c.dim), dtype=complex)
    step = max(1, (1 << 22) // max(1, n.size))
    for lo in range(0, theta_arr.size, step):
        basis = np.exp(1j * np.outer(theta_arr[lo : lo + step], n))
        out[lo : lo + step] = np.einsum("tn,nij->tij", basis, c.table)
    return out[0] if scalar else out


def synthesize_on_grid(c: MatrixFourierCoeffs, grid_size: int, offset: float = 0.0) -> np.ndarray:
    """Σ_n c_n e^{inθ_j} on θ_j = 2π(j + offset)/G by one inverse FFT.

    Frequencies beyond the grid fold onto their residues, which is exactly
    what sampling the trigonometric polynomial does.
    """
    n = c.indices
    phase = np.exp(1j * TWO_PI * n * offset / grid_size)
    bins = np.zeros((grid_size, c.dim, c.dim), dtype=complex)
    np.add.at(bins, np.mod(n, grid_size), phase[:, None, None] * c.table)
    return np.fft.ifft(bins, axis=0) * grid_size
