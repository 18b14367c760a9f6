"""Origin-preserving inner functions and their boundary values.

Three families are supported: powers z^n, finite Blaschke products with a
zero at the origin, and the map built from a two-set arc partition. The last
one composes the Herglotz integral of the indicator of Γ₁ (disc → strip
0 < Re w < 1) with a conformal map of the strip onto the disc that sends
ψ(0) to 0.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.integrate import quad

from src.circle_fourier import TWO_PI, Arc, arc_overlap
from src.config import EVALUATION_RADIUS, GRID_SIZE
from src.errors import DegeneratePartition, EndpointSingularity, OutOfDomain

logger = logging.getLogger(__name__)

ENDPOINT_TOL = 1e-12
BOUNDARY_FILTER = 0.99


@dataclass(frozen=True)
class Power:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"power must be a positive integer, got {self.n}")


@dataclass(frozen=True)
class BlaschkeZero:
    """rotation · z · Π (z − a)/(1 − ā z)."""

    zeros: tuple[complex, ...] = ()
    rotation: complex = 1.0

    def __post_init__(self):
        zeros = tuple(complex(a) for a in self.zeros)
        if any(abs(a) >= 1.0 for a in zeros):
            raise ValueError("Blaschke zeros must lie in the open unit disc")
        if abs(abs(self.rotation) - 1.0) > 1e-12:
            raise ValueError("rotation must be unimodular")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "rotation", complex(self.rotation))

    @property
    def degree(self) -> int:
        return 1 + len(self.zeros)


@dataclass(frozen=True)
class PartitionDerived:
    gamma1: tuple[Arc, ...]
    evaluation_radius: float = EVALUATION_RADIUS

    def __post_init__(self):
        object.__setattr__(self, "gamma1", tuple(self.gamma1))
        _check_gamma1(self.gamma1)
        if not 0.0 < self.evaluation_radius < 1.0:
            raise ValueError("evaluation radius must lie in (0, 1)")

    @property
    def measure(self) -> float:
        return math.fsum(arc.measure for arc in self.gamma1)

    @property
    def w0(self) -> complex:
        return complex(self.measure)


InnerMap = Power | BlaschkeZero | PartitionDerived


@dataclass(frozen=True)
class StripPoint:
    w: complex

    def __post_init__(self):
        object.__setattr__(self, "w", complex(self.w))
        if not 0.0 < self.w.real < 1.0:
            raise OutOfDomain(f"{self.w} is not inside the strip 0 < Re w < 1")


def _check_gamma1(gamma1: Sequence[Arc]) -> None:
    total = math.fsum(arc.measure for arc in gamma1)
    if total <= 1e-12 or total >= 1.0 - 1e-12:
        raise DegeneratePartition(f"Γ₁ must have measure strictly between 0 and 1, got {total}")
    for i, a in enumerate(gamma1):
        for b in gamma1[i + 1 :]:
            if arc_overlap(a, b) > 1e-12:
                raise DegeneratePartition(f"arcs {a} and {b} of Γ₁ overlap")


def _herglotz_closed(gamma1: Sequence[Arc], z: np.ndarray) -> np.ndarray:
    out = np.zeros(z.shape, dtype=complex)
    for arc in gamma1:
        a, b = arc.start, arc.start + arc.length
        to_a, to_b = np.exp(1j * a) - z, np.exp(1j * b) - z
        turn = np.mod(np.angle(to_b) - np.angle(to_a), TWO_PI)
        out += turn / np.pi - arc.length / TWO_PI
        out -= 1j / np.pi * np.log(np.abs(to_b) / np.abs(to_a))
    return out


def _herglotz_quad(gamma1: Sequence[Arc], z: complex) -> complex:
    def kernel(t):
        g = np.exp(1j * t)
        return (g + z) / (g - z) / TWO_PI

    total = 0.0 + 0.0j
    peak = np.angle(z) if z != 0 else None
    for arc in gamma1:
        a, b = arc.start, arc.start + arc.length
        points = None
        if peak is not None:
            offset = (peak - a) % TWO_PI
            if 0.0 < offset < arc.length:
                points = [a + offset]
        opts = dict(limit=500, epsabs=1e-12, epsrel=1e-10, points=points)
        re, _ = quad(lambda t: kernel(t).real, a, b, **opts)
        im, _ = quad(lambda t: kernel(t).imag, a, b, **opts)
        total += re + 1j * im
    return total


def herglotz(gamma1: Sequence[Arc], z: complex, method: str = "closed") -> StripPoint:
    """ψ(z) = ∫ (γ + z)/(γ − z) 1_{Γ₁}(γ) dm(γ)."""
    gamma1 = tuple(gamma1)
    _check_gamma1(gamma1)
    if abs(z) > 1.0 - 1e-9:
        raise OutOfDomain(f"|z| = {abs(z)} is too close to the unit circle")
    if method == "closed":
        value = complex(_herglotz_closed(gamma1, np.array([complex(z)]))[0])
    elif method == "quad":
        value = _herglotz_quad(gamma1, complex(z))
    else:
        raise ValueError(f"unknown Herglotz method '{method}'")
    return StripPoint(value)


def _strip_value(w) -> complex:
    return w.w if isinstance(w, StripPoint) else StripPoint(w).w


def _to_disk(w: np.ndarray, w0: complex) -> np.ndarray:
    u = np.exp(1j * np.pi * w)
    u0 = np.exp(1j * np.pi * w0)
    return (u - u0) / (u - np.conj(u0))


def strip_to_disk(w: StripPoint | complex, w0: StripPoint | complex) -> complex:
    """Conformal map of the strip onto the disc sending w0 to 0.

    u = e^{iπw} opens the strip onto the upper half-plane and the Möbius map
    u ↦ (u − u₀)/(u − ū₀) closes it onto the disc.
    """
    return complex(_to_disk(np.array([_strip_value(w)]), _strip_value(w0))[0])


def cross_ratio(z1, z2, z3, z4):
    return (z1 - z3) * (z2 - z4) / ((z1 - z4) * (z2 - z3))


def _blaschke(map_: BlaschkeZero, z: np.ndarray) -> np.ndarray:
    out = map_.rotation * z
    for a in map_.zeros:
        out = out * (z - a) / (1.0 - np.conj(a) * z)
    return out


def interior_value(map_: InnerMap, z):
    """φ(z) for |z| < 1."""
    z_arr = np.asarray(z, dtype=complex)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if np.any(np.abs(z_arr) >= 1.0):
        raise OutOfDomain("interior evaluation needs |z| < 1")
    if isinstance(map_, Power):
        out = z_arr**map_.n
    elif isinstance(map_, BlaschkeZero):
        out = _blaschke(map_, z_arr)
    else:
        out = _to_disk(_herglotz_closed(map_.gamma1, z_arr), map_.w0)
    return complex(out[0]) if scalar else out


def boundary_value(map_: InnerMap, theta):
    """φ(e^{iθ}); the partition map is evaluated at radius `evaluation_radius`."""
    theta_arr = np.asarray(theta, dtype=float)
    scalar = theta_arr.ndim == 0
    theta_arr = np.atleast_1d(theta_arr)
    gamma = np.exp(1j * theta_arr)
    if isinstance(map_, Power):
        out = np.exp(1j * map_.n * theta_arr)
    elif isinstance(map_, BlaschkeZero):
        out = _blaschke(map_, gamma)
    else:
        ends = np.array([[arc.start, arc.start + arc.length] for arc in map_.gamma1]).ravel()
        gap = np.abs(np.angle(np.exp(1j * (theta_arr[:, None] - ends[None, :]))))
        if np.any(gap < ENDPOINT_TOL):
            raise EndpointSingularity("boundary value requested at an arc endpoint of Γ₁")
        z = map_.evaluation_radius * gamma
        out = _to_disk(_herglotz_closed(map_.gamma1, z), map_.w0)
    return complex(out[0]) if scalar else out


def _grid(grid: int) -> np.ndarray:
    if grid < 1024 or grid & (grid - 1):
        raise ValueError(f"grid must be a power of two of at least 1024, got {grid}")
    return TWO_PI * (np.arange(grid) + 0.5) / grid


def moments(map_: InnerMap, n_max: int, grid: int = GRID_SIZE) -> np.ndarray:
    """(1/G) Σ_j φ(γ_j)^n for n = 1..n_max."""
    values = boundary_value(map_, _grid(grid))
    powers = values[None, :] ** np.arange(1, n_max + 1)[:, None]
    return powers.mean(axis=1)


def preimage(map_: Power | BlaschkeZero, arc: Arc) -> list[Arc]:
    """Arcs whose union is {θ : φ(e^{iθ}) ∈ arc}."""
    if arc.is_full:
        return [arc]
    if isinstance(map_, Power):
        n = map_.n
        return [
            Arc((arc.start + TWO_PI * k) / n, (arc.start + arc.length + TWO_PI * k) / n)
            for k in range(n)
        ]
    starts = _level_set(map_, arc.start)
    ends = _level_set(map_, arc.start + arc.length)
    pieces = []
    for s in starts:
        span = np.mod(ends - s, TWO_PI)
        span[span == 0.0] = TWO_PI
        pieces.append(Arc(s, s + float(span.min())))
    return pieces


def _level_set(map_: BlaschkeZero, angle: float) -> np.ndarray:
    """Sorted θ with B(e^{iθ}) = e^{i·angle}, from the degree-d polynomial equation."""
    top = map_.rotation * P.polyfromroots([0.0, *map_.zeros])
    bottom = np.array([1.0 + 0.0j])
    for a in map_.zeros:
        bottom = P.polymul(bottom, [1.0, -np.conj(a)])
    poly = P.polysub(top, np.exp(1j * angle) * bottom)
    roots = P.polyroots(poly)
    return np.sort(np.mod(np.angle(roots), TWO_PI))


@dataclass(frozen=True)
class ImageArcReport:
    gamma1_measure: float
    image1_arc: Arc
    image1_measure: float
    image0_arc: Arc
    image0_measure: float
    overlap: float
    discarded: int
    passed: bool


def covering_arc(angles: np.ndarray) -> Arc:
    """Smallest arc containing every angle (complement of the widest gap)."""
    ordered = np.sort(np.mod(angles, TWO_PI))
    gaps = np.diff(np.concatenate([ordered, [ordered[0] + TWO_PI]]))
    widest = int(np.argmax(gaps))
    start = ordered[(widest + 1) % ordered.size]
    end = ordered[widest]
    if end == start:
        end = start + 1e-15
    return Arc(start, end)


def image_arc_check(map_: PartitionDerived, grid: int = 1 << 14, slack: float = 0.01) -> ImageArcReport:
    """Covering arcs of φ(Γ₁) and φ(Γ₀) sampled on a half-offset grid.

    Points whose image has modulus below 0.99 sit inside the endpoint smear of
    the radius-ρ evaluation and are left out.
    """
    if not isinstance(map_, PartitionDerived):
        raise TypeError("image arc check applies to partition-derived maps")
    theta = _grid(grid)
    values = boundary_value(map_, theta)
    inside = np.zeros(theta.shape, dtype=bool)
    for arc in map_.gamma1:
        inside |= arc.contains(theta)
    on_circle = np.abs(values) >= BOUNDARY_FILTER
    angles = np.angle(values)
    image1 = covering_arc(angles[inside & on_circle])
    image0 = covering_arc(angles[~inside & on_circle])
    overlap = arc_overlap(image1, image0)
    passed = image1.measure <= map_.measure + slack and overlap <= slack
    report = ImageArcReport(
        gamma1_measure=map_.measure,
        image1_arc=image1,
        image1_measure=image1.measure,
        image0_arc=image0,
        image0_measure=image0.measure,
        overlap=overlap,
        discarded=int(np.count_nonzero(~on_circle)),
        passed=bool(passed),
    )
    if not passed:
        logger.warning(f"Image arcs of the partition map fail the check: {report}")
    return report
