import math

import numpy as np
import pytest

from src.circle_fourier import (
    TWO_PI,
    Arc,
    ArcPartition,
    PiecewiseArcs,
    Sampled,
    arc_overlap,
    constant,
    evaluate,
    fourier_coeff,
    fourier_coeffs,
    indicator_fourier,
    l2_norm_squared,
    mean_square,
    pplus_energy,
    pplus_inner_product,
    pplus_norm_squared,
    project_plus,
    sample_function,
    sample_on_grid,
    synthesize_on_grid,
    uniform_partition,
)
from src.errors import DimensionMismatch, NotHermitian, SampledAliasing
from src.matrix_utils import hermitian_part
from src.weights import (
    h_alpha,
    quadrants,
    random_piecewise_weight,
    single_frequency_delta,
    smooth_weight,
    thirds,
    three_arc_perturbation,
)

N_MAX = 100_000


def test_arc_canonical_endpoints():
    """Test that arc endpoints are reduced to [0, 2π)."""
    arc = Arc(-math.pi / 2, math.pi / 2)
    assert arc.start == pytest.approx(1.5 * math.pi)
    assert arc.length == pytest.approx(math.pi)
    assert arc.measure == pytest.approx(0.5)


def test_full_arc():
    """Test that equal endpoints describe the full circle."""
    arc = Arc(0.0, TWO_PI)
    assert arc.is_full
    assert arc.measure == 1.0


def test_arc_contains_wrapping():
    """Test membership on an arc through angle zero."""
    arc = Arc(1.5 * math.pi, 0.5 * math.pi)
    assert arc.contains(0.1)
    assert not arc.contains(math.pi)


def test_arc_overlap():
    """Test the normalized overlap of two arcs."""
    a = Arc(0.0, math.pi)
    b = Arc(math.pi / 2, 3 * math.pi / 2)
    assert arc_overlap(a, b) == pytest.approx(0.25)
    assert arc_overlap(a, Arc(math.pi, TWO_PI)) == pytest.approx(0.0)


def test_partition_measure_sum():
    """Test that a partition whose measures do not sum to 1 is rejected."""
    with pytest.raises(ValueError):
        ArcPartition((Arc(0.0, 1.0), Arc(1.0, 2.0)))


def test_partition_overlap_rejected():
    """Test that overlapping arcs are rejected."""
    with pytest.raises(ValueError):
        ArcPartition((Arc(0.0, math.pi + 0.1), Arc(math.pi, TWO_PI + 0.1)))


def test_partition_locate():
    """Test locating angles in a uniform partition."""
    partition = uniform_partition(4)
    np.testing.assert_array_equal(partition.locate([0.1, 2.0, 3.5, 6.0]), [0, 1, 2, 3])


def test_piecewise_dimension_mismatch():
    """Test that the value count must match the arc count."""
    with pytest.raises(DimensionMismatch):
        PiecewiseArcs(thirds(), np.array([np.eye(2), np.eye(2)]))


def test_piecewise_values_read_only():
    """Test that stored values cannot be modified and the caller's array is untouched."""
    values = np.array([np.eye(2), 2 * np.eye(2), 3 * np.eye(2)])
    f = PiecewiseArcs(thirds(), values)
    with pytest.raises(ValueError):
        f.values[0, 0, 0] = 5.0
    values[0, 0, 0] = 5.0
    assert f.values[0, 0, 0] == 1.0


def test_sampled_grid_power_of_two():
    """Test that sample counts must be powers of two."""
    with pytest.raises(ValueError):
        Sampled(np.ones((6, 1, 1)))


def test_indicator_fourier_values():
    """Test closed-form indicator coefficients."""
    arc = Arc(0.0, math.pi)
    assert indicator_fourier(arc, 0) == pytest.approx(0.5)
    assert indicator_fourier(arc, 1) == pytest.approx(1 / (1j * math.pi))
    assert indicator_fourier(arc, 2) == pytest.approx(0.0)
    assert indicator_fourier(Arc(0.0, TWO_PI), 3) == 0.0


def test_fourier_coeffs_piecewise_constant():
    """Test that a constant function has only a zeroth coefficient."""
    f = constant(np.diag([2.0, 3.0]))
    coeffs = fourier_coeffs(f, 4)
    np.testing.assert_allclose(coeffs[0], np.diag([2.0, 3.0]))
    assert np.max(np.abs(coeffs.positive())) == 0.0


def test_fourier_coeffs_sampled_single_frequency():
    """Test sampled coefficients of γE₁₂ + γ̄E₂₁."""
    f = single_frequency_delta(64)
    np.testing.assert_allclose(fourier_coeff(f, 1), [[0, 1], [0, 0]], atol=1e-14)
    np.testing.assert_allclose(fourier_coeff(f, -1), [[0, 0], [1, 0]], atol=1e-14)
    np.testing.assert_allclose(fourier_coeff(f, 0), np.zeros((2, 2)), atol=1e-14)


def test_fourier_coeffs_offset_grid():
    """Test that a half-cell offset leaves coefficients unchanged."""
    f = sample_function(lambda t: np.exp(2j * t), 32, offset=0.5)
    assert fourier_coeff(f, 2)[0, 0] == pytest.approx(1.0, abs=1e-13)
    assert fourier_coeff(f, 1)[0, 0] == pytest.approx(0.0, abs=1e-13)


def test_fourier_coeffs_aliasing():
    """Test that frequencies beyond G/2 - 1 are refused."""
    with pytest.raises(SampledAliasing):
        fourier_coeffs(single_frequency_delta(16), 8)


def test_project_plus_and_norm():
    """Test that P₊ keeps only positive frequencies."""
    f = sample_function(lambda t: 1.0 + np.exp(1j * t) + np.exp(-2j * t), 16)
    plus = project_plus(fourier_coeffs(f, 4))
    assert l2_norm_squared(plus) == pytest.approx(1.0)
    assert mean_square(f) == pytest.approx(3.0)


def test_evaluate_reproduces_samples():
    """Test that the trigonometric interpolant passes through the samples."""
    f = sample_function(lambda t: np.cos(t) + 0.5 * np.sin(3 * t), 32)
    values = evaluate(fourier_coeffs(f, 15), f.angles)
    np.testing.assert_allclose(values, f.samples, atol=1e-13)


def test_synthesize_on_grid_matches_evaluate():
    """Test the FFT synthesis against direct summation."""
    f = sample_function(lambda t: np.exp(1j * t) - 0.25 * np.exp(-3j * t), 16)
    coeffs = fourier_coeffs(f, 7)
    grid = synthesize_on_grid(coeffs, 64, 0.5)
    theta = TWO_PI * (np.arange(64) + 0.5) / 64
    np.testing.assert_allclose(grid, evaluate(coeffs, theta), atol=1e-13)


def test_sample_on_grid_piecewise():
    """Test exact lookup of a piecewise function on a grid."""
    f = PiecewiseArcs(uniform_partition(2), np.array([1.0, 2.0]))
    values = sample_on_grid(f, 8, 0.5)
    np.testing.assert_allclose(values[:, 0, 0], [1, 1, 1, 1, 2, 2, 2, 2])


def test_inner_product_real_part_exact():
    """Test Re⟨P₊1_a, P₊1_b⟩ = (m(a∩b) − m(a)m(b))/2."""
    T = thirds().arcs
    value, _ = pplus_inner_product(T[0], T[1], 10)
    assert value.real == pytest.approx(-1.0 / 18.0, abs=1e-15)
    value, _ = pplus_inner_product(T[0], T[0], 10)
    assert value.real == pytest.approx(1.0 / 9.0, abs=1e-15)


def test_inner_product_three_arc_constant():
    """Test Im⟨P₊1_{T₁}, P₊1_{T₂}⟩ ≈ 0.0514."""
    T = thirds().arcs
    value, tail = pplus_inner_product(T[0], T[1], N_MAX)
    assert value.imag == pytest.approx(0.0514, abs=5e-4)
    assert tail == pytest.approx(1.0 / (math.pi**2 * N_MAX))


def test_inner_product_rotation_identity():
    """Test ⟨P₊1_{T₁}, P₊1_{T₃}⟩ = conj⟨P₊1_{T₁}, P₊1_{T₂}⟩."""
    T = thirds().arcs
    v12, _ = pplus_inner_product(T[0], T[1], N_MAX)
    v13, _ = pplus_inner_product(T[0], T[2], N_MAX)
    assert abs(v13 - v12.conjugate()) < 1e-10


def test_inner_product_quadrants():
    """Test Im⟨P₊1_{Q₁}, P₊1_{Q₂}⟩ ≈ 0.04634."""
    Q = quadrants().arcs
    value, _ = pplus_inner_product(Q[0], Q[1], N_MAX)
    assert value.imag == pytest.approx(0.04634, abs=5e-5)


def test_energy_single_frequency():
    """Test that the energy of γE₁₂ + γ̄E₂₁ is E₂₂."""
    energy, tail = pplus_energy(single_frequency_delta(64))
    np.testing.assert_allclose(energy, np.diag([0.0, 1.0]), atol=1e-14)
    assert tail == pytest.approx(0.0, abs=1e-28)


def test_energy_three_arc_difference():
    """Test that swapping two arcs changes the energy by 4·Im⟨⟩·diag(−1, 1)."""
    T = thirds().arcs
    inner, _ = pplus_inner_product(T[0], T[1], N_MAX)
    first, _ = pplus_energy(three_arc_perturbation(), N_MAX)
    second, _ = pplus_energy(three_arc_perturbation(swapped=True), N_MAX)
    expected = 4.0 * inner.imag * np.diag([-1.0, 1.0])
    np.testing.assert_allclose(first - second, expected, atol=1e-8)
    assert np.linalg.norm(first - second, 2) > 1e-3


def test_energy_requires_hermitian():
    """Test that energy of a non-Hermitian function is refused."""
    f = PiecewiseArcs(uniform_partition(2), np.array([[[0, 1], [0, 0]], [[0, 0], [0, 0]]]))
    with pytest.raises(NotHermitian):
        pplus_energy(f, 100)


def test_energy_matches_sampled():
    """Test piecewise energy against a finely sampled copy."""
    f = three_arc_perturbation()
    exact, _ = pplus_energy(f, N_MAX)
    sampled = Sampled(sample_on_grid(f, 1 << 14, 0.5), 0.5)
    approx, _ = pplus_energy(sampled)
    np.testing.assert_allclose(approx, exact, atol=1e-3)


def test_norm_squared_h_alpha():
    """Test ‖P₊h_α‖² = 1/2 + 8·Im⟨P₊1_{Q₁}, P₊1_{Q₂}⟩·Im(α²)."""
    Q = quadrants().arcs
    inner, _ = pplus_inner_product(Q[0], Q[1], N_MAX)
    alpha = np.exp(1j * math.pi / 4)
    value, _ = pplus_norm_squared(h_alpha(alpha), N_MAX)
    assert value == pytest.approx(0.5 + 8.0 * inner.imag, abs=1e-9)
    value, _ = pplus_norm_squared(h_alpha(1.0), N_MAX)
    assert value == pytest.approx(0.5, abs=1e-9)


def test_norm_squared_identity_and_conjugate():
    """Test ‖P₊γ‖² = 1 and ‖P₊γ̄‖² = 0."""
    identity = sample_function(lambda t: np.exp(1j * t), 16)
    conjugate = sample_function(lambda t: np.exp(-1j * t), 16)
    assert pplus_norm_squared(identity)[0] == pytest.approx(1.0)
    assert pplus_norm_squared(conjugate)[0] == pytest.approx(0.0, abs=1e-28)


def test_hermitian_coefficient_symmetry():
    """Test c₋ₙ = cₙ* for Hermitian piecewise and sampled functions."""
    rng = np.random.default_rng(12)
    W = random_piecewise_weight(rng, dim=3, pieces=5).map_values(hermitian_part)
    coeffs = fourier_coeffs(W, 20)
    S = smooth_weight(rng, dim=2, degree=3, grid_size=64)
    sampled = fourier_coeffs(S, 31)
    for n in range(21):
        np.testing.assert_allclose(coeffs[-n], coeffs[n].conj().T, atol=1e-14)
    for n in range(32):
        np.testing.assert_allclose(sampled[-n], sampled[n].conj().T, atol=1e-12)


@pytest.mark.parametrize("beta", [0.3, 1.0, 2.5])
def test_rotation_multiplies_coefficients(beta):
    """Test that rotating every arc by β multiplies cₙ by e^{−inβ} and keeps the P₊ energy."""
    rng = np.random.default_rng(13)
    W = random_piecewise_weight(rng, dim=2, pieces=4)
    rotated = PiecewiseArcs(ArcPartition(tuple(a.rotated(beta) for a in W.partition.arcs)), W.values)
    plain, turned = fourier_coeffs(W, 15), fourier_coeffs(rotated, 15)
    for n in range(-15, 16):
        np.testing.assert_allclose(turned[n], np.exp(-1j * n * beta) * plain[n], atol=1e-12)
    energy, _ = pplus_energy(W, 5000)
    energy_rotated, _ = pplus_energy(rotated, 5000)
    np.testing.assert_allclose(energy_rotated, energy, atol=1e-10)


def test_parseval_partial_sums_increase():
    """Test that Σ_{|n|≤M} |cₙ|² increases with M toward ∫|f|²."""
    partition = ArcPartition((Arc(0.0, 2.0), Arc(2.0, TWO_PI)))
    f = PiecewiseArcs(partition, np.array([np.diag([1.0, 2.0]), np.diag([3.0, 1.0])]))
    total = mean_square(f)
    sums = [l2_norm_squared(fourier_coeffs(f, 2**k)) for k in range(4, 13)]
    assert all(b > a for a, b in zip(sums, sums[1:]))
    assert sums[-1] <= total + 1e-12
    assert total - sums[-1] < 1e-3
