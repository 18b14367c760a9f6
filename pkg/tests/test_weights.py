import math

import numpy as np
import pytest

from src.circle_fourier import Arc
from src.spectral_factorization import perturbation_norm
from src.weights import (
    R0_EIGHT_ARC,
    block_embedding,
    coupled_weight,
    coupling_matrix,
    eight_arc_weights,
    h_alpha,
    quadrant_weight,
    random_pd_matrix,
    random_perturbation,
    random_piecewise_weight,
    self_dual_weight,
    smooth_weight,
    three_arc_perturbation,
    two_valued_weight,
)


def test_coupling_matrix_eigenvalues():
    """Test that W^{(r)} has eigenvalues s ± r."""
    eigs = np.linalg.eigvalsh(coupling_matrix(2.0, 0.7)[0])
    s = math.sqrt(5.0)
    np.testing.assert_allclose(eigs, [s - 2.0, s + 2.0])


def test_coupled_weight_negative_r():
    """Test that negative r is rejected."""
    with pytest.raises(ValueError):
        coupled_weight(-1.0)


def test_block_embedding_hermitian():
    """Test that [[0, f̄], [f, 0]] is Hermitian."""
    values = block_embedding([1j, 2.0])
    np.testing.assert_allclose(values, values.conj().transpose(0, 2, 1))


def test_three_arc_swap():
    """Test the arrangements S and S′ of the three-arc perturbation."""
    plain = three_arc_perturbation()
    swapped = three_arc_perturbation(swapped=True)
    np.testing.assert_allclose(plain.values[1], swapped.values[2])
    assert perturbation_norm(plain) == pytest.approx(1.0)


def test_h_alpha_values():
    """Test h_α on the four quadrants."""
    alpha = np.exp(1j * 0.3)
    np.testing.assert_allclose(
        h_alpha(alpha).values[:, 0, 0], [alpha, -alpha.conjugate(), -alpha, alpha.conjugate()]
    )


def test_quadrant_weight_inverses():
    """Test that Q₁ and Q₃ carry A and A⁻¹."""
    W = quadrant_weight(np.exp(0.4j), 0.2)
    np.testing.assert_allclose(W.values[0] @ W.values[2], np.eye(2), atol=1e-14)


def test_symmetric_quadrant_self_dual():
    """Test W(γ̄)W(γ) = I for the symmetric arrangement."""
    W = quadrant_weight(np.exp(0.4j), 0.2, symmetric=True)
    theta = np.array([0.3, 1.9, 3.4, 5.0])
    product = np.einsum("tij,tjk->tik", W.evaluate(-theta % (2 * math.pi)), W.evaluate(theta))
    np.testing.assert_allclose(product, np.broadcast_to(np.eye(2), product.shape), atol=1e-13)


def test_quadrant_weight_eps_range():
    """Test that ε outside [0, 1) is rejected."""
    with pytest.raises(ValueError):
        quadrant_weight(1.0, 1.0)


def test_eight_arc_conjugate():
    """Test that B̃ is the entrywise conjugate of B."""
    B, B_conj = eight_arc_weights()
    np.testing.assert_allclose(B_conj.values, B.values.conj())
    assert R0_EIGHT_ARC == pytest.approx(math.sqrt(2 + 2 * math.sqrt(2)))


def test_two_valued_weight_measure():
    """Test that A₁ occupies exactly Γ₁."""
    A0, A1 = np.eye(2), 2 * np.eye(2)
    W = two_valued_weight(A0, A1, (Arc(0.0, 1.0), Arc(3.0, 4.0)))
    on_a1 = [m for m, v in zip(W.partition.measures, W.values, strict=True) if v[0, 0] == 2]
    assert sum(on_a1) == pytest.approx(2.0 / (2 * math.pi))
    assert len(W.partition) == 4


def test_random_pd_matrix():
    """Test eigenvalue range of random PD matrices."""
    rng = np.random.default_rng(3)
    eigs = np.linalg.eigvalsh(random_pd_matrix(rng, 3, spread=5.0))
    assert eigs.min() >= 1.0 - 1e-12
    assert eigs.max() <= 5.0 + 1e-12


def test_random_weights_reproducible():
    """Test that equal seeds give equal weights."""
    first = random_piecewise_weight(np.random.default_rng(7))
    second = random_piecewise_weight(np.random.default_rng(7))
    np.testing.assert_array_equal(first.values, second.values)


def test_random_perturbation_contraction():
    """Test the prescribed sup norm of a random perturbation."""
    delta = random_perturbation(np.random.default_rng(4), contraction=0.4)
    assert perturbation_norm(delta) == pytest.approx(0.4)


def test_self_dual_weight():
    """Test W(γ̄)W(γ) = I on the grid."""
    W = self_dual_weight(0.3, 64)
    flipped = W.samples[np.mod(-np.arange(64), 64)]
    product = np.einsum("tij,tjk->tik", flipped, W.samples)
    np.testing.assert_allclose(product, np.broadcast_to(np.eye(2), product.shape), atol=1e-13)


def test_smooth_weight_bounds():
    """Test that exp(H) is Hermitian with eigenvalues inside exp(±‖H‖∞)."""
    W = smooth_weight(np.random.default_rng(4), dim=3, degree=2, scale=0.2, grid_size=64)
    values = W.samples
    np.testing.assert_allclose(values, values.conj().transpose(0, 2, 1), atol=1e-14)
    eigs = np.linalg.eigvalsh(values)
    assert eigs.min() >= math.exp(-1.0) - 1e-12
    assert eigs.max() <= math.exp(1.0) + 1e-12


def test_smooth_weight_band_limited_log():
    """Test that log det W is a trigonometric polynomial of the requested degree."""
    W = smooth_weight(np.random.default_rng(5), degree=1, grid_size=64)
    logdet = np.log(np.linalg.det(W.samples).real)
    spectrum = np.abs(np.fft.fft(logdet)) / 64
    assert np.max(spectrum[2:-1]) < 1e-13
