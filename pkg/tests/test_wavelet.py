import numpy as np
import pytest

from dynmix.modules.wavelet import (
    CoefficientVector,
    SeriesLengthError,
    build_matrix,
    dwt,
    get_filter,
    idwt,
    level_range,
    level_slice,
    levels_for,
)


def test_default_filter_is_six_moment_coiflet():
    wavelet_filter = get_filter()
    assert wavelet_filter.name == "coif3", "Default filter should be coif3"
    assert wavelet_filter.length == 18, "coif3 should have 18 taps"
    assert wavelet_filter.vanishing_moments == 6, "coif3 should have six vanishing moments"
    h = np.asarray(wavelet_filter.lowpass)
    assert abs(h.sum() - np.sqrt(2)) < 1e-12, "Lowpass taps should sum to sqrt(2)"
    assert abs(wavelet_filter.highpass.sum()) < 1e-12, "Highpass taps should sum to 0"


def test_get_filter_rejects_bad_names():
    with pytest.raises(ValueError, match="Unknown wavelet filter"):
        get_filter("not_a_wavelet")
    with pytest.raises(ValueError, match="not orthogonal"):
        get_filter("bior2.2")


@pytest.mark.parametrize("n", [64, 128, 256])
def test_transform_matrix_is_orthonormal(n):
    W = build_matrix(n)
    assert np.max(np.abs(W @ W.T - np.eye(n))) < 1e-8, f"W W^T should be the identity for n = {n}"


def test_roundtrip_on_random_signals():
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = rng.normal(size=128)
        assert np.max(np.abs(idwt(dwt(x)) - x)) < 1e-10, "idwt(dwt(x)) should return x"


def test_dwt_matches_matrix_and_preserves_energy():
    x = np.random.default_rng(1).normal(size=64)
    theta = dwt(x)
    assert np.allclose(build_matrix(64) @ x, theta, atol=1e-12), "dwt should equal W @ x"
    assert abs(np.sum(theta**2) - np.sum(x**2)) < 1e-9, "Orthonormal transform should preserve energy"


@pytest.mark.parametrize("name", ["haar", "db4", "sym8", "coif3"])
def test_constant_signal_has_no_details(name):
    theta = dwt(np.ones(16), get_filter(name))
    assert abs(theta[0] - 4.0) < 1e-10, "Scaling coefficient of ones(16) should be sqrt(16)"
    assert np.max(np.abs(theta[1:])) < 1e-10, "Constant signal should have zero details"


def test_haar_single_level():
    theta = dwt([1.0, 3.0], get_filter("haar"))
    assert np.allclose(theta, [4.0 / np.sqrt(2), -2.0 / np.sqrt(2)]), "Haar pair should give (sum, difference) / sqrt(2)"


def test_level_layout():
    assert level_range(0, 4) == (2, 2), "Level 0 should be position 2"
    assert level_range(2, 4) == (5, 8), "Level 2 should span positions 5..8"
    assert level_range(3, 4) == (9, 16), "Finest level of n = 16 should span positions 9..16"
    assert level_slice(3, 4) == slice(8, 16)
    with pytest.raises(ValueError):
        level_range(4, 4)

    coefficients = CoefficientVector.from_array(np.arange(16.0))
    assert coefficients.J == 4
    assert coefficients.scaling == 0.0
    assert np.array_equal(coefficients.detail(1), [2.0, 3.0]), "Level 1 details should sit at indices 2 and 3"


def test_length_errors():
    assert levels_for(1024) == 10
    with pytest.raises(SeriesLengthError):
        levels_for(100)
    with pytest.raises(SeriesLengthError):
        dwt(np.ones(12))
    with pytest.raises(ValueError, match="oracle limit"):
        build_matrix(2048)


@pytest.mark.parametrize("n", [2**k for k in range(3, 11)])
def test_roundtrip_and_inner_products_at_every_dyadic_length(n):
    rng = np.random.default_rng(n)
    x, y = rng.normal(size=n), rng.normal(size=n)
    theta_x, theta_y = dwt(x), dwt(y)
    assert np.max(np.abs(idwt(theta_x) - x)) < 1e-10, f"idwt(dwt(x)) should return x for n = {n}"
    assert abs(theta_x @ theta_y - x @ y) < 1e-9 * n, f"Inner products should be preserved for n = {n}"
