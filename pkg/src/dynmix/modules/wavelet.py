"""
Orthonormal periodic discrete wavelet transform.

Coefficient layout (0-based): index 0 holds the scaling coefficient c00 and the details of level j occupy
indices 2**j .. 2**(j+1) - 1, finest level last. Analysis at every level is a circular convolution with the
lowpass filter h and the highpass filter g_i = (-1)**i * h[L-1-i], downsampled at even phase:

    a_k = sum_i h_i x_{(2k + i) mod N},   d_k = sum_i g_i x_{(2k + i) mod N}

so the transform matrix W is exactly orthonormal and the inverse is W^T.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pywt

from .constants import DEFAULT_FILTER, FILTER_ORTHOGONALITY_TOLERANCE, FILTER_SUM_TOLERANCE, MAX_MATRIX_SIZE, SQRT2


class SeriesLengthError(ValueError):
    pass


@dataclass(frozen=True)
class WaveletFilter:
    name: str
    lowpass: tuple[float, ...]
    vanishing_moments: int

    def __post_init__(self):
        h = np.asarray(self.lowpass)
        if len(h) < 2 or len(h) % 2:
            raise ValueError(f"Filter '{self.name}' must have an even number of taps, got {len(h)}")
        if abs(h.sum() - SQRT2) > FILTER_SUM_TOLERANCE:
            raise ValueError(f"Filter '{self.name}' coefficients sum to {h.sum()!r}, expected sqrt(2)")
        if abs(np.dot(h, h) - 1.0) > FILTER_SUM_TOLERANCE:
            raise ValueError(f"Filter '{self.name}' has squared norm {np.dot(h, h)!r}, expected 1")
        for shift in range(2, len(h), 2):
            if abs(np.dot(h[:-shift], h[shift:])) > FILTER_ORTHOGONALITY_TOLERANCE:
                raise ValueError(f"Filter '{self.name}' fails double-shift orthogonality at shift {shift}")

    @property
    def length(self) -> int:
        return len(self.lowpass)

    @property
    def highpass(self) -> np.ndarray:
        h = np.asarray(self.lowpass)
        return h[::-1] * np.where(np.arange(len(h)) % 2 == 0, 1.0, -1.0)


@lru_cache(maxsize=None)
def get_filter(name: str = DEFAULT_FILTER) -> WaveletFilter:
    """
    Builds a validated orthogonal filter from the PyWavelets tables.

    Args:
        name (str): Any orthogonal PyWavelets name, e.g. 'coif3' (coiflet, six vanishing moments), 'db4', 'sym8', 'haar'.

    Returns:
        WaveletFilter: The filter, checked against the sum, norm and double-shift orthogonality invariants.

    Raises:
        ValueError: If the name is unknown or the family is not orthogonal.
    """
    try:
        wavelet = pywt.Wavelet(name)
    except ValueError as err:
        raise ValueError(f"Unknown wavelet filter '{name}'") from err
    if not wavelet.orthogonal:
        raise ValueError(f"Wavelet filter '{name}' is not orthogonal")
    return WaveletFilter(name=name, lowpass=tuple(float(c) for c in wavelet.rec_lo), vanishing_moments=wavelet.vanishing_moments_psi)


def levels_for(n: int) -> int:
    """Returns J with n = 2**J, raising SeriesLengthError for lengths that are not a power of two >= 2."""
    if n < 2 or n & (n - 1):
        raise SeriesLengthError(f"Length {n} is not a power of two >= 2")
    return n.bit_length() - 1


@dataclass
class CoefficientVector:
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        levels_for(len(self.values))

    @classmethod
    def from_array(cls, values) -> "CoefficientVector":
        return cls(np.asarray(values, dtype=float))

    @property
    def J(self) -> int:
        return levels_for(len(self.values))

    @property
    def scaling(self) -> float:
        return float(self.values[0])

    def detail(self, j: int) -> np.ndarray:
        return self.values[level_slice(j, self.J)]


def level_range(j: int, J: int) -> tuple[int, int]:
    """1-based inclusive positions [2**j + 1, 2**(j+1)] of the level-j detail coefficients."""
    if not 0 <= j <= J - 1:
        raise ValueError(f"Level {j} out of range for J = {J}")
    return 2**j + 1, 2 ** (j + 1)


def level_slice(j: int, J: int) -> slice:
    first, last = level_range(j, J)
    return slice(first - 1, last)


@lru_cache(maxsize=64)
def _taps(size: int, filter_length: int) -> np.ndarray:
    # (size/2, L) circular indices (2k + i) mod size
    return (2 * np.arange(size // 2)[:, None] + np.arange(filter_length)[None, :]) % size


def _as_signal(values) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise SeriesLengthError(f"Expected a one-dimensional series, got shape {x.shape}")
    levels_for(len(x))
    return x


def dwt(signal, wavelet_filter: WaveletFilter | None = None) -> np.ndarray:
    """
    Full periodic decomposition of a length-2**J signal down to level 0.

    Args:
        signal: Real vector whose length is a power of two >= 2.
        wavelet_filter (WaveletFilter | None): Filter to use, the default coiflet when None.

    Returns:
        np.ndarray: theta = (c00, d00, d1, ..., d_{J-1}), equal to W @ signal.

    Raises:
        SeriesLengthError: If the length is not a power of two.
    """
    wavelet_filter = wavelet_filter or get_filter()
    approx = _as_signal(signal)
    h = np.asarray(wavelet_filter.lowpass)
    g = wavelet_filter.highpass
    details: list[np.ndarray] = []
    while len(approx) > 1:
        windows = approx[_taps(len(approx), len(h))]
        details.append(windows @ g)
        approx = windows @ h
    return np.concatenate([approx, *reversed(details)])


def idwt(coeffs, wavelet_filter: WaveletFilter | None = None) -> np.ndarray:
    """Inverse of `dwt`: returns W^T @ coeffs."""
    wavelet_filter = wavelet_filter or get_filter()
    theta = _as_signal(coeffs)
    h = np.asarray(wavelet_filter.lowpass)
    g = wavelet_filter.highpass
    approx = theta[:1]
    size = 1
    while size < len(theta):
        detail = theta[size : 2 * size]
        size *= 2
        taps = _taps(size, len(h))
        contributions = approx[:, None] * h[None, :] + detail[:, None] * g[None, :]
        approx = np.bincount(taps.ravel(), weights=contributions.ravel(), minlength=size)
    return approx


def build_matrix(n: int, wavelet_filter: WaveletFilter | None = None) -> np.ndarray:
    """
    Explicit DWT matrix, built by transforming the unit vectors. Test oracle only.

    Raises:
        ValueError: If n exceeds MAX_MATRIX_SIZE.
    """
    levels_for(n)
    if n > MAX_MATRIX_SIZE:
        raise ValueError(f"Matrix size {n} exceeds the oracle limit of {MAX_MATRIX_SIZE}")
    identity = np.eye(n)
    return np.column_stack([dwt(identity[:, i], wavelet_filter) for i in range(n)])
