"""
Seedable sampling kernels and normal special functions.

All samplers accept scalars or numpy arrays and draw from the `numpy.random.Generator` held by an RngStream, so
a replayed stream reproduces bit-identical draws.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import log_ndtr, ndtr
from scipy.stats import truncnorm

from .constants import TRUNCATION_CUTOFF

RIGHT_OF_ZERO = "right_of_zero"
LEFT_OF_ZERO = "left_of_zero"
_TINY = np.finfo(float).tiny


@dataclass
class RngStream:
    """
    A reproducible random stream identified by (seed, stream_id).

    Streams sharing a seed but with different stream ids are spawned as independent children of the same
    `numpy.random.SeedSequence`, so Monte Carlo replicate r simply uses stream_id = r.
    """

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(sequence))


def normal_cdf(x):
    return ndtr(x)


def log_normal_cdf(x):
    return log_ndtr(x)


def normal_logpdf(x, mean=0.0, sd=1.0):
    z = (np.asarray(x) - mean) / sd
    return -0.5 * z * z - np.log(sd) - 0.5 * np.log(2.0 * np.pi)


def sample_normal(rng: RngStream, mean, sd, size=None):
    if np.any(np.asarray(sd) <= 0):
        raise ValueError(f"Normal standard deviation must be positive, got {sd}")
    return rng.generator.normal(mean, sd, size=size)


def sample_gamma(rng: RngStream, shape, rate, size=None):
    """
    Gamma(shape, rate) draws, mean shape / rate.

    Shapes below one use the boosting identity Gamma(s) = Gamma(s + 1) * U**(1/s), evaluated in log-space; draws that
    underflow double precision are returned as the smallest positive float so the support stays strictly positive.
    """
    shape = np.asarray(shape, dtype=float)
    rate = np.asarray(rate, dtype=float)
    if np.any(shape <= 0) or np.any(rate <= 0):
        raise ValueError(f"Gamma shape and rate must be positive, got shape={shape} rate={rate}")
    boost = shape < 1
    log_draw = np.log(rng.generator.standard_gamma(np.where(boost, shape + 1.0, shape), size=size))
    if np.any(boost):
        log_u = np.log(rng.generator.uniform(size=np.shape(log_draw)))
        log_draw = np.where(boost, log_draw + log_u / shape, log_draw)
    draws = np.maximum(np.exp(log_draw - np.log(rate)), _TINY)
    return draws if np.ndim(draws) else float(draws)


def sample_bernoulli(rng: RngStream, p, size=None):
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("Bernoulli probabilities must lie in [0, 1]")
    shape = size if size is not None else p.shape
    draws = (rng.generator.uniform(size=shape) < p).astype(np.int8)
    return draws if np.ndim(draws) else int(draws)


def _standard_lower_tail(rng: RngStream, lower: np.ndarray) -> np.ndarray:
    """
    Draws from N(0, 1) restricted to (lower, inf), one draw per entry of `lower`.

    Entries with lower <= TRUNCATION_CUTOFF use naive normal rejection; the rest use the exponential proposal with
    the optimal rate (lower + sqrt(lower**2 + 4)) / 2, accepted with probability exp(-(x - rate)**2 / 2).
    """
    generator = rng.generator
    out = np.empty_like(lower)
    naive = lower <= TRUNCATION_CUTOFF
    pending = np.flatnonzero(naive)
    while pending.size:
        x = generator.standard_normal(pending.size)
        ok = x > lower[pending]
        out[pending[ok]] = x[ok]
        pending = pending[~ok]
    pending = np.flatnonzero(~naive)
    while pending.size:
        bound = lower[pending]
        rate = 0.5 * (bound + np.sqrt(bound * bound + 4.0))
        x = bound + generator.exponential(size=pending.size) / rate
        ok = generator.uniform(size=pending.size) <= np.exp(-0.5 * (x - rate) ** 2)
        out[pending[ok]] = x[ok]
        pending = pending[~ok]
    return out


def sample_truncated_normal(rng: RngStream, mean, side):
    """
    Unit-variance normal draws restricted to one half-line.

    Args:
        rng (RngStream): Stream to draw from.
        mean: Scalar or array of means.
        side: 'right_of_zero' keeps (0, inf), 'left_of_zero' keeps (-inf, 0); an array of booleans selects the
            positive side where True (the probit latent case, z_t = 1).

    Returns:
        Draws with the shape of `mean` (broadcast against a boolean side array).
    """
    if isinstance(side, str):
        if side not in (RIGHT_OF_ZERO, LEFT_OF_ZERO):
            raise ValueError(f"Unknown truncation side '{side}'")
        positive = np.full(np.shape(mean), side == RIGHT_OF_ZERO)
    else:
        positive = np.asarray(side, dtype=bool)
    mean, positive = np.broadcast_arrays(np.asarray(mean, dtype=float), positive)
    sign = np.where(positive, 1.0, -1.0)
    # reflect the left-side case: -X ~ N(-mean, 1) restricted to (0, inf)
    shifted = sign * mean
    draws = _standard_lower_tail(rng, np.atleast_1d(-shifted).astype(float)).reshape(shifted.shape)
    result = sign * (shifted + draws)
    if result.ndim == 0:
        return float(result)
    # the (0, inf) constraint holds analytically; guard the round-off when mean is huge against the draw
    return np.where(positive, np.maximum(result, _TINY), np.minimum(result, -_TINY))


def sample_general_truncated_normal(rng: RngStream, location, scale, lower, upper, size=None):
    """
    N(location, scale**2) restricted to (lower, upper); infinite bounds allowed.

    One-sided intervals go through the exponential-proposal sampler; finite intervals use scipy's truncnorm.
    """
    location = np.asarray(location, dtype=float)
    scale = np.asarray(scale, dtype=float)
    if np.any(scale <= 0):
        raise ValueError(f"Truncated normal scale must be positive, got {scale}")
    if np.any(np.asarray(lower) >= np.asarray(upper)):
        raise ValueError(f"Empty truncation interval ({lower}, {upper})")
    lo = (np.asarray(lower, dtype=float) - location) / scale
    hi = (np.asarray(upper, dtype=float) - location) / scale
    lo, hi = np.broadcast_arrays(lo, hi)
    if size is not None:
        lo, hi = np.broadcast_to(lo, size), np.broadcast_to(hi, size)
    flat_lo, flat_hi = np.atleast_1d(lo).ravel().astype(float), np.atleast_1d(hi).ravel().astype(float)
    out = np.empty_like(flat_lo)
    free = np.isneginf(flat_lo) & np.isposinf(flat_hi)
    right = ~np.isneginf(flat_lo) & np.isposinf(flat_hi)
    left = np.isneginf(flat_lo) & ~np.isposinf(flat_hi)
    bounded = ~(free | right | left)
    if free.any():
        out[free] = rng.generator.standard_normal(int(free.sum()))
    if right.any():
        out[right] = _standard_lower_tail(rng, flat_lo[right])
    if left.any():
        out[left] = -_standard_lower_tail(rng, -flat_hi[left])
    if bounded.any():
        out[bounded] = truncnorm.rvs(flat_lo[bounded], flat_hi[bounded], random_state=rng.generator)
    standard = out.reshape(np.shape(lo))
    result = location + scale * standard
    return result if np.ndim(result) else float(result)
