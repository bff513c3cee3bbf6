"""
Spike-and-slab machinery for wavelet coefficients observed with unit noise.

Every density ratio is evaluated in log-space. For the Laplace slab gamma_a(x) = (a/2) exp(-a|x|) the marginal is

    log g_a(d) = log(a/2) + a**2/2 + logaddexp(-a d + log Phi(d - a), a d + log Phi(-d - a))

which stays accurate far into the tails because scipy's log_ndtr uses the Mills-ratio asymptotics there.
"""

import numpy as np
from scipy.optimize import minimize
from scipy.special import log_ndtr

from .constants import (
    COARSE_GRID_POINTS,
    GAUSSIAN,
    LAPLACE_SCALE_MAX,
    LAPLACE_SCALE_MIN,
    MIN_LEVEL_SIZE,
    NELDER_MEAD_OPTIONS,
    NELDER_MEAD_STARTS,
    PI_MAX,
    PI_MIN,
    SLAB_FAMILIES,
    VARIANCE_MAX,
    VARIANCE_MIN,
)
from .data_definitions import LevelHyperParams, SlabFamily
from .distributions import RngStream, normal_logpdf, sample_bernoulli, sample_truncated_normal


def log_marginal_density(d, slab: SlabFamily):
    """Log of g = slab convolved with the standard normal, evaluated at d."""
    d = np.asarray(d, dtype=float)
    if slab.kind == GAUSSIAN:
        return normal_logpdf(d, 0.0, np.sqrt(1.0 + slab.param))
    a = slab.param
    return np.log(a / 2.0) + 0.5 * a * a + np.logaddexp(-a * d + log_ndtr(d - a), a * d + log_ndtr(-d - a))


def _log_mixture_terms(d, pi: float, slab: SlabFamily):
    # log((1 - pi) phi(d)) and log(pi g(d)); -inf for the zero-weight side
    with np.errstate(divide="ignore"):
        log_spike = np.log1p(-pi) + normal_logpdf(d)
        log_slab = np.log(pi) + log_marginal_density(d, slab)
    return log_spike, log_slab


def posterior_spike_weight(d, pi: float, slab: SlabFamily):
    """
    Posterior probability that a coefficient is nonzero (pi_post).

    Args:
        d: Empirical coefficient(s).
        pi (float): Prior probability of the slab.
        slab (SlabFamily): Slab of the prior.

    Returns:
        pi * g(d) / (pi * g(d) + (1 - pi) * phi(d)), exactly 0 when pi = 0 and exactly 1 when pi = 1.
    """
    if not 0 <= pi <= 1:
        raise ValueError(f"Prior weight must lie in [0, 1], got {pi}")
    d = np.asarray(d, dtype=float)
    if pi == 0:
        return np.zeros_like(d) if d.ndim else 0.0
    if pi == 1:
        return np.ones_like(d) if d.ndim else 1.0
    log_spike, log_slab = _log_mixture_terms(d, pi, slab)
    weight = np.exp(log_slab - np.logaddexp(log_spike, log_slab))
    return weight if weight.ndim else float(weight)


def eta_weight(d, a: float):
    """Weight of the positive truncated-normal branch of the Laplace-slab posterior (unit noise)."""
    d = np.asarray(d, dtype=float)
    log_positive = -a * d + log_ndtr(d - a)
    log_negative = a * d + log_ndtr(-d - a)
    eta = np.exp(log_positive - np.logaddexp(log_positive, log_negative))
    return eta if eta.ndim else float(eta)


def posterior_mean_coefficient(d, params: LevelHyperParams):
    """Posterior mean of a detail coefficient, pi_post times the slab-posterior mean."""
    d = np.asarray(d, dtype=float)
    weight = posterior_spike_weight(d, params.pi, params.slab)
    if params.slab.kind == GAUSSIAN:
        shrink = params.slab.param / (1.0 + params.slab.param)
        return weight * shrink * d
    a = params.slab.param
    eta = eta_weight(d, a)
    # means of N(d - a, 1) on (0, inf) and N(d + a, 1) on (-inf, 0)
    positive = (d - a) + np.exp(normal_logpdf(d - a) - log_ndtr(d - a))
    negative = (d + a) - np.exp(normal_logpdf(d + a) - log_ndtr(-d - a))
    return weight * (eta * positive + (1.0 - eta) * negative)


def sample_coefficient(rng: RngStream, d, params: LevelHyperParams):
    """
    Draws detail coefficient(s) from the spike-and-slab posterior given empirical value(s) d.

    With probability 1 - pi_post the draw is exactly 0. Otherwise the Gaussian slab draws from
    N(v2 d / (1 + v2), v2 / (1 + v2)); the Laplace slab draws from N(d - a, 1) on (0, inf) with probability eta and
    from N(d + a, 1) on (-inf, 0) otherwise.
    """
    d = np.asarray(d, dtype=float)
    flat = np.atleast_1d(d)
    nonzero = sample_bernoulli(rng, np.atleast_1d(posterior_spike_weight(flat, params.pi, params.slab))).astype(bool)
    draws = np.zeros_like(flat)
    if params.slab.kind == GAUSSIAN:
        shrink = params.slab.param / (1.0 + params.slab.param)
        draws[nonzero] = rng.generator.normal(shrink * flat[nonzero], np.sqrt(shrink))
    else:
        a = params.slab.param
        active = flat[nonzero]
        positive = sample_bernoulli(rng, np.atleast_1d(eta_weight(active, a))).astype(bool)
        means = np.where(positive, active - a, active + a)
        draws[nonzero] = sample_truncated_normal(rng, means, positive)
    return draws.reshape(d.shape) if d.ndim else float(draws[0])


def log_marginal_likelihood(level_coeffs, pi: float, slab: SlabFamily) -> float:
    """Sum over the level of log{(1 - pi) phi(d_i) + pi g(d_i)}."""
    d = np.asarray(level_coeffs, dtype=float)
    if d.size == 0:
        raise ValueError("Marginal likelihood needs at least one coefficient")
    log_spike, log_slab = _log_mixture_terms(d, pi, slab)
    return float(np.sum(np.logaddexp(log_spike, log_slab)))


def _slab_bounds(family_kind: str) -> tuple[float, float]:
    # the Gaussian slab variance is searched on a log10 scale
    if family_kind == GAUSSIAN:
        return np.log10(VARIANCE_MIN), np.log10(VARIANCE_MAX)
    return LAPLACE_SCALE_MIN, LAPLACE_SCALE_MAX


def _to_slab(family_kind: str, coordinate: float) -> SlabFamily:
    return SlabFamily(family_kind, float(10.0**coordinate) if family_kind == GAUSSIAN else float(coordinate))


def _coarse_grid_best(d: np.ndarray, family_kind: str) -> tuple[float, float]:
    low, high = _slab_bounds(family_kind)
    pis = np.linspace(PI_MIN, PI_MAX, COARSE_GRID_POINTS)
    coordinates = np.linspace(low, high, COARSE_GRID_POINTS)
    log_noise = normal_logpdf(d)
    with np.errstate(divide="ignore"):
        log_spike_weights, log_slab_weights = np.log1p(-pis)[:, None], np.log(pis)[:, None]
    best, best_point = -np.inf, (pis[0], coordinates[0])
    for coordinate in coordinates:
        log_slab_density = log_marginal_density(d, _to_slab(family_kind, coordinate))
        values = np.logaddexp(log_spike_weights + log_noise[None, :], log_slab_weights + log_slab_density[None, :]).sum(axis=1)
        index = int(np.argmax(values))
        if values[index] > best:
            best, best_point = values[index], (pis[index], coordinate)
    return best_point


def fit_level_hyperparams(level_coeffs, family_kind: str, level: int = -1) -> LevelHyperParams:
    """
    Marginal maximum likelihood choice of (pi_j, slab parameter) for one resolution level.

    Bounded Nelder-Mead over pi in [PI_MIN, 1] and the slab box (log10 variance for the Gaussian slab, scale for the
    Laplace slab), started from the best point of a coarse grid plus NELDER_MEAD_STARTS; the best optimum wins and
    ties go to the smaller pi. A level whose objective is nowhere finite falls back to (PI_MIN, box midpoint).

    Args:
        level_coeffs: Empirical detail coefficients of the level.
        family_kind (str): 'gaussian' or 'laplace'.
        level (int): Level index recorded in the result.

    Returns:
        LevelHyperParams: The fitted hyperparameters.
    """
    if family_kind not in SLAB_FAMILIES:
        raise ValueError(f"Unknown slab family '{family_kind}', expected one of {SLAB_FAMILIES}")
    d = np.asarray(level_coeffs, dtype=float)
    if d.size == 0:
        raise ValueError(f"Level {level} has no coefficients to fit")
    low, high = _slab_bounds(family_kind)
    bounds = [(PI_MIN, PI_MAX), (low, high)]

    def objective(point):
        value = log_marginal_likelihood(d, float(np.clip(point[0], PI_MIN, PI_MAX)), _to_slab(family_kind, np.clip(point[1], low, high)))
        return -value if np.isfinite(value) else np.inf

    starts = [_coarse_grid_best(d, family_kind)]
    starts += [(PI_MIN + u * (PI_MAX - PI_MIN), low + v * (high - low)) for u, v in NELDER_MEAD_STARTS]
    best_value, best_point = np.inf, None
    for start in starts:
        result = minimize(objective, np.asarray(start), method="Nelder-Mead", bounds=bounds, options=NELDER_MEAD_OPTIONS)
        point = np.clip(result.x, [PI_MIN, low], [PI_MAX, high])
        value = objective(point)
        if value < best_value or (value == best_value and best_point is not None and point[0] < best_point[0]):
            best_value, best_point = value, point
    if best_point is None:
        best_point = np.array([PI_MIN, 0.5 * (low + high)])
    return LevelHyperParams(level=level, pi=float(best_point[0]), slab=_to_slab(family_kind, best_point[1]))


def fit_all_levels(coeffs, J: int, family_kind: str) -> list[LevelHyperParams]:
    """
    Hyperparameters for every detail level of a full coefficient vector.

    Levels with fewer than MIN_LEVEL_SIZE coefficients inherit the fit of the coarsest level that has at least that
    many; when no level is that large (n = 8) the detail coefficients of all levels are pooled into one fit.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    first_full = next((j for j in range(J) if 2**j >= MIN_LEVEL_SIZE), None)
    fitted: dict[int, LevelHyperParams] = {}
    if first_full is None:
        pooled = fit_level_hyperparams(coeffs[1:], family_kind)
        return [LevelHyperParams(j, pooled.pi, pooled.slab) for j in range(J)]
    for j in range(first_full, J):
        fitted[j] = fit_level_hyperparams(coeffs[2**j : 2 ** (j + 1)], family_kind, level=j)
    inherited = fitted[first_full]
    return [fitted.get(j, LevelHyperParams(j, inherited.pi, inherited.slab)) for j in range(J)]


