"""
Data-augmentation Gibbs sampler for the two-component Gaussian mixture with weights alpha_t = Phi((W^T theta)_t).

One sweep updates, in order: (mu_1, tau2_1, mu_2, tau2_2), the mu_1 <= mu_2 ordering, the allocations z, the probit
latents l, the spike-and-slab hyperparameters (every `refit_every` sweeps), the coefficients theta and the weights.
The DWT matrix is never formed: w_t^T l is entry t of dwt(l) and x_t^T theta is entry t of idwt(theta).
"""

from dataclasses import replace

import numpy as np
from tqdm import tqdm

from .constants import GAMMA_PRIOR_RATE, GAMMA_PRIOR_SHAPE, MIN_PRIOR_SAMPLE, MIN_SERIES_LENGTH
from .data_definitions import ChainConfig, LevelHyperParams, ModelState, PosteriorChains, PriorSpec
from .distributions import RngStream, normal_cdf, normal_logpdf, sample_bernoulli, sample_gamma, sample_normal, sample_truncated_normal
from .shrinkage import fit_all_levels, sample_coefficient
from .wavelet import SeriesLengthError, WaveletFilter, dwt, get_filter, idwt, level_slice, levels_for

WEIGHT_EDGE = np.finfo(float).eps


def quartiles(y) -> tuple[float, float]:
    # linear interpolation between order statistics (type 7)
    q1, q3 = np.quantile(np.asarray(y, dtype=float), [0.25, 0.75], method="linear")
    return float(q1), float(q3)


def default_priors_from_data(y) -> PriorSpec:
    """
    Data-driven priors: mu_1 ~ N(q1, s^2), mu_2 ~ N(q3, s^2), tau2_k ~ Gamma(0.01, 0.01).

    Raises:
        ValueError: For fewer than MIN_PRIOR_SAMPLE observations, non-finite values or zero sample variance.
    """
    y = np.asarray(y, dtype=float)
    if len(y) < MIN_PRIOR_SAMPLE:
        raise ValueError(f"Data-driven priors need at least {MIN_PRIOR_SAMPLE} observations, got {len(y)}")
    if not np.isfinite(y).all():
        raise ValueError("Data-driven priors need finite observations")
    variance = float(np.var(y, ddof=1))
    if not variance > 0:
        raise ValueError("Data have zero sample variance, the data-driven prior is degenerate")
    q1, q3 = quartiles(y)
    return PriorSpec(
        b0=(q1, q3),
        B0=(variance, variance),
        c0=(GAMMA_PRIOR_SHAPE, GAMMA_PRIOR_SHAPE),
        C0=(GAMMA_PRIOR_RATE, GAMMA_PRIOR_RATE),
    )


def initial_state(y) -> ModelState:
    """z assigned by the median split, mu at the quartiles, tau2 = 1/s^2, theta = 0 and alpha = 0.5."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    precision = 1.0 / float(np.var(y, ddof=1))
    z = (y > np.median(y)).astype(np.int8)
    return ModelState(
        mu=np.array(quartiles(y)),
        tau2=np.array([precision, precision]),
        z=z,
        latents=np.where(z == 1, 1.0, -1.0),
        theta=np.zeros(n),
        alpha=np.full(n, 0.5),
    )


def update_component_params(rng: RngStream, y, z, priors: PriorSpec, tau2_current) -> tuple[np.ndarray, np.ndarray]:
    """
    Conjugate draws of (mu_1, tau2_1, mu_2, tau2_2), in that order.

    For component k with T_k members and sum s_k, mu_k ~ N(b_k, B_k) with B_k = 1 / (1/B0k + tau2_k T_k) and
    b_k = B_k (tau2_k s_k + b0k / B0k) using the current tau2_k, then tau2_k ~ Gamma(c0k + T_k/2, C0k + SS_k/2)
    with SS_k computed around the freshly drawn mu_k. Empty components draw from the prior.

    Returns:
        tuple[np.ndarray, np.ndarray]: New (mu, tau2) pairs.
    """
    y = np.asarray(y, dtype=float)
    z = np.asarray(z)
    mu = np.empty(2)
    tau2 = np.empty(2)
    for k in range(2):
        members = y[z == k]
        count = members.size
        precision = float(tau2_current[k])
        post_var = 1.0 / (1.0 / priors.B0[k] + precision * count)
        post_mean = post_var * (precision * members.sum() + priors.b0[k] / priors.B0[k])
        mu[k] = sample_normal(rng, post_mean, np.sqrt(post_var))
        tau2[k] = sample_gamma(rng, priors.c0[k] + 0.5 * count, priors.C0[k] + 0.5 * float(np.sum((members - mu[k]) ** 2)))
    return mu, tau2


def enforce_ordering(state: ModelState) -> ModelState:
    """Swaps the (mu_k, tau2_k) pairs when mu_2 < mu_1. Nothing else changes."""
    if state.mu[1] < state.mu[0]:
        return replace(state, mu=state.mu[::-1].copy(), tau2=state.tau2[::-1].copy())
    return state


def update_allocations(rng: RngStream, y, mu, tau2, alpha) -> np.ndarray:
    """Draws z_t ~ Bern(beta_t), beta_t the posterior probability of component 2, computed in log-space."""
    y = np.asarray(y, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    with np.errstate(divide="ignore"):
        log_second = np.log(alpha) + normal_logpdf(y, mu[1], 1.0 / np.sqrt(tau2[1]))
        log_first = np.log1p(-alpha) + normal_logpdf(y, mu[0], 1.0 / np.sqrt(tau2[0]))
    beta = np.exp(log_second - np.logaddexp(log_second, log_first))
    return sample_bernoulli(rng, beta)


def update_latents(rng: RngStream, z, theta, wavelet_filter: WaveletFilter | None = None) -> np.ndarray:
    """Draws l_t ~ N((W^T theta)_t, 1), restricted to (0, inf) when z_t = 1 and to (-inf, 0) when z_t = 0."""
    return sample_truncated_normal(rng, idwt(theta, wavelet_filter), np.asarray(z) == 1)


def _draw_coefficients(rng: RngStream, empirical: np.ndarray, hyperparams: list[LevelHyperParams]) -> np.ndarray:
    J = levels_for(len(empirical))
    theta = np.empty_like(empirical)
    # diffuse prior on c00
    theta[0] = sample_normal(rng, empirical[0], 1.0)
    for params in hyperparams:
        window = level_slice(params.level, J)
        theta[window] = sample_coefficient(rng, empirical[window], params)
    return theta


def update_coefficients(
    rng: RngStream, latents, hyperparams_per_level: list[LevelHyperParams], wavelet_filter: WaveletFilter | None = None
) -> np.ndarray:
    """
    Draws theta given the latents: c00 ~ N(d*_1, 1) and every detail from its spike-and-slab posterior at d* = dwt(l).

    Args:
        rng (RngStream): Stream to draw from.
        latents: Probit latents l, length 2**J.
        hyperparams_per_level (list[LevelHyperParams]): One entry per level 0..J-1.
        wavelet_filter (WaveletFilter | None): Filter, the default coiflet when None.
    """
    return _draw_coefficients(rng, dwt(latents, wavelet_filter), hyperparams_per_level)


def compute_weights(theta, wavelet_filter: WaveletFilter | None = None) -> np.ndarray:
    """Phi(idwt(theta)), kept inside [tiny, 1 - eps] so both log(alpha) and log(1 - alpha) stay finite."""
    return np.clip(normal_cdf(idwt(theta, wavelet_filter)), np.finfo(float).tiny, 1.0 - WEIGHT_EDGE)


def _validate_series(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise ValueError(f"Expected a one-dimensional series, got shape {y.shape}")
    if not np.isfinite(y).all():
        raise ValueError("Series contains NaN or infinite values")
    if len(y) < MIN_SERIES_LENGTH or len(y) & (len(y) - 1):
        raise SeriesLengthError(
            f"Series length {len(y)} must be a power of two >= {MIN_SERIES_LENGTH}; pad or truncate it (the CLI offers a truncate policy)"
        )
    return y


def run_chain(
    y, config: ChainConfig, priors: PriorSpec | None = None, rng: RngStream | None = None, quiet: bool = True
) -> PosteriorChains:
    """
    Runs the Gibbs sampler and keeps the post burn-in, thinned draws.

    Sweep i (1-based) is retained when i > burn_in and (i - burn_in) is a multiple of thin, which keeps
    floor((iterations - burn_in) / thin) draws.

    Args:
        y: Observed series, length a power of two >= 8, all values finite.
        config (ChainConfig): Schedule, seed, slab family, filter and storage options.
        priors (PriorSpec | None): Component priors, data-driven when None.
        rng (RngStream | None): Stream to continue; RngStream(config.seed) when None.
        quiet (bool): Hides the progress bar.

    Returns:
        PosteriorChains: The retained draws.

    Raises:
        SeriesLengthError: If the length is not a power of two >= 8.
        ValueError: If the series contains NaN or infinite values.
    """
    y = _validate_series(y)
    n = len(y)
    J = levels_for(n)
    priors = priors or default_priors_from_data(y)
    rng = rng or RngStream(config.seed)
    wavelet_filter = get_filter(config.filter_name)
    m = config.retained

    params = np.empty((m, 4))
    alpha_draws = np.empty((m, n))
    iteration = np.empty(m, dtype=np.int64)
    pi_trace = np.empty((m, J))
    slab_trace = np.empty((m, J))
    z_sum = np.zeros(n)
    z_draws = np.empty((m, n), dtype=np.int8) if config.store_z else None
    theta_draws = np.empty((m, n)) if config.store_theta else None

    state = initial_state(y)
    hyperparams: list[LevelHyperParams] = []
    kept = 0
    for sweep in tqdm(range(1, config.iterations + 1), disable=quiet, desc="Gibbs sweeps"):
        mu, tau2 = update_component_params(rng, y, state.z, priors, state.tau2)
        state = enforce_ordering(replace(state, mu=mu, tau2=tau2))
        state.z = update_allocations(rng, y, state.mu, state.tau2, state.alpha)
        state.latents = update_latents(rng, state.z, state.theta, wavelet_filter)
        empirical = dwt(state.latents, wavelet_filter)
        if not hyperparams or (sweep - 1) % config.refit_every == 0:
            hyperparams = fit_all_levels(empirical, J, config.slab)
        state.theta = _draw_coefficients(rng, empirical, hyperparams)
        state.alpha = compute_weights(state.theta, wavelet_filter)

        if sweep > config.burn_in and (sweep - config.burn_in) % config.thin == 0:
            params[kept] = (state.mu[0], state.tau2[0], state.mu[1], state.tau2[1])
            alpha_draws[kept] = state.alpha
            iteration[kept] = sweep
            pi_trace[kept] = [h.pi for h in hyperparams]
            slab_trace[kept] = [h.slab.param for h in hyperparams]
            z_sum += state.z
            if z_draws is not None:
                z_draws[kept] = state.z
            if theta_draws is not None:
                theta_draws[kept] = state.theta
            kept += 1

    return PosteriorChains(
        params=params,
        alpha=alpha_draws,
        iteration=iteration,
        pi_trace=pi_trace,
        slab_trace=slab_trace,
        allocation_prob=z_sum / max(m, 1),
        slab=config.slab,
        filter_name=config.filter_name,
        z=z_draws,
        theta=theta_draws,
    )
