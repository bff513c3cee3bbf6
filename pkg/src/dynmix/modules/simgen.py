from concurrent.futures import ProcessPoolExecutor

import numpy as np
from tqdm import tqdm

from .constants import (
    BLOCKS_HEIGHTS,
    BLOCKS_LOWER,
    BLOCKS_UPPER,
    BUMPS_HEIGHTS,
    BUMPS_PEAK,
    BUMPS_WIDTHS,
    BUMPS_ZERO_FLOOR,
    DEFAULT_HPD_MASS,
    DJ_BREAKPOINTS,
    MAX_FAILURE_FRACTION,
    MIN_HPD_DRAWS,
    MIN_REPLICATES,
    SINUSOID_AMPLITUDE,
    SINUSOID_OFFSET,
)
from .data_definitions import MonteCarloResult, ScenarioConfig, WeightCurve
from .distributions import RngStream, sample_bernoulli, sample_normal
from .gibbs import run_chain
from .inference import hpd_intervals, monte_carlo_summary, point_estimates, range_summary
from .wavelet import levels_for


def unit_grid(n: int) -> np.ndarray:
    """t / n for t = 1..n."""
    return np.arange(1, n + 1) / n


def blocks(t: np.ndarray) -> np.ndarray:
    """Donoho-Johnstone blocks: sum of h_j K(t - t_j) with the step K(x) = (1 + sign(x)) / 2."""
    t = np.asarray(t, dtype=float)
    steps = (1.0 + np.sign(t[:, None] - np.asarray(DJ_BREAKPOINTS)[None, :])) / 2.0
    return steps @ np.asarray(BLOCKS_HEIGHTS)


def bumps(t: np.ndarray) -> np.ndarray:
    """Donoho-Johnstone bumps: sum of h_j K((t - t_j) / w_j) with K(x) = (1 + |x|)**-4."""
    t = np.asarray(t, dtype=float)
    scaled = np.abs(t[:, None] - np.asarray(DJ_BREAKPOINTS)[None, :]) / np.asarray(BUMPS_WIDTHS)[None, :]
    return (1.0 + scaled) ** -4 @ np.asarray(BUMPS_HEIGHTS)


def weight_curve(curve: WeightCurve) -> np.ndarray:
    """
    True dynamic weights alpha_t on the unit grid t/n.

    sinusoidal: 0.4 cos(2 pi (t/n + pi)) + 0.5. blocks: affine map of the blocks signal onto [0.05, 0.95].
    bumps: the bumps signal scaled to a 0.9 peak, with values below BUMPS_ZERO_FLOOR set to exactly 0.
    constant: the configured level. tabulated: the given values. All outputs are clamped to [0, 1].

    Raises:
        ValueError: If n is not a power of two, or constant/tabulated values are invalid.
    """
    n = curve.n
    levels_for(n)
    t = unit_grid(n)
    if curve.kind == "sinusoidal":
        alpha = SINUSOID_AMPLITUDE * np.cos(2.0 * np.pi * (t + np.pi)) + SINUSOID_OFFSET
    elif curve.kind == "blocks":
        signal = blocks(t)
        alpha = BLOCKS_LOWER + (BLOCKS_UPPER - BLOCKS_LOWER) * (signal - signal.min()) / (signal.max() - signal.min())
    elif curve.kind == "bumps":
        signal = bumps(t)
        alpha = BUMPS_PEAK * signal / signal.max()
        alpha[alpha < BUMPS_ZERO_FLOOR] = 0.0
    elif curve.kind == "constant":
        if not 0 <= curve.level <= 1:
            raise ValueError(f"Constant weight must lie in [0, 1], got {curve.level}")
        alpha = np.full(n, float(curve.level))
    else:
        alpha = np.asarray(curve.values, dtype=float)
        if alpha.shape != (n,):
            raise ValueError(f"Tabulated weights have {alpha.size} values, expected {n}")
        if np.any((alpha < 0) | (alpha > 1)):
            raise ValueError("Tabulated weights must lie in [0, 1]")
    return np.clip(alpha, 0.0, 1.0)


def generate_series(rng: RngStream, alpha, mu, tau2) -> tuple[np.ndarray, np.ndarray]:
    """
    Draws z_t ~ Bern(alpha_t), then y_t from N(mu_2, 1/tau2_2) when z_t = 1 and from N(mu_1, 1/tau2_1) otherwise.

    Returns:
        tuple[np.ndarray, np.ndarray]: (y, z_true).
    """
    alpha = np.asarray(alpha, dtype=float)
    z = sample_bernoulli(rng, alpha)
    means = np.where(z == 1, mu[1], mu[0])
    sds = np.where(z == 1, 1.0 / np.sqrt(tau2[1]), 1.0 / np.sqrt(tau2[0]))
    return sample_normal(rng, means, sds), z


def _run_replicate(scenario: ScenarioConfig, alpha_true: np.ndarray, replicate: int, mass: float):
    # one replicate owns RngStream(seed, replicate) for both data generation and its chain
    rng = RngStream(scenario.chain.seed, replicate)
    y, _ = generate_series(rng, alpha_true, scenario.mu, scenario.tau2)
    chains = run_chain(y, scenario.chain, rng=rng)
    estimates, alpha_hat = point_estimates(chains)
    if chains.m >= MIN_HPD_DRAWS:
        lower, upper = hpd_intervals(chains.params, mass)
    else:
        lower, upper = chains.params.min(axis=0), chains.params.max(axis=0)
    return np.array(list(estimates.values())), lower, upper, alpha_hat


def _safe_replicate(args):
    scenario, alpha_true, replicate, mass = args
    try:
        return replicate, _run_replicate(scenario, alpha_true, replicate, mass), None
    except Exception as err:  # recorded per replicate, the study decides whether to abort
        return replicate, None, f"{type(err).__name__}: {err}"


def run_monte_carlo(scenario: ScenarioConfig, mass: float = DEFAULT_HPD_MASS, quiet: bool = True) -> MonteCarloResult:
    """
    Runs the replicate study of a scenario.

    Replicate r generates its data and chain from RngStream(seed, r), so results do not depend on the number of
    workers or the execution order. Replicate failures are recorded; the study aborts when more than 5% fail.
    Averages and HPD bands (parameters and pointwise alpha) come from `monte_carlo_summary`; with fewer than
    MIN_REPLICATES successful replicates the intervals fall back to the replicate range.

    Args:
        scenario (ScenarioConfig): Curve, true parameters, replicate count, chain settings and workers.
        mass (float): HPD mass.
        quiet (bool): Hides the progress bar.

    Returns:
        MonteCarloResult: Per-replicate estimates and the aggregated summary.

    Raises:
        RuntimeError: If more than MAX_FAILURE_FRACTION of the replicates fail.
    """
    alpha_true = weight_curve(scenario.curve)
    tasks = [(scenario, alpha_true, r, mass) for r in range(scenario.replicates)]
    if scenario.workers > 1:
        with ProcessPoolExecutor(max_workers=scenario.workers) as pool:
            outcomes = list(tqdm(pool.map(_safe_replicate, tasks), total=len(tasks), disable=quiet, desc="Replicates"))
    else:
        outcomes = [_safe_replicate(task) for task in tqdm(tasks, disable=quiet, desc="Replicates")]

    n = scenario.n
    estimates = np.full((scenario.replicates, 4), np.nan)
    chain_lower = np.full((scenario.replicates, 4), np.nan)
    chain_upper = np.full((scenario.replicates, 4), np.nan)
    alpha_estimates = np.full((scenario.replicates, n), np.nan)
    failures: dict[int, str] = {}
    for replicate, result, error in sorted(outcomes, key=lambda outcome: outcome[0]):
        if error is not None:
            failures[replicate] = error
            continue
        estimates[replicate], chain_lower[replicate], chain_upper[replicate], alpha_estimates[replicate] = result
    if len(failures) > MAX_FAILURE_FRACTION * scenario.replicates:
        raise RuntimeError(f"{len(failures)} of {scenario.replicates} replicates failed: {failures}")

    ok = np.array([r not in failures for r in range(scenario.replicates)])
    if ok.sum() >= MIN_REPLICATES:
        interval_method = scenario.interval_mode
        summary = monte_carlo_summary(estimates[ok], mass, scenario.interval_mode, chain_lower[ok], chain_upper[ok])
        alpha_mean, alpha_lower, alpha_upper = monte_carlo_summary(alpha_estimates[ok], mass)
    else:
        interval_method = "range"
        summary = range_summary(estimates[ok])
        alpha_mean, alpha_lower, alpha_upper = range_summary(alpha_estimates[ok])
    return MonteCarloResult(
        estimates=estimates,
        chain_lower=chain_lower,
        chain_upper=chain_upper,
        alpha_estimates=alpha_estimates,
        alpha_true=alpha_true,
        summary_mean=summary[0],
        summary_lower=summary[1],
        summary_upper=summary[2],
        alpha_mean=alpha_mean,
        alpha_lower=alpha_lower,
        alpha_upper=alpha_upper,
        interval_method=interval_method,
        failures=failures,
    )
