import math

import numpy as np

from .constants import DEFAULT_HPD_MASS, INTERVAL_MODES, MIN_HPD_DRAWS, MIN_REPLICATES, PARAMETER_NAMES, REGIME_THRESHOLD
from .data_definitions import FitSummary, PosteriorChains


def point_estimates(chains: PosteriorChains) -> tuple[dict[str, float], np.ndarray]:
    """
    Posterior medians (absolute-loss Bayes rule) of the component parameters and of every alpha_t.

    Returns:
        tuple[dict[str, float], np.ndarray]: Parameter medians keyed by name, and the pointwise median weight path.

    Raises:
        ValueError: If the chain holds no draws.
    """
    if chains.m < 1:
        raise ValueError("Cannot summarize an empty chain")
    medians = np.median(chains.params, axis=0)
    return dict(zip(PARAMETER_NAMES, (float(v) for v in medians))), np.median(chains.alpha, axis=0)


def hpd_interval(draws, mass: float = DEFAULT_HPD_MASS) -> tuple[float, float]:
    """
    Shortest interval holding ceil(mass * m) consecutive sorted draws; ties go to the lower window.

    Args:
        draws: At least MIN_HPD_DRAWS real draws.
        mass (float): Probability content, 0 < mass < 1.

    Returns:
        tuple[float, float]: (lower, upper).

    Raises:
        ValueError: For too few draws or a mass outside (0, 1).
    """
    lower, upper = hpd_intervals(np.asarray(draws, dtype=float)[:, None], mass)
    return float(lower[0]), float(upper[0])


def hpd_intervals(draws: np.ndarray, mass: float = DEFAULT_HPD_MASS) -> tuple[np.ndarray, np.ndarray]:
    """Column-wise `hpd_interval` over an (m, p) array of draws."""
    if not 0 < mass < 1:
        raise ValueError(f"HPD mass must lie in (0, 1), got {mass}")
    draws = np.sort(np.asarray(draws, dtype=float), axis=0)
    m = draws.shape[0]
    if m < MIN_HPD_DRAWS:
        raise ValueError(f"HPD intervals need at least {MIN_HPD_DRAWS} draws, got {m}")
    count = min(math.ceil(mass * m), m)
    widths = draws[count - 1 :] - draws[: m - count + 1]
    start = np.argmin(widths, axis=0)  # first minimum, so the lower-indexed window wins ties
    columns = np.arange(draws.shape[1])
    return draws[start, columns], draws[start + count - 1, columns]


def classify_regimes(alpha_hat) -> tuple[np.ndarray, list[int]]:
    """
    Bayes-classifier regimes from an estimated weight path.

    Returns:
        tuple[np.ndarray, list[int]]: labels (1 where alpha_hat > 0.5, so exact 0.5 is labelled 0) and the 1-based
        indices t >= 2 at which the label differs from the previous one.
    """
    alpha_hat = np.asarray(alpha_hat, dtype=float)
    if np.any((alpha_hat < 0) | (alpha_hat > 1)):
        raise ValueError("Weight estimates must lie in [0, 1]")
    labels = (alpha_hat > REGIME_THRESHOLD).astype(np.int8)
    change_points = [int(t) + 1 for t in np.flatnonzero(np.diff(labels)) + 1]
    return labels, change_points


def summarize_chains(chains: PosteriorChains, mass: float = DEFAULT_HPD_MASS) -> FitSummary:
    estimates, alpha_hat = point_estimates(chains)
    lower, upper = hpd_intervals(chains.params, mass)
    alpha_lower, alpha_upper = hpd_intervals(chains.alpha, mass)
    labels, change_points = classify_regimes(alpha_hat)
    return FitSummary(
        estimates=estimates,
        lower=dict(zip(PARAMETER_NAMES, (float(v) for v in lower))),
        upper=dict(zip(PARAMETER_NAMES, (float(v) for v in upper))),
        alpha_hat=alpha_hat,
        alpha_lower=alpha_lower,
        alpha_upper=alpha_upper,
        labels=labels,
        change_points=change_points,
        allocation_prob=chains.allocation_prob,
        mass=mass,
    )


def monte_carlo_summary(
    replicate_point_estimates,
    mass: float = DEFAULT_HPD_MASS,
    interval_mode: str = INTERVAL_MODES[0],
    chain_lower=None,
    chain_upper=None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Averages of replicate point estimates with their 95% HPD intervals, column by column.

    Args:
        replicate_point_estimates: (replicates, p) point estimates.
        mass (float): HPD mass.
        interval_mode (str): 'replicate_set' takes the HPD of the replicate estimates; 'chain_average' averages the
            per-replicate chain HPD bounds given in chain_lower/chain_upper.

    Returns:
        tuple[np.ndarray, np.ndarray, np.ndarray]: (mean, lower, upper), one entry per column.

    Raises:
        ValueError: For fewer than MIN_REPLICATES replicates or a missing chain interval in 'chain_average' mode.
    """
    estimates = np.asarray(replicate_point_estimates, dtype=float)
    if estimates.ndim == 1:
        estimates = estimates[:, None]
    if estimates.shape[0] < MIN_REPLICATES:
        raise ValueError(f"Monte Carlo summaries need at least {MIN_REPLICATES} replicates, got {estimates.shape[0]}")
    mean = estimates.mean(axis=0)
    if interval_mode == "replicate_set":
        lower, upper = hpd_intervals(estimates, mass)
    elif interval_mode == "chain_average":
        if chain_lower is None or chain_upper is None:
            raise ValueError("chain_average mode needs the per-replicate chain HPD bounds")
        lower, upper = np.mean(chain_lower, axis=0), np.mean(chain_upper, axis=0)
    else:
        raise ValueError(f"Unknown interval mode '{interval_mode}', expected one of {INTERVAL_MODES}")
    return mean, lower, upper


def range_summary(replicate_point_estimates) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Mean with the (min, max) replicate range, used when there are too few replicates for an HPD interval."""
    estimates = np.asarray(replicate_point_estimates, dtype=float)
    return estimates.mean(axis=0), estimates.min(axis=0), estimates.max(axis=0)


def format_estimate(value: float, lower: float, upper: float, digits: int = 2) -> str:
    """Table cell in the '0.00 (-0.04;0.06)' layout."""
    return f"{value:.{digits}f} ({lower:.{digits}f};{upper:.{digits}f})"
