import numpy as np
import pytest

from dynmix.modules.data_definitions import PosteriorChains
from dynmix.modules.inference import (
    classify_regimes,
    format_estimate,
    hpd_interval,
    hpd_intervals,
    monte_carlo_summary,
    point_estimates,
    range_summary,
    summarize_chains,
)


def make_chains(params, alpha):
    m = len(params)
    return PosteriorChains(
        params=np.asarray(params, dtype=float),
        alpha=np.asarray(alpha, dtype=float),
        iteration=np.arange(1, m + 1),
        pi_trace=np.zeros((m, 1)),
        slab_trace=np.ones((m, 1)),
        allocation_prob=np.zeros(np.shape(alpha)[1]),
        slab="laplace",
        filter_name="coif3",
    )


def test_point_estimates_are_medians():
    params = [[0.0, 4.0, 2.0, 3.0], [0.2, 5.0, 2.2, 4.0], [0.1, 6.0, 1.9, 5.0]]
    alpha = [[0.1, 0.9], [0.3, 0.7], [0.2, 0.8]]
    estimates, alpha_hat = point_estimates(make_chains(params, alpha))
    assert estimates == {"mu1": 0.1, "tau2_1": 5.0, "mu2": 2.0, "tau2_2": 4.0}
    assert np.allclose(alpha_hat, [0.2, 0.8])
    with pytest.raises(ValueError):
        point_estimates(make_chains(np.empty((0, 4)), np.empty((0, 2))))


def test_hpd_interval_ties_go_to_the_lower_window():
    assert hpd_interval(np.arange(1.0, 101.0), 0.9) == (1.0, 90.0), "Equal widths should pick the lowest window"


def test_hpd_interval_of_normal_draws():
    draws = np.random.default_rng(0).normal(size=200_000)
    lower, upper = hpd_interval(draws)
    assert lower == pytest.approx(-1.96, abs=0.03) and upper == pytest.approx(1.96, abs=0.03)


def test_hpd_interval_of_skewed_draws_is_shorter_than_equal_tails():
    draws = np.random.default_rng(1).exponential(size=50_000)
    lower, upper = hpd_interval(draws)
    equal_tails = np.quantile(draws, [0.025, 0.975])
    assert upper - lower < equal_tails[1] - equal_tails[0]
    assert lower < 0.01, "HPD of an exponential should start at the mode"


def test_hpd_errors():
    with pytest.raises(ValueError):
        hpd_interval(np.arange(10.0))
    with pytest.raises(ValueError):
        hpd_interval(np.arange(100.0), 1.0)


def test_hpd_intervals_columnwise():
    draws = np.column_stack([np.arange(100.0), 10.0 * np.arange(100.0)])
    lower, upper = hpd_intervals(draws, 0.5)
    assert np.array_equal(lower, [0.0, 0.0]) and np.array_equal(upper, [49.0, 490.0])


def shortest_window_by_enumeration(draws, mass):
    # every window of sorted draws holding at least ceil(mass * m) of them
    ordered = np.sort(draws)
    m = len(ordered)
    count = int(np.ceil(mass * m))
    candidates = [(ordered[j] - ordered[i], i, j) for i in range(m) for j in range(i + count - 1, m)]
    width, i, j = min(candidates)
    return width, ordered[i], ordered[j]


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("mass", [0.5, 0.8, 0.95])
def test_hpd_interval_is_the_shortest_window(seed, mass):
    draws = np.random.default_rng(seed).gamma(2.0, size=80)
    lower, upper = hpd_interval(draws, mass)
    width, _, _ = shortest_window_by_enumeration(draws, mass)
    assert upper - lower == pytest.approx(width, abs=1e-12), "HPD width should equal the brute-force minimum"
    assert np.sum((draws >= lower) & (draws <= upper)) >= np.ceil(mass * len(draws)), "HPD should hold the requested mass"


def test_hpd_intervals_grow_with_mass():
    draws = np.random.default_rng(6).normal(size=20_000)
    masses = [0.5, 0.8, 0.95, 0.99]
    intervals = [hpd_interval(draws, mass) for mass in masses]
    widths = [upper - lower for lower, upper in intervals]
    assert widths == sorted(widths), "Wider mass should never give a shorter interval"
    for (inner_lower, inner_upper), (outer_lower, outer_upper) in zip(intervals[:-1], intervals[1:]):
        assert outer_lower <= inner_lower and inner_upper <= outer_upper, "Intervals should nest as the mass grows"


def test_classify_regimes():
    labels, change_points = classify_regimes([0.2, 0.6, 0.7, 0.4, 0.5])
    assert labels.tolist() == [0, 1, 1, 0, 0], "Exactly 0.5 should be labelled 0"
    assert change_points == [2, 4], "Change points are 1-based positions where the label switches"
    assert classify_regimes(np.full(8, 0.9))[1] == []
    with pytest.raises(ValueError):
        classify_regimes([0.2, 1.2])


def test_summarize_chains(fitted_chain):
    summary = summarize_chains(fitted_chain)
    estimates, alpha_hat = point_estimates(fitted_chain)
    assert summary.estimates == estimates
    assert np.array_equal(summary.alpha_hat, alpha_hat)
    for name in estimates:
        assert summary.lower[name] <= summary.estimates[name] <= summary.upper[name], f"{name} median should sit in its HPD"
    assert np.all(summary.alpha_lower <= summary.alpha_upper)
    assert summary.labels.shape == (64,)
    assert summary.mass == 0.95


def test_monte_carlo_summary():
    estimates = np.column_stack([np.linspace(-0.1, 0.1, 40), np.linspace(1.9, 2.1, 40)])
    mean, lower, upper = monte_carlo_summary(estimates)
    assert np.allclose(mean, [0.0, 2.0])
    assert np.all(lower >= estimates.min(axis=0)) and np.all(upper <= estimates.max(axis=0))

    chain_lower, chain_upper = estimates - 0.5, estimates + 0.5
    _, lower, upper = monte_carlo_summary(estimates, interval_mode="chain_average", chain_lower=chain_lower, chain_upper=chain_upper)
    assert np.allclose(lower, [-0.5, 1.5]) and np.allclose(upper, [0.5, 2.5]), "chain_average averages the chain bounds"

    with pytest.raises(ValueError):
        monte_carlo_summary(estimates[:10])
    with pytest.raises(ValueError):
        monte_carlo_summary(estimates, interval_mode="chain_average")
    with pytest.raises(ValueError):
        monte_carlo_summary(estimates, interval_mode="pooled")


def test_range_summary():
    mean, lower, upper = range_summary([[1.0], [3.0]])
    assert (mean[0], lower[0], upper[0]) == (2.0, 1.0, 3.0)


def test_format_estimate():
    assert format_estimate(0.001, -0.04, 0.06) == "0.00 (-0.04;0.06)"
    assert format_estimate(220.6, 206.25, 236.28) == "220.60 (206.25;236.28)"
