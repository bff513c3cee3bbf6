from dataclasses import replace

import numpy as np
import pytest

from dynmix.modules.constants import BUMPS_HEIGHTS, BUMPS_WIDTHS, DJ_BREAKPOINTS
from dynmix.modules.data_definitions import ChainConfig, ScenarioConfig, WeightCurve
from dynmix.modules.distributions import RngStream
from dynmix.modules.gibbs import run_chain
from dynmix.modules.inference import point_estimates
from dynmix.modules.simgen import blocks, bumps, generate_series, run_monte_carlo, weight_curve
from dynmix.modules.wavelet import SeriesLengthError

TINY_CHAIN = ChainConfig(iterations=45, burn_in=15, thin=1, seed=3, refit_every=5)


def test_sinusoidal_curve():
    alpha = weight_curve(WeightCurve("sinusoidal", 1024))
    assert alpha.min() >= 0.1 - 1e-12 and alpha.max() <= 0.9 + 1e-12, "Sinusoid should stay in 0.5 +/- 0.4"
    t = np.arange(1, 1025) / 1024
    assert np.allclose(alpha, 0.4 * np.cos(2 * np.pi * (t + np.pi)) + 0.5)


def test_blocks_curve():
    alpha = weight_curve(WeightCurve("blocks", 512))
    assert alpha.min() == pytest.approx(0.05) and alpha.max() == pytest.approx(0.95), "Blocks map onto [0.05, 0.95]"
    assert len(np.unique(np.round(alpha, 12))) <= 13, "Blocks is piecewise constant between its 11 breakpoints"
    # direct evaluation at t = 0.5: every jump before 0.5 has happened
    heights_before = [4, -5, 3, -4, 5, -4.2, 2.1]
    assert blocks(np.array([0.5]))[0] == pytest.approx(sum(heights_before))


def test_bumps_curve():
    alpha = weight_curve(WeightCurve("bumps", 1024))
    assert alpha.max() == pytest.approx(0.9), "Bumps peak is rescaled to 0.9"
    assert np.any(alpha == 0.0), "Bumps should have exact zeros on its baseline"
    assert np.all(alpha[alpha > 0] >= 1e-3)
    t = np.array([0.1, 0.3333])
    direct = [sum(h * (1 + abs((s - b) / w)) ** -4 for b, h, w in zip(DJ_BREAKPOINTS, BUMPS_HEIGHTS, BUMPS_WIDTHS)) for s in t]
    assert np.allclose(bumps(t), direct)


def test_constant_and_tabulated_curves():
    assert np.all(weight_curve(WeightCurve("constant", 16, level=0.3)) == 0.3)
    values = tuple(np.linspace(0.0, 1.0, 8))
    assert np.allclose(weight_curve(WeightCurve("tabulated", 8, values=values)), values)
    with pytest.raises(ValueError):
        weight_curve(WeightCurve("tabulated", 16, values=values))
    with pytest.raises(ValueError):
        weight_curve(WeightCurve("constant", 16, level=1.5))
    with pytest.raises(SeriesLengthError):
        weight_curve(WeightCurve("sinusoidal", 100))
    with pytest.raises(ValueError):
        WeightCurve("doppler", 16)


def test_generate_series_degenerate_weights():
    rng = RngStream(1)
    y, z = generate_series(rng, np.zeros(20_000), (0.0, 2.0), (4.0, 4.0))
    assert np.all(z == 0)
    assert abs(y.mean()) < 0.02, "All draws should come from component 1"
    y, z = generate_series(rng, np.ones(20_000), (0.0, 2.0), (4.0, 16.0))
    assert np.all(z == 1)
    assert abs(y.var() - 1.0 / 16.0) < 0.005, "Component 2 variance is 1 / tau2_2"


def test_generate_series_allocation_frequencies():
    alpha = weight_curve(WeightCurve("sinusoidal", 16))
    rng = RngStream(2)
    counts = np.zeros(16)
    for _ in range(20_000):
        counts += generate_series(rng, alpha, (0.0, 2.0), (4.0, 4.0))[1]
    se = np.sqrt(alpha * (1 - alpha) / 20_000)
    assert np.all(np.abs(counts / 20_000 - alpha) < 4 * se), "P(z_t = 1) should match alpha_t"


def test_monte_carlo_with_few_replicates_reports_ranges():
    scenario = ScenarioConfig(curve=WeightCurve("sinusoidal", 32), mu=(0.0, 3.0), replicates=2, chain=TINY_CHAIN)
    result = run_monte_carlo(scenario)
    assert result.interval_method == "range", "Fewer than 20 replicates fall back to the replicate range"
    assert result.failures == {}
    assert result.estimates.shape == (2, 4) and result.alpha_estimates.shape == (2, 32)
    assert np.allclose(result.summary_lower, result.estimates.min(axis=0))
    assert np.allclose(result.summary_upper, result.estimates.max(axis=0))
    assert np.allclose(result.alpha_mean, result.alpha_estimates.mean(axis=0))


def test_monte_carlo_is_independent_of_workers():
    scenario = ScenarioConfig(curve=WeightCurve("blocks", 16), mu=(0.0, 3.0), replicates=3, chain=TINY_CHAIN)
    serial = run_monte_carlo(scenario)
    parallel = run_monte_carlo(replace(scenario, workers=2))
    assert np.array_equal(serial.estimates, parallel.estimates), "Replicate results must not depend on the worker count"
    assert np.array_equal(serial.alpha_estimates, parallel.alpha_estimates)


def test_replicate_matches_a_direct_fit():
    scenario = ScenarioConfig(curve=WeightCurve("sinusoidal", 16), mu=(0.0, 3.0), replicates=2, chain=TINY_CHAIN)
    result = run_monte_carlo(scenario)
    rng = RngStream(TINY_CHAIN.seed, 1)
    y, _ = generate_series(rng, weight_curve(scenario.curve), scenario.mu, scenario.tau2)
    estimates, _ = point_estimates(run_chain(y, TINY_CHAIN, rng=rng))
    assert np.array_equal(result.estimates[1], list(estimates.values())), "Replicate r is a pure function of (seed, r)"


def test_scenario_validation():
    with pytest.raises(ValueError):
        ScenarioConfig(curve=WeightCurve("sinusoidal", 16), mu=(2.0, 0.0))
    with pytest.raises(ValueError):
        ScenarioConfig(curve=WeightCurve("sinusoidal", 16), tau2=(0.0, 4.0))
    with pytest.raises(ValueError):
        ScenarioConfig(curve=WeightCurve("sinusoidal", 16), interval_mode="pooled")


@pytest.mark.slow
@pytest.mark.parametrize("slab", ["gaussian", "laplace"])
def test_desk_scale_sinusoidal_study(slab):
    chain = ChainConfig(iterations=3000, burn_in=500, thin=5, seed=2024, slab=slab)
    scenario = ScenarioConfig(curve=WeightCurve("sinusoidal", 256), replicates=30, chain=chain, workers=4)
    result = run_monte_carlo(scenario)
    mu1, tau2_1, mu2, tau2_2 = result.summary_mean
    assert abs(mu1) < 0.1 and abs(mu2 - 2.0) < 0.1
    assert abs(tau2_1 - 4.0) < 0.8 and abs(tau2_2 - 4.0) < 0.8
    covered = (result.alpha_lower <= result.alpha_true) & (result.alpha_true <= result.alpha_upper)
    assert covered.mean() >= 0.8, "Pointwise replicate band should cover the true curve at most time points"


@pytest.mark.slow
def test_desk_scale_bumps_null_regions():
    chain = ChainConfig(iterations=3000, burn_in=500, thin=5, seed=2025)
    scenario = ScenarioConfig(curve=WeightCurve("bumps", 256), replicates=30, chain=chain, workers=4)
    result = run_monte_carlo(scenario)
    assert result.alpha_mean[result.alpha_true == 0.0].mean() < 0.15


@pytest.mark.slow
@pytest.mark.parametrize("slab", ["gaussian", "laplace"])
def test_static_weight_is_recovered(slab):
    alpha = weight_curve(WeightCurve("constant", 256, level=0.5))
    y, _ = generate_series(RngStream(7), alpha, (0.0, 2.0), (4.0, 4.0))
    chains = run_chain(y, ChainConfig(iterations=3000, burn_in=500, thin=5, seed=7, slab=slab))
    assert abs(np.median(chains.alpha, axis=0).mean() - 0.5) < 0.1
