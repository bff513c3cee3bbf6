"""
Fixtures for testing the dynmix modules.

The fixtures provide small simulated series and short chains fitted to them, so that the sampler, the checks and
the exports are tested on the real objects rather than on mocks. Chains are kept short (tens of retained draws on
series of 32-64 observations) and seeded, so every test is deterministic.
"""

import numpy as np
import polars as pl
import pytest

from dynmix.modules import ChainConfig, RngStream, WeightCurve, generate_series, run_chain, weight_curve


@pytest.fixture(scope="session")
def small_chain_config():
    """150 sweeps, 50 burn-in, thin 2: 50 retained draws."""
    return ChainConfig(iterations=150, burn_in=50, thin=2, seed=11, refit_every=5, store_theta=True)


@pytest.fixture(scope="session")
def sinusoidal_series():
    """A well separated n = 64 series from the sinusoidal weight curve, with its true allocations and weights."""
    alpha = weight_curve(WeightCurve("sinusoidal", 64))
    y, z = generate_series(RngStream(5), alpha, (0.0, 4.0), (4.0, 4.0))
    return y, z, alpha


@pytest.fixture(scope="session")
def fitted_chain(sinusoidal_series, small_chain_config):
    y, _, _ = sinusoidal_series
    return run_chain(y, small_chain_config)


@pytest.fixture()
def series_file(tmp_path, sinusoidal_series):
    """The sinusoidal series written as a delimited file with a 'value' column."""
    y, _, _ = sinusoidal_series
    path = tmp_path / "series_input.csv"
    pl.DataFrame({"value": y}).write_csv(path)
    return path


@pytest.fixture()
def monthly_gauge_file(tmp_path):
    """Daily gauge readings from 1 May 2004 to 31 December 2014 (128 calendar months)."""
    days = pl.date_range(pl.date(2004, 5, 1), pl.date(2014, 12, 31), interval="1d", eager=True)
    rng = np.random.default_rng(3)
    levels = 200.0 + 40.0 * rng.standard_normal(len(days))
    path = tmp_path / "gauge.csv"
    pl.DataFrame({"date": [f"{day:%d/%m/%Y}" for day in days], "quota": levels}).write_csv(path)
    return path
