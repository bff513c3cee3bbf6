from dataclasses import replace

import numpy as np

from dynmix.modules import consistency_checks


def test_consistency_checks_pass(fitted_chain, small_chain_config):
    result = consistency_checks(fitted_chain, small_chain_config)
    assert result.passed_checks, result.message
    assert result.retained_found == result.retained_expected == 50
    assert (result.ordering_violations, result.alpha_out_of_range, result.nonpositive_precisions) == (0, 0, 0)
    assert result.max_weight_path_error <= 1e-12, "Stored weights should equal Phi(idwt(theta))"
    assert "SUCCESS" in result.message


def test_consistency_checks_without_theta(fitted_chain, small_chain_config):
    result = consistency_checks(replace(fitted_chain, theta=None), small_chain_config)
    assert result.passed_checks
    assert np.isnan(result.max_weight_path_error)
    assert "not stored" in result.message


def test_consistency_checks_catch_bad_draws(fitted_chain, small_chain_config):
    params = fitted_chain.params.copy()
    params[0, [0, 2]] = params[0, [2, 0]]
    params[1, 3] = -1.0
    alpha = fitted_chain.alpha.copy()
    alpha[2, 5] = 1.5
    result = consistency_checks(replace(fitted_chain, params=params, alpha=alpha), small_chain_config)
    assert not result.passed_checks
    assert result.ordering_violations == 1
    assert result.nonpositive_precisions == 1
    assert result.alpha_out_of_range == 1
    assert result.max_weight_path_error > 0.1, "Tampered weights should no longer match the coefficients"
    assert "FAILURE" in result.message


def test_consistency_checks_catch_wrong_retained_count(fitted_chain, small_chain_config):
    result = consistency_checks(fitted_chain, replace(small_chain_config, thin=1))
    assert not result.passed_checks
    assert result.retained_expected == 100 and result.retained_found == 50
