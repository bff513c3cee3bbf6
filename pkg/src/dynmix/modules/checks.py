import numpy as np

from .data_definitions import ChainConfig, ConsistencyCheckResult, PosteriorChains
from .gibbs import compute_weights
from .wavelet import get_filter

WEIGHT_PATH_TOLERANCE = 1e-12


def consistency_checks(chains: PosteriorChains, config: ChainConfig) -> ConsistencyCheckResult:
    """
    Performs a series of consistency checks on the retained draws of a chain before they are exported.

    This function verifies the following:
    - The number of retained draws equals floor((iterations - burn_in) / thin).
    - Every retained draw respects the ordering mu1 <= mu2.
    - Every weight lies in [0, 1].
    - Every component precision is strictly positive.
    - When theta draws were stored, each weight path equals Phi(idwt(theta)) within 1e-12.

    Args:
        chains (PosteriorChains): The retained draws of the chain.
        config (ChainConfig): The chain settings the draws were produced with.

    Returns:
        ConsistencyCheckResult: The individual counts, a report message and the overall verdict.
    """
    result = ConsistencyCheckResult(retained_expected=config.retained, retained_found=chains.m)

    if chains.m != config.retained:
        result.message = f"Chain holds {chains.m} draws but the schedule retains {config.retained}, cannot check it further."
        return result

    result.ordering_violations = int(np.sum(chains.parameter("mu1") > chains.parameter("mu2")))
    result.alpha_out_of_range = int(np.sum((chains.alpha < 0) | (chains.alpha > 1)))
    result.nonpositive_precisions = int(np.sum(chains.params[:, [1, 3]] <= 0))
    # the weight path is only recomputable from stored coefficients
    if chains.theta is not None:
        wavelet_filter = get_filter(chains.filter_name)
        recomputed = np.array([compute_weights(theta, wavelet_filter) for theta in chains.theta])
        result.max_weight_path_error = float(np.max(np.abs(recomputed - chains.alpha))) if chains.m else 0.0

    weight_path_ok = np.isnan(result.max_weight_path_error) or result.max_weight_path_error <= WEIGHT_PATH_TOLERANCE
    result.passed_checks = (
        result.ordering_violations == 0
        and result.alpha_out_of_range == 0
        and result.nonpositive_precisions == 0
        and bool(weight_path_ok)
    )
    weight_path = "not stored" if np.isnan(result.max_weight_path_error) else f"{result.max_weight_path_error:.2e}"
    result.message = (
        "CONSISTENCY CHECK RESULTS:\n"
        f"Retained draws: {result.retained_found} of {result.retained_expected}\n"
        f"Ordering violations: {result.ordering_violations}\n"
        f"Weights outside [0, 1]: {result.alpha_out_of_range}\n"
        f"Non-positive precisions: {result.nonpositive_precisions}\n"
        f"Max weight path error: {weight_path}\n"
        + (
            "SUCCESS! Chain checks are all GOOD"
            if result.passed_checks
            else "FAILURE! Chain checks do not all pass - please check the configuration and re-run"
        )
    )
    return result
