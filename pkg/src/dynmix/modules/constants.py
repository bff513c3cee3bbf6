import math
import pathlib

from .signal_tables import BLOCKS_HEIGHTS, BUMPS_HEIGHTS, BUMPS_WIDTHS, DJ_BREAKPOINTS  # noqa: F401

SOFTWARE_VERSION = "0.1.0"

# MCMC schedule
DEFAULT_ITERATIONS = 6000
DEFAULT_BURN_IN = 1000
DEFAULT_THIN = 5
DEFAULT_SEED = 20240501
DEFAULT_REFIT_EVERY = 1  # marginal ML refit of the spike-and-slab hyperparameters, every iteration
MIN_SERIES_LENGTH = 8

# priors
GAMMA_PRIOR_SHAPE = 0.01
GAMMA_PRIOR_RATE = 0.01
MIN_PRIOR_SAMPLE = 4

# wavelets
DEFAULT_FILTER = "coif3"  # coiflet with six vanishing moments, 18 taps
FILTER_SUM_TOLERANCE = 1e-12
FILTER_ORTHOGONALITY_TOLERANCE = 1e-10
MAX_MATRIX_SIZE = 1024
SQRT2 = math.sqrt(2.0)

# slab families
GAUSSIAN = "gaussian"
LAPLACE = "laplace"
SLAB_FAMILIES = (GAUSSIAN, LAPLACE)

# empirical Bayes box bounds
PI_MIN = 1e-3
PI_MAX = 1.0
VARIANCE_MIN = 1e-4
VARIANCE_MAX = 1e4
LAPLACE_SCALE_MIN = 0.1
LAPLACE_SCALE_MAX = 3.0
MIN_LEVEL_SIZE = 8  # levels with fewer coefficients inherit from the coarsest level with at least this many
COARSE_GRID_POINTS = 9
NELDER_MEAD_STARTS = ((0.5, 0.5), (0.1, 0.9), (0.9, 0.1))  # unit-box center and two near-corners; the coarse-grid best is the fourth start
NELDER_MEAD_OPTIONS = {"xatol": 1e-7, "fatol": 1e-9, "maxiter": 600}

# truncated normal sampling
TRUNCATION_CUTOFF = 0.4  # standardized truncation point above which the exponential proposal is used

# inference
DEFAULT_HPD_MASS = 0.95
MIN_HPD_DRAWS = 20
MIN_REPLICATES = 20
REGIME_THRESHOLD = 0.5
INTERVAL_MODES = ("replicate_set", "chain_average")
MAX_FAILURE_FRACTION = 0.05

# weight curves
CURVE_KINDS = ("sinusoidal", "blocks", "bumps", "constant", "tabulated")
SINUSOID_AMPLITUDE = 0.4
SINUSOID_OFFSET = 0.5
BLOCKS_LOWER = 0.05
BLOCKS_UPPER = 0.95
BUMPS_PEAK = 0.9
BUMPS_ZERO_FLOOR = 1e-3
CURVE_RESCALING = {
    "sinusoidal": "0.4 cos(2 pi (t/n + pi)) + 0.5 on t = 1..n",
    "blocks": "affine map of the blocks signal onto [0.05, 0.95]",
    "bumps": "bumps signal divided by its maximum, times 0.9, values below 1e-3 set to 0",
    "constant": "constant level",
    "tabulated": "user supplied values",
}

# simulation defaults
DEFAULT_MU = (0.0, 2.0)
DEFAULT_TAU2 = (4.0, 4.0)
DEFAULT_SIM_LENGTH = 1024
DEFAULT_REPLICATES = 30

# ingestion
AGGREGATIONS = ("none", "monthly_mean")
LENGTH_POLICIES = ("strict", "truncate")
DEFAULT_DATE_FORMAT = "%Y-%m-%d"
DEFAULT_SEPARATOR = ","

# output files
CHAINS_FILE = "chains.csv"
SUMMARY_FILE = "summary.json"
METADATA_FILE = "metadata.json"
PLOT_DATA_FILE = "plot_data.csv"
SERIES_FILE = "series.csv"
REPLICATES_FILE = "replicates.csv"
MC_SUMMARY_FILE = "mc_summary.csv"
ALPHA_BANDS_FILE = "alpha_bands.csv"
HYPERPARAMS_FILE = "hyperparams.csv"

PARAMETER_NAMES = ("mu1", "tau2_1", "mu2", "tau2_2")

SPLITTER_LENGTH = 50
SPLITTER = "-" * SPLITTER_LENGTH

OUTPUT_DIRECTORY_ENV = "DYNMIX_OUTPUT_DIR"
CURRENT_WORKING_DIRECTORY = pathlib.Path().absolute()
DEFAULT_OUTPUT_DIRECTORY = CURRENT_WORKING_DIRECTORY / "dynmix_output"
