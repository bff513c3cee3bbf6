from .checks import consistency_checks  # noqa: F401
from .constants import (  # noqa: F401
    AGGREGATIONS,
    CURVE_KINDS,
    DEFAULT_OUTPUT_DIRECTORY,
    INTERVAL_MODES,
    LENGTH_POLICIES,
    OUTPUT_DIRECTORY_ENV,
    PARAMETER_NAMES,
    SLAB_FAMILIES,
    SPLITTER,
)
from .data_definitions import (  # noqa: F401
    ChainConfig,
    ConsistencyCheckResult,
    ExportResult,
    FitSummary,
    LevelHyperParams,
    MonteCarloResult,
    PosteriorChains,
    PriorSpec,
    RunConfig,
    ScenarioConfig,
    SlabFamily,
    WeightCurve,
)
from .distributions import RngStream  # noqa: F401
from .exports import export_fit, export_monte_carlo, export_series  # noqa: F401
from .gibbs import run_chain  # noqa: F401
from .inference import format_estimate, hpd_interval, monte_carlo_summary, point_estimates, summarize_chains  # noqa: F401
from .simgen import generate_series, run_monte_carlo, weight_curve  # noqa: F401
from .utils import IngestError, apply_length_policy, ingest_series, load_config, print_splitter, resolve_output_dir  # noqa: F401
from .wavelet import SeriesLengthError, dwt, get_filter, idwt  # noqa: F401
