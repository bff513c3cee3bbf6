from dataclasses import asdict, dataclass, field, fields
from typing import NamedTuple

import numpy as np

from .constants import (
    AGGREGATIONS,
    CURVE_KINDS,
    DEFAULT_BURN_IN,
    DEFAULT_DATE_FORMAT,
    DEFAULT_FILTER,
    DEFAULT_HPD_MASS,
    DEFAULT_ITERATIONS,
    DEFAULT_MU,
    DEFAULT_REFIT_EVERY,
    DEFAULT_REPLICATES,
    DEFAULT_SEED,
    DEFAULT_SEPARATOR,
    DEFAULT_SIM_LENGTH,
    DEFAULT_TAU2,
    DEFAULT_THIN,
    GAUSSIAN,
    INTERVAL_MODES,
    LAPLACE,
    LENGTH_POLICIES,
    PARAMETER_NAMES,
    SLAB_FAMILIES,
)


class SlabFamily(NamedTuple):
    """Slab of a spike-and-slab prior: `gaussian` with variance `param` (v_j^2) or `laplace` with scale `param` (a)."""

    kind: str
    param: float

    def validate(self) -> "SlabFamily":
        if self.kind not in SLAB_FAMILIES:
            raise ValueError(f"Unknown slab family '{self.kind}', expected one of {SLAB_FAMILIES}")
        if not self.param > 0:
            raise ValueError(f"Slab parameter must be positive, got {self.param} for the {self.kind} slab")
        return self


class LevelHyperParams(NamedTuple):
    level: int
    pi: float
    slab: SlabFamily


@dataclass(frozen=True)
class PriorSpec:
    """
    Independent conjugate priors on the component parameters.

    mu_k ~ N(b0[k], B0[k]) and tau2_k ~ Gamma(c0[k], C0[k]) (shape, rate), for k = 1, 2 stored at index k - 1.
    """

    b0: tuple[float, float]
    B0: tuple[float, float]
    c0: tuple[float, float]
    C0: tuple[float, float]

    def __post_init__(self):
        for name in ("B0", "c0", "C0"):
            if any(not value > 0 for value in getattr(self, name)):
                raise ValueError(f"Prior {name} values must all be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class ChainConfig:
    iterations: int = DEFAULT_ITERATIONS
    burn_in: int = DEFAULT_BURN_IN
    thin: int = DEFAULT_THIN
    seed: int = DEFAULT_SEED
    slab: str = LAPLACE
    refit_every: int = DEFAULT_REFIT_EVERY
    filter_name: str = DEFAULT_FILTER
    store_z: bool = False
    store_theta: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be a positive integer, got {self.iterations}")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError(f"burn_in must satisfy 0 <= burn_in < iterations, got {self.burn_in} with {self.iterations} iterations")
        if self.thin < 1:
            raise ValueError(f"thin must be at least 1, got {self.thin}")
        if self.refit_every < 1:
            raise ValueError(f"refit_every must be at least 1, got {self.refit_every}")
        if self.slab not in SLAB_FAMILIES:
            raise ValueError(f"Unknown slab family '{self.slab}', expected one of {SLAB_FAMILIES}")

    @property
    def retained(self) -> int:
        return (self.iterations - self.burn_in) // self.thin


@dataclass
class ModelState:
    """State of one Gibbs sweep. Index 0 of `mu`/`tau2` is component 1, index 1 is component 2."""

    mu: np.ndarray
    tau2: np.ndarray
    z: np.ndarray
    latents: np.ndarray
    theta: np.ndarray
    alpha: np.ndarray


@dataclass
class PosteriorChains:
    """
    Retained (post burn-in, thinned) draws of one chain.

    Attributes:
        params (np.ndarray): (m, 4) draws of mu1, tau2_1, mu2, tau2_2.
        alpha (np.ndarray): (m, n) draws of the weight path.
        iteration (np.ndarray): 1-based sweep number of each retained draw.
        pi_trace (np.ndarray): (m, J) fitted pi_j in force at each retained draw.
        slab_trace (np.ndarray): (m, J) fitted slab parameter in force at each retained draw.
        allocation_prob (np.ndarray): posterior P(z_t = 1 | y), the mean of the retained allocation draws.
        z (np.ndarray | None): (m, n) allocation draws, only when requested.
        theta (np.ndarray | None): (m, n) coefficient draws, only when requested.
    """

    params: np.ndarray
    alpha: np.ndarray
    iteration: np.ndarray
    pi_trace: np.ndarray
    slab_trace: np.ndarray
    allocation_prob: np.ndarray
    slab: str
    filter_name: str
    z: np.ndarray | None = None
    theta: np.ndarray | None = None

    @property
    def m(self) -> int:
        return self.params.shape[0]

    @property
    def n(self) -> int:
        return self.alpha.shape[1]

    def parameter(self, name: str) -> np.ndarray:
        return self.params[:, PARAMETER_NAMES.index(name)]


@dataclass
class FitSummary:
    estimates: dict[str, float]
    lower: dict[str, float]
    upper: dict[str, float]
    alpha_hat: np.ndarray
    alpha_lower: np.ndarray
    alpha_upper: np.ndarray
    labels: np.ndarray
    change_points: list[int]
    allocation_prob: np.ndarray
    mass: float = DEFAULT_HPD_MASS


@dataclass(frozen=True)
class WeightCurve:
    kind: str
    n: int
    level: float = 0.5  # constant curves only
    values: tuple[float, ...] = ()  # tabulated curves only

    def __post_init__(self):
        if self.kind not in CURVE_KINDS:
            raise ValueError(f"Unknown weight curve '{self.kind}', expected one of {CURVE_KINDS}")


@dataclass(frozen=True)
class ScenarioConfig:
    curve: WeightCurve
    mu: tuple[float, float] = DEFAULT_MU
    tau2: tuple[float, float] = DEFAULT_TAU2
    replicates: int = DEFAULT_REPLICATES
    chain: ChainConfig = field(default_factory=ChainConfig)
    interval_mode: str = INTERVAL_MODES[0]
    workers: int = 1

    def __post_init__(self):
        if not self.mu[0] < self.mu[1]:
            raise ValueError(f"Scenarios require mu1 < mu2, got {self.mu}")
        if any(not t > 0 for t in self.tau2):
            raise ValueError(f"Component precisions must be positive, got {self.tau2}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be positive, got {self.replicates}")
        if self.interval_mode not in INTERVAL_MODES:
            raise ValueError(f"Unknown interval mode '{self.interval_mode}', expected one of {INTERVAL_MODES}")

    @property
    def n(self) -> int:
        return self.curve.n


@dataclass
class MonteCarloResult:
    estimates: np.ndarray  # (replicates, 4) posterior medians, NaN rows for failed replicates
    chain_lower: np.ndarray  # (replicates, 4) per-replicate chain HPD bounds
    chain_upper: np.ndarray
    alpha_estimates: np.ndarray  # (replicates, n) posterior-median weight paths
    alpha_true: np.ndarray
    summary_mean: np.ndarray
    summary_lower: np.ndarray
    summary_upper: np.ndarray
    alpha_mean: np.ndarray
    alpha_lower: np.ndarray
    alpha_upper: np.ndarray
    interval_method: str
    failures: dict[int, str] = field(default_factory=dict)


@dataclass
class ConsistencyCheckResult:
    retained_expected: int
    retained_found: int
    ordering_violations: int = -1
    alpha_out_of_range: int = -1
    nonpositive_precisions: int = -1
    max_weight_path_error: float = float("nan")  # NaN when theta draws were not stored
    message: str = "No issues detected."
    passed_checks: bool = False


@dataclass
class ExportResult:
    is_export_successful: bool = True
    written: list[str] = field(default_factory=list)
    message: str = ""
    has_error: bool = False
    error_message: str = ""


@dataclass
class RunConfig:
    """Every setting a command resolves. The metadata file of a run is this dataclass serialized."""

    command: str = "fit"
    input_path: str = ""
    value_column: str = "value"
    date_column: str = ""
    date_format: str = DEFAULT_DATE_FORMAT
    separator: str = DEFAULT_SEPARATOR
    aggregate: str = AGGREGATIONS[0]
    length_policy: str = LENGTH_POLICIES[0]
    output_dir: str = ""
    slab: str = LAPLACE
    filter_name: str = DEFAULT_FILTER
    iterations: int = DEFAULT_ITERATIONS
    burn_in: int = DEFAULT_BURN_IN
    thin: int = DEFAULT_THIN
    seed: int = DEFAULT_SEED
    refit_every: int = DEFAULT_REFIT_EVERY
    store_z: bool = False
    store_theta: bool = False
    hpd_mass: float = DEFAULT_HPD_MASS
    curve: str = "sinusoidal"
    curve_level: float = 0.5
    n: int = DEFAULT_SIM_LENGTH
    mu1: float = DEFAULT_MU[0]
    mu2: float = DEFAULT_MU[1]
    tau2_1: float = DEFAULT_TAU2[0]
    tau2_2: float = DEFAULT_TAU2[1]
    replicates: int = DEFAULT_REPLICATES
    workers: int = 1
    interval_mode: str = INTERVAL_MODES[0]
    quiet: bool = False

    def __post_init__(self):
        if self.aggregate not in AGGREGATIONS:
            raise ValueError(f"Unknown aggregation '{self.aggregate}', expected one of {AGGREGATIONS}")
        if self.length_policy not in LENGTH_POLICIES:
            raise ValueError(f"Unknown length policy '{self.length_policy}', expected one of {LENGTH_POLICIES}")
        if self.slab not in (GAUSSIAN, LAPLACE):
            raise ValueError(f"Unknown slab family '{self.slab}', expected one of {SLAB_FAMILIES}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"Unknown configuration keys: {sorted(unknown)}")
        return cls(**values)

    def chain_config(self) -> ChainConfig:
        return ChainConfig(
            iterations=self.iterations,
            burn_in=self.burn_in,
            thin=self.thin,
            seed=self.seed,
            slab=self.slab,
            refit_every=self.refit_every,
            filter_name=self.filter_name,
            store_z=self.store_z,
            store_theta=self.store_theta,
        )
