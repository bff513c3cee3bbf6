import argparse
import sys
from dataclasses import replace
from time import perf_counter

from dynmix.modules import (
    AGGREGATIONS,
    CURVE_KINDS,
    INTERVAL_MODES,
    LENGTH_POLICIES,
    SLAB_FAMILIES,
    ExportResult,
    RngStream,
    RunConfig,
    ScenarioConfig,
    WeightCurve,
    apply_length_policy,
    consistency_checks,
    export_fit,
    export_monte_carlo,
    export_series,
    generate_series,
    ingest_series,
    load_config,
    print_splitter,
    resolve_output_dir,
    run_chain,
    run_monte_carlo,
    summarize_chains,
    weight_curve,
)

COMMANDS = ("fit", "simulate", "mc")


def build_parser() -> argparse.ArgumentParser:
    # flags default to SUPPRESS so that only the ones actually given override the defaults
    options = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    options.add_argument("--config", help="JSON configuration (or metadata.json of an earlier run); overrides flags")
    options.add_argument("--quiet", action="store_true", help="Only print errors")

    data = options.add_argument_group("data")
    data.add_argument("--input", dest="input_path", help="Delimited text or .xlsx file with a header row")
    data.add_argument("--value-column", dest="value_column")
    data.add_argument("--date-column", dest="date_column")
    data.add_argument("--date-format", dest="date_format", help="strptime format, e.g. %%Y-%%m-%%d or %%d/%%m/%%Y")
    data.add_argument("--separator")
    data.add_argument("--aggregate", choices=AGGREGATIONS)
    data.add_argument("--length-policy", dest="length_policy", choices=LENGTH_POLICIES)
    data.add_argument("--output-dir", dest="output_dir", help="Defaults to $DYNMIX_OUTPUT_DIR, then ./dynmix_output")

    sampler = options.add_argument_group("sampler")
    sampler.add_argument("--slab", choices=SLAB_FAMILIES)
    sampler.add_argument("--filter", dest="filter_name", help="Orthogonal PyWavelets filter name, e.g. coif3, db4, haar")
    sampler.add_argument("--iterations", type=int)
    sampler.add_argument("--burn-in", dest="burn_in", type=int)
    sampler.add_argument("--thin", type=int)
    sampler.add_argument("--seed", type=int)
    sampler.add_argument("--refit-every", dest="refit_every", type=int)
    sampler.add_argument("--store-z", dest="store_z", action="store_true")
    sampler.add_argument("--store-theta", dest="store_theta", action="store_true")
    sampler.add_argument("--hpd-mass", dest="hpd_mass", type=float)

    scenario = options.add_argument_group("scenario")
    scenario.add_argument("--curve", choices=CURVE_KINDS)
    scenario.add_argument("--curve-level", dest="curve_level", type=float, help="Weight of the constant curve")
    scenario.add_argument("--n", type=int, help="Series length, a power of two")
    scenario.add_argument("--mu1", type=float)
    scenario.add_argument("--mu2", type=float)
    scenario.add_argument("--tau2-1", dest="tau2_1", type=float)
    scenario.add_argument("--tau2-2", dest="tau2_2", type=float)
    scenario.add_argument("--replicates", type=int)
    scenario.add_argument("--workers", type=int)
    scenario.add_argument("--interval-mode", dest="interval_mode", choices=INTERVAL_MODES)

    parser = argparse.ArgumentParser(prog="dynmix", description="Dynamic two-component Gaussian mixtures with wavelet-probit weights")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("fit", parents=[options], help="Fit a series and export chains, summary and plot data")
    commands.add_parser("simulate", parents=[options], help="Generate a series from a weight curve")
    commands.add_parser("mc", parents=[options], help="Run a Monte Carlo replicate study")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """
    Builds the run configuration: defaults < DYNMIX_OUTPUT_DIR < flags < --config file.

    The resolved output directory is written back so the metadata of the run reproduces it.
    """
    values = vars(args).copy()
    command = values.pop("command")
    config_path = values.pop("config", None)
    if config_path:
        values.update(load_config(config_path))
    values["command"] = command
    config = RunConfig.from_dict(values)
    return replace(config, output_dir=str(resolve_output_dir(config.output_dir)))


def scenario_from(config: RunConfig) -> ScenarioConfig:
    return ScenarioConfig(
        curve=WeightCurve(config.curve, config.n, level=config.curve_level),
        mu=(config.mu1, config.mu2),
        tau2=(config.tau2_1, config.tau2_2),
        replicates=config.replicates,
        chain=config.chain_config(),
        interval_mode=config.interval_mode,
        workers=config.workers,
    )


def refit_notes(config: RunConfig) -> dict:
    """Warns about sparse hyperparameter refits and returns the metadata note recording them."""
    if config.refit_every == 1:
        return {}
    print(f"Warning: level hyperparameters are refitted every {config.refit_every} sweeps instead of every sweep")
    return {"hyperparameter_refit_every": config.refit_every}


def fit_command(config: RunConfig) -> ExportResult:
    """Ingests the input series, runs the sampler, checks the chain and exports it."""
    if not config.input_path:
        raise ValueError("The fit command needs an input file (--input)")
    y, labels = ingest_series(
        config.input_path,
        value_column=config.value_column,
        date_column=config.date_column,
        aggregate=config.aggregate,
        date_format=config.date_format,
        separator=config.separator,
    )
    y, labels, dropped = apply_length_policy(y, labels, config.length_policy)
    if dropped:
        print(f"Warning: dropped the {dropped} oldest observations to keep {len(y)} (a power of two)")
    if not config.quiet:
        print(f"Fitting {len(y)} observations from {config.input_path} with the {config.slab} slab")
    notes = refit_notes(config)

    chain_config = config.chain_config()
    chains = run_chain(y, chain_config, quiet=config.quiet)
    check_results = consistency_checks(chains, chain_config)
    if not config.quiet:
        print(check_results.message)
    if not check_results.passed_checks:
        raise ValueError("Chain failed the consistency checks, nothing was exported")
    summary = summarize_chains(chains, config.hpd_mass)
    return export_fit(chains, summary, labels, config, dropped_observations=dropped, series_length=len(y), **notes)


def simulate_command(config: RunConfig) -> ExportResult:
    scenario = scenario_from(config)
    alpha = weight_curve(scenario.curve)
    y, z_true = generate_series(RngStream(config.seed), alpha, scenario.mu, scenario.tau2)
    if not config.quiet:
        print(f"Simulated {len(y)} observations from the {config.curve} curve, {int(z_true.sum())} from component 2")
    return export_series(y, z_true, alpha, config)


def mc_command(config: RunConfig) -> ExportResult:
    scenario = scenario_from(config)
    if not config.quiet:
        print(f"Running {scenario.replicates} replicates of the {config.curve} scenario (n = {scenario.n}, {config.slab} slab)")
    notes = refit_notes(config)
    result = run_monte_carlo(scenario, config.hpd_mass, quiet=config.quiet)
    if result.failures:
        print(f"Warning: {len(result.failures)} replicates failed and were left out of the summary")
    return export_monte_carlo(result, config, **notes)


def main(argv: list[str] | None = None) -> int:
    """
    Entry point of the `dynmix` command.

    Returns:
        int: 0 on success, 1 when an error was reported.
    """
    args = build_parser().parse_args(argv)
    timer_start = perf_counter()
    try:
        config = resolve_config(args)
        if not config.quiet:
            print_splitter()
            print(f"dynmix {config.command}")
            print_splitter()
        command = {"fit": fit_command, "simulate": simulate_command, "mc": mc_command}[config.command]
        export_info = command(config)
    except (ValueError, OSError, RuntimeError) as err:
        print(f"Error: {err}", file=sys.stderr)
        return 1

    if not config.quiet:
        print_splitter()
        print(export_info.message)
    if not export_info.is_export_successful:
        print(export_info.error_message, file=sys.stderr)
        return 1
    if not config.quiet:
        print(f"{config.command} completed in {perf_counter() - timer_start:.2f} seconds")
    return 0


def run() -> None:
    sys.exit(main())
