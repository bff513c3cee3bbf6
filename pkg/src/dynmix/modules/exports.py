import json
from pathlib import Path

import numpy as np
import polars as pl

from .constants import (
    ALPHA_BANDS_FILE,
    CHAINS_FILE,
    CURVE_RESCALING,
    HYPERPARAMS_FILE,
    MC_SUMMARY_FILE,
    METADATA_FILE,
    PARAMETER_NAMES,
    PLOT_DATA_FILE,
    REPLICATES_FILE,
    SERIES_FILE,
    SOFTWARE_VERSION,
    SUMMARY_FILE,
)
from .data_definitions import ExportResult, FitSummary, MonteCarloResult, PosteriorChains, RunConfig
from .inference import format_estimate


def build_metadata(config: RunConfig, **notes) -> dict:
    """Resolved configuration plus software version and run notes. Holds no timestamps so reruns match byte for byte."""
    return {"software_version": SOFTWARE_VERSION, "config": config.to_dict(), "notes": notes}


def chains_frame(chains: PosteriorChains) -> pl.DataFrame:
    columns = {"iteration": chains.iteration}
    columns.update({name: chains.params[:, i] for i, name in enumerate(PARAMETER_NAMES)})
    columns.update({f"alpha_{t}": chains.alpha[:, t - 1] for t in range(1, chains.n + 1)})
    return pl.DataFrame(columns)


def hyperparams_frame(chains: PosteriorChains) -> pl.DataFrame:
    columns = {"iteration": chains.iteration}
    for j in range(chains.pi_trace.shape[1]):
        columns[f"pi_{j}"] = chains.pi_trace[:, j]
        columns[f"slab_{j}"] = chains.slab_trace[:, j]
    return pl.DataFrame(columns)


def plot_frame(summary: FitSummary, labels: list[str]) -> pl.DataFrame:
    return pl.DataFrame(
        {
            "t": np.arange(1, len(summary.alpha_hat) + 1),
            "label": labels,
            "alpha_hat": summary.alpha_hat,
            "hpd_lower": summary.alpha_lower,
            "hpd_upper": summary.alpha_upper,
            "regime": summary.labels.astype(np.int64),
            "allocation_prob": summary.allocation_prob,
        }
    )


def summary_document(summary: FitSummary, labels: list[str], retained: int) -> dict:
    return {
        "hpd_mass": summary.mass,
        "retained_draws": retained,
        "estimates": {
            name: {
                "median": summary.estimates[name],
                "hpd_lower": summary.lower[name],
                "hpd_upper": summary.upper[name],
                "formatted": format_estimate(summary.estimates[name], summary.lower[name], summary.upper[name]),
            }
            for name in PARAMETER_NAMES
        },
        "change_points": summary.change_points,
        "change_point_labels": [labels[t - 1] for t in summary.change_points],
        "regime_labels": summary.labels.tolist(),
    }


def _write(result: ExportResult, path: Path, writer) -> None:
    writer(path)
    result.written.append(str(path))
    result.message += f"Exported {path.name} to: {path}\n"


def _write_json(document: dict):
    return lambda path: path.write_text(json.dumps(document, indent=2) + "\n")


def _export(output_dir, files: list[tuple[str, object]]) -> ExportResult:
    """
    Writes each (file name, writer) pair into the output directory.

    Returns:
        ExportResult: Written paths and messages; on failure `is_export_successful` is False and `error_message`
        names the file that could not be written.
    """
    result = ExportResult()
    output_dir = Path(output_dir)
    current = output_dir
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
        for name, writer in files:
            current = output_dir / name
            _write(result, current, writer)
    except (OSError, pl.exceptions.PolarsError) as e:
        result.has_error = True
        result.error_message = f"Error writing {current}: {e}"
        result.message += "Error exporting data"
        result.is_export_successful = False
    return result


def export_fit(chains: PosteriorChains, summary: FitSummary, labels: list[str], config: RunConfig, **notes) -> ExportResult:
    """
    Exports a fitted chain: chains.csv (one row per retained draw: iteration, mu1, tau2_1, mu2, tau2_2,
    alpha_1..alpha_n), hyperparams.csv (pi_j and slab_j per retained draw), summary.json, plot_data.csv (t, label,
    alpha_hat, hpd_lower, hpd_upper, regime, allocation_prob) and metadata.json.
    """
    return _export(
        config.output_dir,
        [
            (CHAINS_FILE, chains_frame(chains).write_csv),
            (HYPERPARAMS_FILE, hyperparams_frame(chains).write_csv),
            (SUMMARY_FILE, _write_json(summary_document(summary, labels, chains.m))),
            (PLOT_DATA_FILE, plot_frame(summary, labels).write_csv),
            (METADATA_FILE, _write_json(build_metadata(config, **notes))),
        ],
    )


def export_series(y, z_true, alpha_true, config: RunConfig) -> ExportResult:
    """Exports a simulated series as series.csv (t, value, z_true, alpha_true) plus metadata.json."""
    frame = pl.DataFrame(
        {
            "t": np.arange(1, len(y) + 1),
            "value": np.asarray(y, dtype=float),
            "z_true": np.asarray(z_true, dtype=np.int64),
            "alpha_true": np.asarray(alpha_true, dtype=float),
        }
    )
    metadata = build_metadata(config, curve_rescaling=CURVE_RESCALING[config.curve])
    return _export(config.output_dir, [(SERIES_FILE, frame.write_csv), (METADATA_FILE, _write_json(metadata))])


def replicates_frame(result: MonteCarloResult) -> pl.DataFrame:
    replicates = result.estimates.shape[0]
    columns = {
        "replicate": np.arange(replicates),
        "status": ["failed" if r in result.failures else "ok" for r in range(replicates)],
    }
    for i, name in enumerate(PARAMETER_NAMES):
        columns[name] = result.estimates[:, i]
        columns[f"{name}_lower"] = result.chain_lower[:, i]
        columns[f"{name}_upper"] = result.chain_upper[:, i]
    columns["error"] = [result.failures.get(r, "") for r in range(replicates)]
    return pl.DataFrame(columns)


def mc_summary_frame(result: MonteCarloResult, config: RunConfig) -> pl.DataFrame:
    truth = (config.mu1, config.tau2_1, config.mu2, config.tau2_2)
    return pl.DataFrame(
        {
            "parameter": list(PARAMETER_NAMES),
            "truth": list(truth),
            "mean": result.summary_mean,
            "hpd_lower": result.summary_lower,
            "hpd_upper": result.summary_upper,
            "formatted": [format_estimate(*values) for values in zip(result.summary_mean, result.summary_lower, result.summary_upper)],
            "interval_method": [result.interval_method] * len(PARAMETER_NAMES),
        }
    )


def alpha_bands_frame(result: MonteCarloResult) -> pl.DataFrame:
    return pl.DataFrame(
        {
            "t": np.arange(1, len(result.alpha_true) + 1),
            "truth": result.alpha_true,
            "mean": result.alpha_mean,
            "hpd_lower": result.alpha_lower,
            "hpd_upper": result.alpha_upper,
        }
    )


def export_monte_carlo(result: MonteCarloResult, config: RunConfig, **notes) -> ExportResult:
    """
    Exports a Monte Carlo study: replicates.csv (per-replicate medians and chain HPD bounds), mc_summary.csv
    (parameter, truth, mean, hpd_lower, hpd_upper, formatted, interval_method), alpha_bands.csv (t, truth, mean,
    hpd_lower, hpd_upper) and metadata.json.
    """
    metadata = build_metadata(
        config,
        curve_rescaling=CURVE_RESCALING[config.curve],
        interval_method=result.interval_method,
        failed_replicates=len(result.failures),
        **notes,
    )
    return _export(
        config.output_dir,
        [
            (REPLICATES_FILE, replicates_frame(result).write_csv),
            (MC_SUMMARY_FILE, mc_summary_frame(result, config).write_csv),
            (ALPHA_BANDS_FILE, alpha_bands_frame(result).write_csv),
            (METADATA_FILE, _write_json(metadata)),
        ],
    )
