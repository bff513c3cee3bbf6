import json
import os
from pathlib import Path

import numpy as np
import polars as pl

from .constants import (
    AGGREGATIONS,
    DEFAULT_DATE_FORMAT,
    DEFAULT_OUTPUT_DIRECTORY,
    DEFAULT_SEPARATOR,
    LENGTH_POLICIES,
    MIN_SERIES_LENGTH,
    OUTPUT_DIRECTORY_ENV,
    SPLITTER,
)
from .wavelet import SeriesLengthError

HEADER_LINES = 1


class IngestError(ValueError):
    """Raised for input files that cannot be turned into a series. `line` is the 1-based file line when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def _read_table(path: Path, separator: str, date_column: str, date_format: str) -> pl.DataFrame:
    # every column is read as text so that bad cells can be reported with their line
    try:
        if path.suffix.lower() == ".xlsx":
            df = pl.read_excel(path)
            if date_column in df.columns and df.schema[date_column].is_temporal():
                df = df.with_columns(pl.col(date_column).dt.strftime(date_format))
            return df.select(pl.all().cast(pl.String))
        return pl.read_csv(path, separator=separator, infer_schema=False)
    except pl.exceptions.PolarsError as err:
        raise IngestError(f"Cannot read {path}: {err}") from err


def _first_bad_line(df: pl.DataFrame, raw: str, parsed: str) -> int | None:
    bad = df.filter(pl.col(raw).is_not_null() & (pl.col(raw).str.strip_chars() != "") & pl.col(parsed).is_null())
    return None if bad.is_empty() else int(bad["line"][0])


def ingest_series(
    path,
    value_column: str = "value",
    date_column: str = "",
    aggregate: str = AGGREGATIONS[0],
    date_format: str = DEFAULT_DATE_FORMAT,
    separator: str = DEFAULT_SEPARATOR,
) -> tuple[np.ndarray, list[str]]:
    """
    Reads a series from a delimited text file (or the first sheet of an `.xlsx` workbook) with a header row.

    Records are put in time order when a date column is given. With `monthly_mean` the records are grouped by
    calendar month and averaged; missing values inside a month are skipped, and a month between the first and the
    last one with no observed value is an error. Without aggregation any missing value is an error.

    Args:
        path: Input file.
        value_column (str): Numeric column holding the observations.
        date_column (str): Optional date column, parsed with `date_format`.
        aggregate (str): 'none' or 'monthly_mean'.
        date_format (str): strptime format of the date column, e.g. '%Y-%m-%d' or '%d/%m/%Y'.
        separator (str): Field separator of delimited files.

    Returns:
        tuple[np.ndarray, list[str]]: The values and one label per value (ISO date, 'YYYY-MM' month, or the
        1-based record number when there is no date column).

    Raises:
        IngestError: For unreadable files, missing columns, unparseable cells (with their line number) or an
            empty result.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Input file {path} does not exist")
    if aggregate not in AGGREGATIONS:
        raise ValueError(f"Unknown aggregation '{aggregate}', expected one of {AGGREGATIONS}")
    if aggregate == "monthly_mean" and not date_column:
        raise ValueError("monthly_mean aggregation needs a date column")

    df = _read_table(path, separator, date_column, date_format)
    for column in filter(None, (value_column, date_column)):
        if column not in df.columns:
            raise IngestError(f"Column '{column}' not found in {path}, available columns: {df.columns}")
    df = df.with_row_index("line", offset=HEADER_LINES + 1).with_columns(
        pl.col(value_column).str.strip_chars().cast(pl.Float64, strict=False).alias("_value")
    )
    bad_line = _first_bad_line(df, value_column, "_value")
    if bad_line is not None:
        raise IngestError(f"'{value_column}' value is not numeric in {path}", bad_line)

    if date_column:
        df = df.with_columns(pl.col(date_column).str.strip_chars().str.strptime(pl.Date, date_format, strict=False).alias("_date"))
        bad_line = _first_bad_line(df, date_column, "_date")
        missing = df.filter(pl.col("_date").is_null())
        if bad_line is None and not missing.is_empty():
            bad_line = int(missing["line"][0])
        if bad_line is not None:
            raise IngestError(f"'{date_column}' does not match the date format '{date_format}' in {path}", bad_line)
        df = df.sort("_date", maintain_order=True)

    if df.is_empty():
        raise IngestError(f"No observations found in {path}")

    if aggregate == "monthly_mean":
        monthly = (
            df.group_by(pl.col("_date").dt.truncate("1mo").alias("_month"))
            .agg(pl.col("_value").mean())
            .sort("_month")
        )
        months = pl.DataFrame({"_month": pl.date_range(monthly["_month"].min(), monthly["_month"].max(), interval="1mo", eager=True)})
        monthly = months.join(monthly, on="_month", how="left")
        empty = monthly.filter(pl.col("_value").is_null())
        if not empty.is_empty():
            raise IngestError(f"Month {empty['_month'][0]:%Y-%m} has no observed values in {path}")
        return monthly["_value"].to_numpy(), [f"{month:%Y-%m}" for month in monthly["_month"]]

    missing = df.filter(pl.col("_value").is_null())
    if not missing.is_empty():
        raise IngestError(f"Missing '{value_column}' value in {path}", int(missing["line"][0]))
    if date_column:
        labels = [f"{day:%Y-%m-%d}" for day in df["_date"]]
    else:
        labels = [str(index) for index in range(1, df.height + 1)]
    return df["_value"].to_numpy(), labels


def apply_length_policy(values, labels: list[str], policy: str = LENGTH_POLICIES[0]) -> tuple[np.ndarray, list[str], int]:
    """
    Enforces a dyadic series length.

    'strict' rejects any length that is not a power of two >= MIN_SERIES_LENGTH; 'truncate' keeps the most recent
    2**floor(log2 n) observations and reports how many were dropped.

    Returns:
        tuple[np.ndarray, list[str], int]: The values, their labels and the number of dropped observations.

    Raises:
        SeriesLengthError: If the (truncated) length is unusable.
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    if policy not in LENGTH_POLICIES:
        raise ValueError(f"Unknown length policy '{policy}', expected one of {LENGTH_POLICIES}")
    if policy == "truncate" and n >= MIN_SERIES_LENGTH:
        kept = 1 << (n.bit_length() - 1)
        values, labels = values[n - kept :], list(labels[n - kept :])
    if len(values) < MIN_SERIES_LENGTH or len(values) & (len(values) - 1):
        raise SeriesLengthError(
            f"Series has {len(values)} observations; a power of two >= {MIN_SERIES_LENGTH} is required (try --length-policy truncate)"
        )
    return values, list(labels), n - len(values)


def load_config(path) -> dict:
    """
    Reads a JSON run configuration.

    Both a plain configuration object and a metadata file written by a previous run (configuration under the
    'config' key) are accepted.
    """
    try:
        values = json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise ValueError(f"Config file {path} is not valid JSON: {err}") from err
    if isinstance(values, dict) and "config" in values:
        values = values["config"]
    if not isinstance(values, dict):
        raise ValueError(f"Config file {path} must hold a JSON object")
    return values


def resolve_output_dir(configured: str = "") -> Path:
    """Configured directory, else the DYNMIX_OUTPUT_DIR environment variable, else ./dynmix_output."""
    return Path(configured or os.environ.get(OUTPUT_DIRECTORY_ENV) or DEFAULT_OUTPUT_DIRECTORY)


def print_splitter():
    print()
    print(f"{SPLITTER}")
    print()
