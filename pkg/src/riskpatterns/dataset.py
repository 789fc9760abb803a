"""Loading and canonical serialization of the county feature matrix.

A matrix is a CSV with one row per county: a 5-digit FIPS code, optional
name/state columns, numeric feature columns, and one target column. Missing
values are written as an empty string or "NA". A county stays in the matrix
with missing cells; it is only dropped from a computation that needs the
missing quantity.
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import re
import warnings
from dataclasses import dataclass, field
from datetime import date
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DatasetError

log = logging.getLogger(__name__)

_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_MISSING_TOKENS = {"", "NA"}


def parse_cell(text: str) -> float:
    """Parse one CSV cell: canonical decimal or scientific notation.

    Empty string and "NA" mean missing and come back as NaN. Anything else
    non-numeric raises DatasetError.
    """
    stripped = text.strip()
    if stripped in _MISSING_TOKENS:
        return float("nan")
    if not _NUMBER_RE.match(stripped):
        raise DatasetError(f"not a numeric value: {text!r}")
    return float(stripped)


def _normalize_fips(raw: str, row_number: int) -> str:
    code = raw.strip()
    if not code.isdigit() or len(code) > 5:
        raise DatasetError(f"row {row_number}: invalid FIPS code {raw!r}")
    return code.zfill(5)


@dataclass(frozen=True)
class FeatureSpec:
    feature_id: int
    name: str
    units: str
    kind: str  # "numeric" or "binary"


@dataclass(frozen=True)
class CountyKey:
    fips: str
    name: str
    state: str


@dataclass(frozen=True)
class SchemaConfig:
    """Maps CSV columns onto matrix roles."""

    target_column: str
    fips_column: str = "fips"
    name_column: str = "name"
    state_column: str = "state"
    exclude_columns: tuple[str, ...] = ()


@dataclass(frozen=True)
class DataMatrix:
    counties: tuple[CountyKey, ...]
    features: tuple[FeatureSpec, ...]
    values: np.ndarray  # (n_counties, n_features) float64, NaN marks missing
    target: np.ndarray  # (n_counties,) float64, NaN marks missing
    target_name: str

    def __post_init__(self):
        if self.values.shape != (len(self.counties), len(self.features)):
            raise DatasetError("value matrix shape does not match counties x features")
        if self.target.shape != (len(self.counties),):
            raise DatasetError("target length does not match county count")

    @property
    def n_counties(self) -> int:
        return len(self.counties)

    @property
    def n_features(self) -> int:
        return len(self.features)

    @cached_property
    def fips_index(self) -> dict[str, int]:
        return {c.fips: i for i, c in enumerate(self.counties)}

    @cached_property
    def feature_index(self) -> dict[str, int]:
        return {f.name: i for i, f in enumerate(self.features)}

    @cached_property
    def global_target_mean(self) -> float:
        valid = self.target[~np.isnan(self.target)]
        if valid.size == 0:
            raise DatasetError("target column has no observed values")
        return float(valid.mean())

    def constant_feature_ids(self) -> frozenset[int]:
        """Features with fewer than two distinct observed values."""
        out = set()
        for j in range(self.n_features):
            col = self.values[:, j]
            observed = np.unique(col[~np.isnan(col)])
            if observed.size < 2:
                out.add(j)
        return frozenset(out)


def load_matrix(path: str | Path, schema: SchemaConfig) -> DataMatrix:
    """Read a county/feature CSV into a DataMatrix.

    Feature columns are every header not claimed by the schema and not
    excluded. A column whose observed values are all 0/1 is tagged binary.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        rows = [row for row in reader if any(cell.strip() for cell in row)]

    def locate(column: str, required: bool) -> int | None:
        if column in header:
            return header.index(column)
        if required:
            raise DatasetError(f"{path}: required column {column!r} not found")
        return None

    fips_col = locate(schema.fips_column, required=True)
    target_col = locate(schema.target_column, required=True)
    name_col = locate(schema.name_column, required=False)
    state_col = locate(schema.state_column, required=False)
    reserved = {fips_col, target_col, name_col, state_col, None}
    excluded = set(schema.exclude_columns)
    feature_cols = [
        i for i, h in enumerate(header) if i not in reserved and h not in excluded
    ]

    seen_names: dict[str, int] = {}
    for i in feature_cols:
        if header[i] in seen_names:
            raise DatasetError(f"{path}: duplicate feature column {header[i]!r}")
        seen_names[header[i]] = i

    counties: list[CountyKey] = []
    values = np.full((len(rows), len(feature_cols)), np.nan)
    target = np.full(len(rows), np.nan)
    seen_fips: dict[str, int] = {}
    for r, row in enumerate(rows):
        row_number = r + 2  # 1-based, after the header
        if len(row) != len(header):
            raise DatasetError(
                f"{path}: row {row_number} has {len(row)} cells, expected {len(header)}"
            )
        fips = _normalize_fips(row[fips_col], row_number)
        if fips in seen_fips:
            raise DatasetError(
                f"{path}: duplicate FIPS {fips} at rows {seen_fips[fips]} and {row_number}"
            )
        seen_fips[fips] = row_number
        counties.append(
            CountyKey(
                fips=fips,
                name=row[name_col].strip() if name_col is not None else "",
                state=row[state_col].strip() if state_col is not None else "",
            )
        )
        try:
            target[r] = parse_cell(row[target_col])
            for j, i in enumerate(feature_cols):
                values[r, j] = parse_cell(row[i])
        except DatasetError as exc:
            raise DatasetError(f"{path}: row {row_number}: {exc}") from None

    if len(rows) == 0:
        raise DatasetError(f"{path}: no data rows")
    if np.isnan(target).all():
        raise DatasetError(f"{path}: target column {schema.target_column!r} is entirely missing")

    features = []
    for j, i in enumerate(feature_cols):
        col = values[:, j]
        observed = col[~np.isnan(col)]
        is_binary = observed.size > 0 and np.isin(observed, (0.0, 1.0)).all()
        features.append(
            FeatureSpec(
                feature_id=j,
                name=header[i],
                units="",
                kind="binary" if is_binary else "numeric",
            )
        )

    return DataMatrix(
        counties=tuple(counties),
        features=tuple(features),
        values=values,
        target=target,
        target_name=header[target_col],
    )


def _render_cell(value: float) -> str:
    return "" if np.isnan(value) else repr(float(value))


def _write_matrix_to(matrix: DataMatrix, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(
        ["fips", "name", "state"]
        + [f.name for f in matrix.features]
        + [matrix.target_name]
    )
    for i, county in enumerate(matrix.counties):
        writer.writerow(
            [county.fips, county.name, county.state]
            + [_render_cell(v) for v in matrix.values[i]]
            + [_render_cell(matrix.target[i])]
        )


def write_matrix(matrix: DataMatrix, path: str | Path) -> None:
    """Write the canonical CSV form (column order fixed, floats via repr)."""
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        _write_matrix_to(matrix, handle)


def fingerprint(matrix: DataMatrix) -> str:
    """SHA-256 of the canonical CSV serialization."""
    buffer = io.StringIO()
    _write_matrix_to(matrix, buffer)
    return hashlib.sha256(buffer.getvalue().encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class GlobalStats:
    """Per-feature ranges/means over all counties and per state."""

    feature_min: np.ndarray
    feature_max: np.ndarray
    feature_mean: np.ndarray
    state_ranges: dict[str, tuple[np.ndarray, np.ndarray]]
    global_target_mean: float


def global_stats(matrix: DataMatrix) -> GlobalStats:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # all-NaN slices -> NaN
        fmin = np.nanmin(matrix.values, axis=0)
        fmax = np.nanmax(matrix.values, axis=0)
        fmean = np.nanmean(matrix.values, axis=0)
        state_ranges: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        for state in sorted({c.state for c in matrix.counties}):
            mask = np.array([c.state == state for c in matrix.counties])
            block = matrix.values[mask]
            state_ranges[state] = (
                np.nanmin(block, axis=0),
                np.nanmax(block, axis=0),
            )
    return GlobalStats(
        feature_min=fmin,
        feature_max=fmax,
        feature_mean=fmean,
        state_ranges=state_ranges,
        global_target_mean=matrix.global_target_mean,
    )


@dataclass(frozen=True)
class TargetTimeSeries:
    """Cumulative per-county target values on a shared date axis."""

    dates: tuple[date, ...]
    series: dict[str, np.ndarray] = field(repr=False)
    clamp_counts: dict[str, int] = field(default_factory=dict, repr=False)
    unknown_fips: frozenset[str] = frozenset()

    def national_average(self) -> np.ndarray:
        """Mean curve over every county in the series."""
        if not self.series:
            raise DatasetError("time series has no counties")
        return np.mean(list(self.series.values()), axis=0)


def load_timeseries(
    path: str | Path, known_fips: frozenset[str] | None = None
) -> TargetTimeSeries:
    """Read a wide CSV: fips column plus one ISO-date column per snapshot.

    Values are cumulative, so each county's row is clamped to a running
    maximum (a dip means a reporting correction, not a decrease); clamped
    counties are counted in clamp_counts. An empty cell means no new report
    and carries the running maximum forward (0 before the first report).
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        rows = [row for row in reader if any(cell.strip() for cell in row)]

    if "fips" not in header:
        raise DatasetError(f"{path}: required column 'fips' not found")
    fips_col = header.index("fips")
    date_cols: list[tuple[date, int]] = []
    for i, h in enumerate(header):
        if i == fips_col:
            continue
        try:
            date_cols.append((date.fromisoformat(h), i))
        except ValueError:
            raise DatasetError(f"{path}: unparseable date header {h!r}") from None
    if not date_cols:
        raise DatasetError(f"{path}: no date columns")
    date_cols.sort(key=lambda pair: pair[0])
    dates = tuple(d for d, _ in date_cols)
    if len(set(dates)) != len(dates):
        raise DatasetError(f"{path}: duplicate date columns")

    series: dict[str, np.ndarray] = {}
    clamp_counts: dict[str, int] = {}
    unknown: set[str] = set()
    for r, row in enumerate(rows):
        row_number = r + 2
        if len(row) != len(header):
            raise DatasetError(
                f"{path}: row {row_number} has {len(row)} cells, expected {len(header)}"
            )
        fips = _normalize_fips(row[fips_col], row_number)
        if fips in series:
            raise DatasetError(f"{path}: duplicate FIPS {fips}")
        if known_fips is not None and fips not in known_fips:
            unknown.add(fips)
        curve = np.empty(len(date_cols))
        running = 0.0
        clamps = 0
        for k, (_, i) in enumerate(date_cols):
            try:
                value = parse_cell(row[i])
            except DatasetError as exc:
                raise DatasetError(f"{path}: row {row_number}: {exc}") from None
            if not np.isnan(value):
                if value < running:
                    clamps += 1
                else:
                    running = value
            curve[k] = running
        series[fips] = curve
        if clamps:
            clamp_counts[fips] = clamps

    if unknown:
        log.warning(
            "time series mentions %d counties absent from the matrix", len(unknown)
        )
    return TargetTimeSeries(
        dates=dates,
        series=series,
        clamp_counts=clamp_counts,
        unknown_fips=frozenset(unknown),
    )


def write_timeseries(ts: TargetTimeSeries, path: str | Path) -> None:
    """Write the wide CSV form load_timeseries reads (floats via repr)."""
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["fips"] + [d.isoformat() for d in ts.dates])
        for fips in sorted(ts.series):
            writer.writerow([fips] + [repr(float(v)) for v in ts.series[fips]])


def read_kv_config(path: str | Path) -> dict[str, str]:
    """Parse a `key = value` config file; '#' starts a comment line."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise DatasetError(f"{path}: line {lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        out[key.strip()] = value.strip()
    return out
