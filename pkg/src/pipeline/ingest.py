"""Real-world meter CSVs: load, resample to hourly means, forward-fill short gaps."""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from src.errors import ConfigError, DataError, QualityError, SchemaError
from src.pipeline.series import DistLabel, TimeSeries

log = logging.getLogger("d3fl.ingest")


@dataclass(frozen=True)
class IngestConfig:
    timestamp_column: str = "timestamp"
    value_column: str = "value"
    source_step: int = 900
    target_step: int = 3600
    max_missing_frac: float = 0.05

    def validate(self) -> "IngestConfig":
        if self.source_step <= 0 or self.target_step <= 0:
            raise ConfigError("ingest.source_step and ingest.target_step must be positive")
        if self.target_step % self.source_step:
            raise ConfigError(
                f"ingest.target_step ({self.target_step}) must be a multiple of ingest.source_step ({self.source_step})"
            )
        if not 0.0 <= self.max_missing_frac <= 1.0:
            raise ConfigError(f"ingest.max_missing_frac must lie in [0, 1], got {self.max_missing_frac}")
        return self


@dataclass(frozen=True)
class RawSeries:
    """Irregular readings as loaded: ascending epoch seconds and values."""

    timestamps: np.ndarray
    values: np.ndarray
    client_id: int = 0
    dist_label: DistLabel = "real"

    def __len__(self) -> int:
        return self.values.size


def _parse_timestamps(column: pd.Series) -> pd.Series:
    """Epoch seconds or ISO-8601 text -> epoch seconds (float); NaN where unparseable."""
    numeric = pd.to_numeric(column, errors="coerce")
    if numeric.notna().all():
        return numeric.astype(float)
    parsed = pd.to_datetime(column, errors="coerce", utc=True, format="ISO8601")
    seconds = pd.Series(np.nan, index=column.index)
    ok = parsed.notna()
    seconds[ok] = (parsed[ok] - pd.Timestamp(0, tz="UTC")).dt.total_seconds()
    return numeric.where(numeric.notna(), seconds)


def load_csv(path: Path, cfg: IngestConfig, client_id: int = 0, dist_label: DistLabel = "real") -> RawSeries:
    """Parse a headered CSV; rows are sorted ascending and duplicate timestamps rejected."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    frame = pd.read_csv(path, dtype=str, encoding="utf-8", keep_default_na=False)
    for col in (cfg.timestamp_column, cfg.value_column):
        if col not in frame.columns:
            raise SchemaError(f"{path}: missing column {col!r} (found {', '.join(frame.columns)})")

    ts = _parse_timestamps(frame[cfg.timestamp_column].str.strip())
    vals = pd.to_numeric(frame[cfg.value_column].str.strip(), errors="coerce")
    bad = ts.isna() | vals.isna() | ~np.isfinite(vals.fillna(0.0))
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        # header is line 1
        raise DataError(
            f"{path}: line {row + 2}: cannot parse "
            f"{frame[cfg.timestamp_column].iloc[row]!r}, {frame[cfg.value_column].iloc[row]!r}"
        )

    epochs = ts.to_numpy(dtype=float).astype(np.int64)
    order = np.argsort(epochs, kind="stable")
    epochs = epochs[order]
    values = vals.to_numpy(dtype=float)[order]
    dup = np.flatnonzero(np.diff(epochs) == 0)
    if dup.size:
        stamp = pd.Timestamp(int(epochs[dup[0]]), unit="s", tz="UTC").isoformat()
        raise DataError(f"{path}: duplicate timestamp {stamp}")
    log.debug("%s: loaded %d readings", path, values.size)
    return RawSeries(epochs, values, client_id, dist_label)


def resample_hourly(series: RawSeries, cfg: IngestConfig) -> TimeSeries:
    """Mean of the readings in each [t, t + target_step) bin; empty bins become NaN gaps."""
    cfg.validate()
    if len(series) == 0:
        raise DataError(f"client {series.client_id}: nothing to resample")
    index = pd.to_datetime(series.timestamps, unit="s", utc=True)
    frame = pd.Series(series.values, index=index)
    binned = frame.resample(pd.Timedelta(seconds=cfg.target_step), origin="epoch", closed="left", label="left").mean()
    start = int(binned.index[0].timestamp())
    return TimeSeries(
        start_epoch=start,
        step=cfg.target_step,
        values=binned.to_numpy(dtype=float),
        client_id=series.client_id,
        dist_label=series.dist_label,
    )


def gap_fraction(series: TimeSeries) -> float:
    return float(np.mean(np.isnan(series.values))) if len(series) else 0.0


def fill_gaps(series: TimeSeries, cfg: IngestConfig) -> TimeSeries:
    """Forward-fill gaps from the previous observed hour; leading gaps are dropped."""
    frac = gap_fraction(series)
    if frac > cfg.max_missing_frac:
        raise QualityError(
            f"client {series.client_id}: {frac:.2%} of hours missing exceeds the {cfg.max_missing_frac:.2%} limit"
        )
    values = pd.Series(series.values)
    observed = np.flatnonzero(values.notna().to_numpy())
    if observed.size == 0:
        raise QualityError(f"client {series.client_id}: no observed values")
    first = int(observed[0])
    filled = values.iloc[first:].ffill().to_numpy(dtype=float)
    if frac:
        log.info("client %d: forward-filled %.2f%% of hours", series.client_id, 100 * frac)
    return series.with_values(filled, start_epoch=series.timestamp_at(first))


def ingest_file(path: Path, cfg: IngestConfig, client_id: int = 0, dist_label: DistLabel = "real") -> TimeSeries:
    """load_csv -> resample_hourly -> fill_gaps."""
    raw = load_csv(path, cfg, client_id, dist_label)
    return fill_gaps(resample_hourly(raw, cfg), cfg)
