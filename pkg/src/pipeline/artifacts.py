"""On-disk artifacts: series CSVs, detrend state sidecars, model checkpoints, round and forecast CSVs.

Series CSV: header `timestamp,value`, ISO-8601 UTC timestamps, 9 significant digits.
Detrend sidecar: `key = value` lines; floats as shortest round-trip decimal text,
vectors as comma-separated lists. Keys: technique, n, anchor, window, head,
means, mean, coefficients (only those the technique uses).
Checkpoint: b"D3FL1\\n", then b"<H> <I> <O>\\n" as decimal text, then the flat
parameter vector as little-endian float64.
"""

import csv
import re
from pathlib import Path

import numpy as np

from src.errors import DataError, SchemaError, StateError
from src.model.lstm import ModelParams, param_count
from src.pipeline.detrend import DetrendState
from src.pipeline.ingest import IngestConfig, load_csv
from src.pipeline.series import DIST_LABELS, TimeSeries
from src.utils import epoch_to_iso, fmt9

CHECKPOINT_MAGIC = b"D3FL1"
SERIES_PATTERN = re.compile(r"^client_(\d+)_([a-z]+)\.csv$")
ROUNDS_HEADERS = ["round", "client_id", "mse", "rmse", "mae"]
FORECAST_HEADERS = ["timestamp", "actual", "predicted"]


def series_filename(series: TimeSeries) -> str:
    return f"client_{series.client_id}_{series.dist_label}.csv"


def write_series_csv(path: Path, series: TimeSeries) -> Path:
    return write_values_csv(path, series.timestamps, series.values)


def write_values_csv(path: Path, timestamps, values) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["timestamp", "value"])
        for ts, v in zip(timestamps, values):
            writer.writerow([epoch_to_iso(int(ts)), fmt9(v)])
    return path


def read_series_csv(path: Path, client_id: int = 0, dist_label: str = "real") -> TimeSeries:
    """Read a uniformly spaced `timestamp,value` CSV back into a TimeSeries."""
    raw = load_csv(path, IngestConfig(), client_id, dist_label)
    if len(raw) < 2:
        raise DataError(f"{path}: need at least 2 rows to infer spacing")
    steps = np.diff(raw.timestamps)
    if np.any(steps != steps[0]):
        raise DataError(f"{path}: timestamps are not uniformly spaced; run `d3fl ingest` first")
    return TimeSeries(int(raw.timestamps[0]), int(steps[0]), raw.values, client_id, dist_label)


def load_cohort_dir(directory: Path) -> list[TimeSeries]:
    """All client_<k>_<label>.csv files of a directory, ordered by client id."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"data directory not found: {directory}")
    cohort = []
    for path in sorted(directory.iterdir()):
        m = SERIES_PATTERN.match(path.name)
        if not m:
            continue
        label = m.group(2)
        if label not in DIST_LABELS:
            raise SchemaError(f"{path.name}: unknown distribution label {label!r}")
        cohort.append(read_series_csv(path, int(m.group(1)), label))
    if not cohort:
        raise SchemaError(f"{directory}: no client_<k>_<label>.csv files")
    return sorted(cohort, key=lambda s: s.client_id)


def _floats(values) -> str:
    return ",".join(repr(float(v)) for v in values)


def write_state_sidecar(path: Path, state: DetrendState) -> Path:
    lines = [f"technique = {state.technique}", f"n = {state.n}"]
    if state.anchor is not None:
        lines.append(f"anchor = {state.anchor!r}")
    if state.window is not None:
        lines.append(f"window = {state.window}")
        lines.append(f"head = {_floats(state.head)}")
        lines.append(f"means = {_floats(state.means)}")
    if state.mean is not None:
        lines.append(f"mean = {state.mean!r}")
    if state.coefficients:
        lines.append(f"coefficients = {_floats(state.coefficients)}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_state_sidecar(path: Path) -> DetrendState:
    fields = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise StateError(f"{path}: line {lineno}: expected `key = value`")
        fields[key.strip()] = value.strip()
    try:
        def vec(name):
            text = fields.get(name, "")
            return tuple(float(v) for v in text.split(",")) if text else ()

        return DetrendState(
            technique=fields["technique"],
            n=int(fields["n"]),
            anchor=float(fields["anchor"]) if "anchor" in fields else None,
            window=int(fields["window"]) if "window" in fields else None,
            head=vec("head"),
            means=np.array(vec("means")) if "means" in fields else None,
            mean=float(fields["mean"]) if "mean" in fields else None,
            coefficients=vec("coefficients"),
        )
    except (KeyError, ValueError) as e:
        raise StateError(f"{path}: malformed detrend state ({e})") from e


def save_checkpoint(path: Path, params: ModelParams) -> Path:
    h, i, o = params.dims
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(CHECKPOINT_MAGIC + b"\n")
        f.write(f"{h} {i} {o}\n".encode("ascii"))
        f.write(params.flatten().astype("<f8").tobytes())
    return path


def load_checkpoint(path: Path) -> ModelParams:
    data = Path(path).read_bytes()
    magic, _, rest = data.partition(b"\n")
    if magic != CHECKPOINT_MAGIC:
        raise SchemaError(f"{path}: not a model checkpoint (bad magic {magic[:8]!r})")
    dims_line, _, payload = rest.partition(b"\n")
    try:
        h, i, o = (int(v) for v in dims_line.decode("ascii").split())
    except ValueError as e:
        raise SchemaError(f"{path}: malformed dimension line {dims_line[:32]!r}") from e
    expected = param_count(h, i, o)
    if len(payload) != 8 * expected:
        raise SchemaError(f"{path}: payload holds {len(payload) // 8} values, H={h} I={i} O={o} needs {expected}")
    return ModelParams.unflatten(np.frombuffer(payload, dtype="<f8").astype(float), h, i, o)


def write_rounds_csv(path: Path, reports) -> Path:
    """One row per (round, client) plus a `cohort` pseudo-client row per round."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(ROUNDS_HEADERS)
        for report in reports:
            for cid in sorted(report.per_client):
                writer.writerow([report.round_index, cid, *(fmt9(v) for v in report.per_client[cid].as_row())])
            writer.writerow([report.round_index, "cohort", *(fmt9(v) for v in report.cohort.as_row())])
    return path


def write_forecast_csv(path: Path, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(FORECAST_HEADERS)
        for ts, actual, predicted in rows:
            writer.writerow([epoch_to_iso(ts), fmt9(actual), fmt9(predicted)])
    return path
