"""Data pipeline: synth/ingest -> detrend -> scale -> window -> split."""

from src.pipeline.detrend import DetrendState, DetrendTechnique, detrend, retrend, trend_at
from src.pipeline.series import TimeSeries
from src.pipeline.synth import SynthConfig, generate_client_series, generate_cohort, location
from src.pipeline.windows import WindowedDataset, chrono_split, make_windows, min_max_scale

__all__ = [
    "DetrendState",
    "DetrendTechnique",
    "SynthConfig",
    "TimeSeries",
    "WindowedDataset",
    "chrono_split",
    "detrend",
    "generate_client_series",
    "generate_cohort",
    "location",
    "make_windows",
    "min_max_scale",
    "retrend",
    "trend_at",
]
