"""TimeSeries: a uniformly spaced univariate series with client identity."""

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from src.errors import DataError

DistLabel = Literal["gev", "lognorm", "real"]
DIST_LABELS = ("gev", "lognorm", "real")


@dataclass(frozen=True)
class TimeSeries:
    """
    Uniformly spaced series. NaN marks a gap (only between resampling and gap
    filling); infinities are never allowed.
    """

    start_epoch: int
    step: int
    values: np.ndarray = field(repr=False)
    client_id: int = 0
    dist_label: DistLabel = "real"

    def __post_init__(self):
        if self.step <= 0:
            raise DataError(f"series step must be positive, got {self.step}")
        if self.dist_label not in DIST_LABELS:
            raise DataError(f"unknown distribution label {self.dist_label!r}")
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise DataError("series values must be one-dimensional")
        if np.any(np.isinf(values)):
            raise DataError(f"client {self.client_id}: series contains infinite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def timestamps(self) -> np.ndarray:
        return self.start_epoch + self.step * np.arange(self.values.size, dtype=np.int64)

    def timestamp_at(self, index: int) -> int:
        return self.start_epoch + self.step * index

    @property
    def is_complete(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def require_complete(self) -> "TimeSeries":
        if not self.is_complete:
            raise DataError(f"client {self.client_id}: series has gaps; fill them first")
        return self

    def with_values(self, values: np.ndarray, start_epoch: int | None = None) -> "TimeSeries":
        return TimeSeries(
            start_epoch=self.start_epoch if start_epoch is None else start_epoch,
            step=self.step,
            values=values,
            client_id=self.client_id,
            dist_label=self.dist_label,
        )
