"""Scaling and supervised windowing: lookback inputs -> horizon targets."""

from dataclasses import dataclass, field

import numpy as np

from src.errors import LengthError

LOOKBACK = 24
HORIZON = 2
TRAIN_FRAC = 0.9


@dataclass(frozen=True)
class Scaler:
    """Min-max scaler; a degenerate scaler (max == min) maps everything to 0."""

    min: float
    max: float

    @property
    def degenerate(self) -> bool:
        return self.max == self.min

    def apply(self, values) -> np.ndarray:
        x = np.asarray(values, dtype=float)
        if self.degenerate:
            return np.zeros_like(x)
        return (x - self.min) / (self.max - self.min)

    def invert(self, scaled) -> np.ndarray:
        y = np.asarray(scaled, dtype=float)
        if self.degenerate:
            return np.full_like(y, self.min)
        return y * (self.max - self.min) + self.min


def fit_scaler(values) -> Scaler:
    x = np.asarray(values, dtype=float)
    return Scaler(float(x.min()), float(x.max()))


def min_max_scale(series) -> tuple[np.ndarray, Scaler]:
    x = np.asarray(series, dtype=float)
    if x.size < 2:
        raise LengthError(f"min-max scaling needs at least 2 values, got {x.size}")
    scaler = fit_scaler(x)
    return scaler.apply(x), scaler


def inverse_scale(scaled, scaler: Scaler) -> np.ndarray:
    return scaler.invert(scaled)


@dataclass(frozen=True)
class WindowedDataset:
    """
    inputs: N x L, targets: N x O, both in scaled units.
    first_index is the position (in the scaled series) of window 0's first input.
    """

    inputs: np.ndarray = field(repr=False)
    targets: np.ndarray = field(repr=False)
    scaler: Scaler
    first_index: int = 0

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def lookback(self) -> int:
        return self.inputs.shape[1]

    @property
    def horizon(self) -> int:
        return self.targets.shape[1]

    def subset(self, start: int, stop: int) -> "WindowedDataset":
        return WindowedDataset(
            self.inputs[start:stop], self.targets[start:stop], self.scaler, self.first_index + start
        )

    def target_index(self, k: int) -> int:
        """Series position of window k's first target."""
        return self.first_index + k + self.lookback


def make_windows(scaled, lookback: int = LOOKBACK, horizon: int = HORIZON, scaler: Scaler | None = None) -> WindowedDataset:
    """Overlapping stride-1 windows: inputs scaled[k:k+L], targets scaled[k+L:k+L+O]."""
    x = np.asarray(scaled, dtype=float)
    if x.size < lookback + horizon:
        raise LengthError(f"windowing needs at least {lookback + horizon} values, got {x.size}")
    n_windows = x.size - lookback - horizon + 1
    inputs = np.lib.stride_tricks.sliding_window_view(x[: n_windows + lookback - 1], lookback).copy()
    targets = np.lib.stride_tricks.sliding_window_view(x[lookback:], horizon).copy()
    return WindowedDataset(inputs, targets, scaler or Scaler(0.0, 1.0))


def split_point(n_windows: int, train_frac: float = TRAIN_FRAC) -> int:
    return int(np.floor(train_frac * n_windows))


def chrono_split(ds: WindowedDataset, train_frac: float = TRAIN_FRAC) -> tuple[WindowedDataset, WindowedDataset]:
    """First floor(train_frac * N) windows train, the rest validate. No shuffling."""
    n = len(ds)
    if n < 2:
        raise LengthError(f"chronological split needs at least 2 windows, got {n}")
    cut = split_point(n, train_frac)
    return ds.subset(0, cut), ds.subset(cut, n)


def concat_datasets(parts: list[WindowedDataset]) -> WindowedDataset:
    """Stack training sets of several clients (in the given order) into one."""
    return WindowedDataset(
        np.concatenate([p.inputs for p in parts]),
        np.concatenate([p.targets for p in parts]),
        Scaler(0.0, 1.0),
    )
