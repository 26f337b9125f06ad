"""Detrending transforms with invertible state.

Techniques: none, differencing, moving_average(p), subtract_mean, linear_model,
quadratic_model. detrend() returns the transformed series and a DetrendState
holding exactly what retrend() needs to rebuild the input.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.errors import CapabilityError, ConfigError, DataError, LengthError, NumericError, StateError

TECHNIQUES = ("none", "differencing", "moving_average", "subtract_mean", "linear_model", "quadratic_model")
DEFAULT_WINDOW = 24
FIT_DEGREE = {"linear_model": 1, "quadratic_model": 2}


@dataclass(frozen=True)
class DetrendTechnique:
    tag: str
    window: int | None = None

    def __post_init__(self):
        if self.tag not in TECHNIQUES:
            raise ConfigError(f"unknown detrend technique {self.tag!r}; expected one of {', '.join(TECHNIQUES)}")
        if self.tag == "moving_average":
            if self.window is None:
                object.__setattr__(self, "window", DEFAULT_WINDOW)
            if self.window < 2:
                raise ConfigError(f"moving_average window must be >= 2, got {self.window}")
        elif self.window is not None:
            object.__setattr__(self, "window", None)

    @classmethod
    def parse(cls, tag: str, window: int | None = None) -> "DetrendTechnique":
        return cls(tag.strip().lower(), window)

    @property
    def lag(self) -> int:
        """Index of the first input value represented in the output."""
        if self.tag == "differencing":
            return 1
        if self.tag == "moving_average":
            return self.window - 1
        return 0

    def __str__(self) -> str:
        return self.tag


NONE = DetrendTechnique("none")


@dataclass(frozen=True)
class DetrendState:
    """Tag-matched payload; unused fields stay at their defaults."""

    technique: str
    n: int
    anchor: float | None = None
    window: int | None = None
    head: tuple[float, ...] = ()
    means: np.ndarray | None = field(default=None, repr=False)
    mean: float | None = None
    coefficients: tuple[float, ...] = ()

    @property
    def lag(self) -> int:
        if self.technique == "differencing":
            return 1
        if self.technique == "moving_average":
            return self.window - 1
        return 0

    @property
    def output_length(self) -> int:
        return self.n - self.lag


def least_squares_fit(values, degree: int) -> tuple[float, ...]:
    """
    Polynomial coefficients (b0, b1[, b2]) on index i = 0..n-1 minimising the squared residuals.

    Solved with numpy.linalg.lstsq on the centred index s = (i - c) / c, c = (n - 1) / 2,
    then expanded back to the raw index basis.
    """
    y = np.asarray(values, dtype=float)
    if degree not in (1, 2):
        raise ConfigError(f"fit degree must be 1 or 2, got {degree}")
    n = y.size
    if n < degree + 1:
        raise LengthError(f"degree-{degree} fit needs at least {degree + 1} values, got {n}")
    c = (n - 1) / 2.0
    s = (np.arange(n, dtype=float) - c) / c
    basis = np.vander(s, degree + 1, increasing=True)
    gamma, _, rank, _ = np.linalg.lstsq(basis, y, rcond=None)
    if rank < degree + 1:
        raise NumericError(f"rank-deficient design in degree-{degree} fit")
    if not np.all(np.isfinite(gamma)):
        raise NumericError(f"non-finite coefficients in degree-{degree} fit")
    # sum_k g_k ((i - c) / c)^k expanded in powers of i
    if degree == 1:
        g0, g1 = gamma
        return float(g0 - g1), float(g1 / c)
    g0, g1, g2 = gamma
    return float(g0 - g1 + g2), float(g1 / c - 2.0 * g2 / c), float(g2 / (c * c))


def _poly(coefficients: tuple[float, ...], i: np.ndarray) -> np.ndarray:
    out = np.zeros_like(i, dtype=float)
    for k, b in enumerate(coefficients):
        out = out + b * i**k
    return out


def detrend(series, tech: DetrendTechnique) -> tuple[np.ndarray, DetrendState]:
    x = np.asarray(series, dtype=float)
    n = x.size
    min_len = max(2, tech.window or 0)
    if n < min_len:
        raise LengthError(f"{tech.tag} needs at least {min_len} values, got {n}")
    if not np.all(np.isfinite(x)):
        raise DataError(f"{tech.tag}: input contains non-finite values")

    if tech.tag == "none":
        return x.copy(), DetrendState("none", n)
    if tech.tag == "differencing":
        return np.diff(x), DetrendState("differencing", n, anchor=float(x[0]))
    if tech.tag == "moving_average":
        p = tech.window
        means = sliding_window_view(x, p).mean(axis=1)
        return x[p - 1 :] - means, DetrendState(
            "moving_average", n, window=p, head=tuple(float(v) for v in x[: p - 1]), means=means
        )
    if tech.tag == "subtract_mean":
        mean = float(x.mean())
        return x - mean, DetrendState("subtract_mean", n, mean=mean)
    coefficients = least_squares_fit(x, FIT_DEGREE[tech.tag])
    trend = _poly(coefficients, np.arange(n, dtype=float))
    return x - trend, DetrendState(tech.tag, n, coefficients=coefficients)


def retrend(detrended, state: DetrendState) -> np.ndarray:
    """Inverse of detrend: rebuilds the full length-n input series."""
    d = np.asarray(detrended, dtype=float)
    if d.size != state.output_length:
        raise StateError(
            f"{state.technique} state expects {state.output_length} detrended values, got {d.size}"
        )
    if state.technique == "none":
        return d.copy()
    if state.technique == "differencing":
        return np.concatenate(([state.anchor], state.anchor + np.cumsum(d)))
    if state.technique == "moving_average":
        return np.concatenate((np.asarray(state.head, dtype=float), d + state.means))
    return d + trend_at(state, np.arange(state.n, dtype=float))


def trend_at(state: DetrendState, i):
    """Trend value at index i (i >= n extrapolates). Only for mean and polynomial fits."""
    scalar = np.ndim(i) == 0
    idx = np.asarray(i, dtype=float)
    if state.technique == "subtract_mean":
        out = np.full_like(idx, state.mean, dtype=float)
    elif state.technique in FIT_DEGREE:
        out = _poly(state.coefficients, idx)
    else:
        raise CapabilityError(f"trend_at is not defined for {state.technique}")
    return float(out) if scalar else out


def restore_forecast(state: DetrendState, start: int, values, original) -> np.ndarray:
    """
    Map forecasts for detrended indices start..start+k-1 back to data units.

    original is the observed input series; differencing accumulates from the
    observed value just before the block.
    """
    v = np.asarray(values, dtype=float)
    first = start + state.lag
    if state.technique == "none":
        return v.copy()
    if state.technique == "differencing":
        return float(np.asarray(original)[first - 1]) + np.cumsum(v)
    if state.technique == "moving_average":
        if start + v.size > state.means.size:
            raise StateError(f"moving_average state has no window means past index {state.means.size - 1}")
        return v + state.means[start : start + v.size]
    return v + trend_at(state, np.arange(first, first + v.size, dtype=float))
