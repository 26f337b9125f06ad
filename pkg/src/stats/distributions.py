"""Densities, CDFs, quantiles and inverse-transform samplers for GEV and log-normal.

All functions accept a scalar or an array for x/u and return the same kind.
GEV uses the shape convention where xi > 0 is the heavy (Frechet) tail;
note scipy.stats.genextreme uses c = -xi.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import ndtr

from src.errors import DomainError, EmptyRequestError, ParameterError
from src.stats.rng import RngStream

# |xi| below this uses the Gumbel limit of the GEV formulas
XI_EPS = 1e-12

Kind = Literal["gev", "lognorm"]


@dataclass(frozen=True)
class GevParams:
    mu: float
    sigma: float
    xi: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.mu, self.sigma, self.xi)):
            raise ParameterError(f"GEV parameters must be finite: {self}")
        if self.sigma <= 0:
            raise ParameterError(f"GEV scale must be positive, got sigma={self.sigma}")


@dataclass(frozen=True)
class LogNormParams:
    mu: float
    sigma: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.mu, self.sigma)):
            raise ParameterError(f"log-normal parameters must be finite: {self}")
        if self.sigma <= 0:
            raise ParameterError(f"log-normal sigma must be positive, got sigma={self.sigma}")


def _out(value: np.ndarray, scalar: bool):
    return float(value) if scalar else value


def _check_unit(u: np.ndarray) -> None:
    if np.any(~(u > 0.0) | ~(u < 1.0)):
        bad = u[~(u > 0.0) | ~(u < 1.0)].ravel()[0]
        raise DomainError(f"probability must lie in the open interval (0, 1), got {bad}")


def gev_pdf(x, p: GevParams):
    scalar = np.ndim(x) == 0
    z = (np.asarray(x, dtype=float) - p.mu) / p.sigma
    if abs(p.xi) < XI_EPS:
        return _out(np.exp(-(z + np.exp(-z))) / p.sigma, scalar)
    t = 1.0 + p.xi * z
    inside = t > 0
    ts = np.where(inside, t, 1.0)
    dens = ts ** (-1.0 / p.xi - 1.0) * np.exp(-(ts ** (-1.0 / p.xi))) / p.sigma
    return _out(np.where(inside, dens, 0.0), scalar)


def gev_cdf(x, p: GevParams):
    scalar = np.ndim(x) == 0
    z = (np.asarray(x, dtype=float) - p.mu) / p.sigma
    if abs(p.xi) < XI_EPS:
        return _out(np.exp(-np.exp(-z)), scalar)
    t = 1.0 + p.xi * z
    inside = t > 0
    ts = np.where(inside, t, 1.0)
    cdf = np.exp(-(ts ** (-1.0 / p.xi)))
    # below the lower bound when xi > 0, above the upper bound when xi < 0
    outside = 0.0 if p.xi > 0 else 1.0
    return _out(np.where(inside, cdf, outside), scalar)


def gev_quantile(u, p: GevParams):
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    _check_unit(u)
    y = -np.log(u)
    if abs(p.xi) < XI_EPS:
        return _out(p.mu - p.sigma * np.log(y), scalar)
    return _out(p.mu + p.sigma * np.expm1(-p.xi * np.log(y)) / p.xi, scalar)


def gev_median(p: GevParams) -> float:
    return gev_quantile(0.5, p)


def lognorm_pdf(x, p: LogNormParams):
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    inside = x > 0
    xs = np.where(inside, x, 1.0)
    z = (np.log(xs) - p.mu) / p.sigma
    dens = np.exp(-0.5 * z * z) / (xs * p.sigma * math.sqrt(2.0 * math.pi))
    return _out(np.where(inside, dens, 0.0), scalar)


def lognorm_cdf(x, p: LogNormParams):
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    inside = x > 0
    xs = np.where(inside, x, 1.0)
    return _out(np.where(inside, ndtr((np.log(xs) - p.mu) / p.sigma), 0.0), scalar)


# Rational approximation of the standard normal quantile (P. J. Acklam),
# relative error below 1.15e-9 before refinement.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _acklam(u: np.ndarray) -> np.ndarray:
    x = np.empty_like(u)
    lo = u < _P_LOW
    hi = u > 1.0 - _P_LOW
    mid = ~(lo | hi)

    q = np.sqrt(-2.0 * np.log(u[lo]))
    x[lo] = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
        ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)

    q = np.sqrt(-2.0 * np.log1p(-u[hi]))
    x[hi] = -(((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
        ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)

    q = u[mid] - 0.5
    r = q * q
    x[mid] = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / \
        (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
    return x


def normal_quantile(u):
    """Standard normal quantile: rational approximation plus one Newton step on ndtr."""
    scalar = np.ndim(u) == 0
    u = np.atleast_1d(np.asarray(u, dtype=float))
    _check_unit(u)
    x = _acklam(u)
    x = x - (ndtr(x) - u) * math.sqrt(2.0 * math.pi) * np.exp(0.5 * x * x)
    return _out(x[0] if scalar else x, scalar)


def lognorm_quantile(u, p: LogNormParams):
    scalar = np.ndim(u) == 0
    z = normal_quantile(u)
    return _out(np.exp(p.mu + p.sigma * np.asarray(z)), scalar)


def lognorm_median(p: LogNormParams) -> float:
    return math.exp(p.mu)


def quantile(kind: Kind, u, params):
    if kind == "gev":
        return gev_quantile(u, params)
    if kind == "lognorm":
        return lognorm_quantile(u, params)
    raise ParameterError(f"unknown distribution kind {kind!r}")


def cdf(kind: Kind, x, params):
    if kind == "gev":
        return gev_cdf(x, params)
    if kind == "lognorm":
        return lognorm_cdf(x, params)
    raise ParameterError(f"unknown distribution kind {kind!r}")


def median(kind: Kind, params) -> float:
    return gev_median(params) if kind == "gev" else lognorm_median(params)


def sample(kind: Kind, params, n: int, rng: RngStream) -> np.ndarray:
    """Inverse-transform sampling of n draws. Deterministic for a given stream."""
    if n < 1:
        raise EmptyRequestError(f"sample count must be at least 1, got {n}")
    return np.asarray(quantile(kind, rng.unit(n), params), dtype=float)
