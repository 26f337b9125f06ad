"""Distribution math, seeded streams and goodness-of-fit."""

from src.stats.distributions import (
    GevParams,
    LogNormParams,
    gev_cdf,
    gev_pdf,
    gev_quantile,
    lognorm_cdf,
    lognorm_pdf,
    lognorm_quantile,
    normal_quantile,
    sample,
)
from src.stats.goodness import ks_statistic
from src.stats.rng import RngStream

__all__ = [
    "GevParams",
    "LogNormParams",
    "RngStream",
    "gev_cdf",
    "gev_pdf",
    "gev_quantile",
    "ks_statistic",
    "lognorm_cdf",
    "lognorm_pdf",
    "lognorm_quantile",
    "normal_quantile",
    "sample",
]
