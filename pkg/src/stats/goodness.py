"""One-sample Kolmogorov-Smirnov statistic against an analytic CDF."""

from collections.abc import Callable

import numpy as np

from src.errors import DomainError


def ks_statistic(samples, cdf: Callable) -> float:
    """
    D = max_i max(|i/n - F(x_i)|, |(i-1)/n - F(x_i)|) over ascending samples.
    cdf must accept an array.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise DomainError("KS statistic needs at least one sample")
    if np.any(np.diff(x) < 0):
        raise DomainError("KS statistic needs samples sorted ascending")
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    upper = np.abs(i / n - f)
    lower = np.abs((i - 1) / n - f)
    return float(max(upper.max(), lower.max()))


def ks_critical(n: int, alpha_coeff: float = 1.36, safety: float = 1.5) -> float:
    """Asymptotic critical value (1.36 at alpha=0.05) times a safety factor."""
    return safety * alpha_coeff / np.sqrt(n)
