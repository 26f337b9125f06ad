"""Deterministic scoring of forecasts: MSE, RMSE, MAE and cohort averages."""

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from src.errors import DomainError, ShapeError


@dataclass(frozen=True)
class Metrics:
    mse: float
    rmse: float
    mae: float

    @classmethod
    def from_mse_mae(cls, mse: float, mae: float) -> "Metrics":
        return cls(mse=mse, rmse=math.sqrt(mse), mae=mae)

    def as_row(self) -> tuple[float, float, float]:
        return self.mse, self.rmse, self.mae


def compute_metrics(preds, targets) -> Metrics:
    """
    MSE and MAE over every element of every horizon vector; RMSE = sqrt(MSE).
    preds and targets are sequences of equal-length vectors.
    """
    p = np.asarray(preds, dtype=float)
    y = np.asarray(targets, dtype=float)
    if p.size == 0 or y.size == 0:
        raise DomainError("metrics need at least one prediction")
    if p.shape != y.shape:
        raise ShapeError(f"predictions {p.shape} and targets {y.shape} differ in shape")
    err = p - y
    return Metrics.from_mse_mae(float(np.mean(err * err)), float(np.mean(np.abs(err))))


@dataclass(frozen=True)
class CohortMetrics:
    """Unweighted client means of mse and mae; rmse is sqrt of the cohort mse."""

    mse: float
    rmse: float
    mae: float

    @classmethod
    def from_mse_mae(cls, mse: float, mae: float) -> "CohortMetrics":
        return cls(mse=mse, rmse=math.sqrt(mse), mae=mae)

    def as_row(self) -> tuple[float, float, float]:
        return self.mse, self.rmse, self.mae


def cohort_mean(per_client: Iterable[Metrics]) -> CohortMetrics:
    """Mean over clients of mse and mae."""
    items = list(per_client)
    if not items:
        raise DomainError("cohort mean needs at least one client")
    n = len(items)
    return CohortMetrics.from_mse_mae(
        math.fsum(m.mse for m in items) / n,
        math.fsum(m.mae for m in items) / n,
    )
