"""Forecast metrics and cohort averaging."""

import math

import numpy as np
import pytest

from src.errors import DomainError, ShapeError
from src.scoring.engine import Metrics, cohort_mean, compute_metrics


def test_metric_examples():
    m = compute_metrics([[1, 2]], [[1, 4]])
    assert (m.mse, m.mae) == (2.0, 1.0)
    assert m.rmse == pytest.approx(math.sqrt(2), abs=1e-12)

    assert compute_metrics([[0.3, 0.7]], [[0.3, 0.7]]).as_row() == (0.0, 0.0, 0.0)

    m = compute_metrics([[0, 0], [0, 0]], [[1, 1], [3, 3]])
    assert (m.mse, m.mae) == (5.0, 2.0)
    assert m.rmse == pytest.approx(math.sqrt(5), abs=1e-12)


def test_metrics_ignore_sample_order():
    gen = np.random.default_rng(4)
    preds = gen.normal(0, 1, (50, 2))
    targets = gen.normal(0, 1, (50, 2))
    base = compute_metrics(preds, targets)
    perm = gen.permutation(50)
    shuffled = compute_metrics(preds[perm], targets[perm])
    assert shuffled.mse == pytest.approx(base.mse, rel=1e-12)
    assert shuffled.mae == pytest.approx(base.mae, rel=1e-12)
    assert base.rmse**2 == pytest.approx(base.mse, rel=1e-12)


def test_metric_errors():
    with pytest.raises(DomainError):
        compute_metrics([], [])
    with pytest.raises(ShapeError):
        compute_metrics([[1, 2]], [[1, 2], [3, 4]])


def test_cohort_mean_is_unweighted():
    clients = [Metrics.from_mse_mae(1.0, 0.5), Metrics.from_mse_mae(4.0, 1.5)]
    cohort = cohort_mean(clients)
    assert cohort.mse == 2.5
    assert cohort.mae == 1.0
    assert cohort.rmse == pytest.approx(math.sqrt(2.5), abs=1e-12)
    with pytest.raises(DomainError):
        cohort_mean([])


def test_cohort_rmse_squares_to_cohort_mse():
    gen = np.random.default_rng(11)
    clients = [compute_metrics(gen.normal(0, s, (20, 2)), np.zeros((20, 2))) for s in (0.1, 0.5, 2.0)]
    cohort = cohort_mean(clients)
    assert cohort.mse >= 0.0
    assert cohort.rmse**2 == pytest.approx(cohort.mse, rel=1e-12)
