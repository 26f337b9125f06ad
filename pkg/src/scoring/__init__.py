"""Metrics, the experiment matrix and the suite runner."""

from src.scoring.engine import CohortMetrics, Metrics, cohort_mean, compute_metrics

__all__ = ["CohortMetrics", "Metrics", "cohort_mean", "compute_metrics"]
