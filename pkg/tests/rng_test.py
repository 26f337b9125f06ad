"""Named random streams and the KS statistic."""

import numpy as np
import pytest

from src.errors import ConfigError, DomainError
from src.stats.goodness import ks_statistic
from src.stats.rng import RngStream


def test_same_seed_and_label_repeat_exactly():
    a = RngStream(42, "client-3-data")
    b = RngStream(42, "client-3-data")
    assert np.array_equal(a.unit(500), b.unit(500))
    assert np.array_equal(a.permutation(50), b.permutation(50))


def test_distinct_labels_and_seeds_diverge():
    base = RngStream(42, "client-3-data").unit(100)
    assert not np.array_equal(base, RngStream(42, "client-4-data").unit(100))
    assert not np.array_equal(base, RngStream(43, "client-3-data").unit(100))


def test_child_does_not_consume_parent():
    parent = RngStream(1, "train-1")
    fresh = RngStream(1, "train-1")
    child = parent.child("round-17")
    assert child.label == "train-1/round-17"
    assert np.array_equal(parent.unit(10), fresh.unit(10))


def test_unit_draws_stay_inside_open_interval():
    u = RngStream(0, "unit").unit(100000)
    assert u.min() > 0.0
    assert u.max() < 1.0


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_seed_must_fit_64_bits(seed):
    with pytest.raises(ConfigError):
        RngStream(seed, "x")


def test_ks_exact_quantile_grid_gives_half_over_n():
    n = 200
    u = (np.arange(1, n + 1) - 0.5) / n
    # uniform cdf: samples at the midpoint quantiles
    d = ks_statistic(u, lambda x: np.clip(x, 0, 1))
    assert d == pytest.approx(0.5 / n, abs=1e-15)


def test_ks_single_sample_at_median():
    assert ks_statistic([0.5], lambda x: np.asarray(x)) == pytest.approx(0.5)


def test_ks_rejects_empty_and_unsorted():
    with pytest.raises(DomainError):
        ks_statistic([], lambda x: x)
    with pytest.raises(DomainError):
        ks_statistic([0.3, 0.1], lambda x: x)
