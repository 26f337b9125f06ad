"""Detrending transforms, their inverses and trend extrapolation."""

import numpy as np
import pytest

from src.errors import CapabilityError, ConfigError, DataError, LengthError, StateError
from src.pipeline.detrend import (
    DetrendState,
    DetrendTechnique,
    detrend,
    least_squares_fit,
    restore_forecast,
    retrend,
    trend_at,
)

ROUND_TRIP = [
    DetrendTechnique("none"),
    DetrendTechnique("differencing"),
    DetrendTechnique("moving_average", 24),
    DetrendTechnique("subtract_mean"),
    DetrendTechnique("linear_model"),
    DetrendTechnique("quadratic_model"),
]


def test_hand_examples():
    out, state = detrend([1, 3, 6], DetrendTechnique("differencing"))
    assert out.tolist() == [2, 3]
    assert state.anchor == 1

    out, _ = detrend([2, 4, 6], DetrendTechnique("moving_average", 2))
    assert out.tolist() == [1, 1]

    out, state = detrend([1, 2, 3], DetrendTechnique("subtract_mean"))
    assert out.tolist() == [-1, 0, 1]
    assert state.mean == 2


def test_linear_fit_of_exact_line_leaves_zeros():
    x = 3 + 2 * np.arange(50.0)
    out, state = detrend(x, DetrendTechnique("linear_model"))
    assert np.max(np.abs(out)) < 1e-9
    assert state.coefficients == pytest.approx((3.0, 2.0), abs=1e-9)


def test_quadratic_fit_of_exact_square_leaves_zeros():
    x = np.arange(1000.0) ** 2
    out, state = detrend(x, DetrendTechnique("quadratic_model"))
    assert np.max(np.abs(out)) < 1e-9 * np.max(x)
    assert state.coefficients == pytest.approx((0.0, 0.0, 1.0), abs=1e-4)
    small, _ = detrend(np.arange(20.0) ** 2, DetrendTechnique("quadratic_model"))
    assert np.max(np.abs(small)) < 1e-9


@pytest.mark.parametrize("tech", ROUND_TRIP, ids=str)
def test_round_trip_on_random_series(tech):
    gen = np.random.default_rng(1234)
    for _ in range(100):
        x = gen.normal(50.0, 3.0, 1000) + np.linspace(0, 5, 1000)
        out, state = detrend(x, tech)
        np.testing.assert_allclose(retrend(out, state), x, rtol=1e-9, atol=0)


def test_output_lengths():
    x = np.linspace(0, 1, 100)
    assert detrend(x, DetrendTechnique("differencing"))[0].size == 99
    assert detrend(x, DetrendTechnique("moving_average", 10))[0].size == 91
    for tag in ("none", "subtract_mean", "linear_model", "quadratic_model"):
        assert detrend(x, DetrendTechnique(tag))[0].size == 100


def test_none_is_identity_and_mean_removal_centres():
    x = np.random.default_rng(0).normal(5, 2, 300)
    out, _ = detrend(x, DetrendTechnique("none"))
    assert np.array_equal(out, x)
    centred, _ = detrend(x, DetrendTechnique("subtract_mean"))
    assert abs(centred.mean()) < 1e-12 * np.abs(x).max()


@pytest.mark.parametrize("degree", [1, 2])
def test_fit_residuals_are_orthogonal_to_basis(degree):
    x = np.random.default_rng(degree).normal(0, 1, 500) + 0.01 * np.arange(500)
    coefficients = least_squares_fit(x, degree)
    i = np.arange(500.0)
    r = x - sum(b * i**k for k, b in enumerate(coefficients))
    for k in range(degree + 1):
        assert abs(np.sum(i**k * r)) <= 1e-6 * np.sum(np.abs(i**k * x))


def test_least_squares_examples():
    assert least_squares_fit([5, 5, 5], 1) == pytest.approx((5.0, 0.0), abs=1e-12)
    assert least_squares_fit([0, 1, 2, 3], 1) == pytest.approx((0.0, 1.0), abs=1e-12)
    y = np.array([1, 2, 4, 8, 15], dtype=float)
    basis = np.vander(np.arange(5.0), 3, increasing=True)
    oracle = np.linalg.pinv(basis) @ y
    assert least_squares_fit(y, 2) == pytest.approx(tuple(oracle), abs=1e-8)


def test_retrend_examples():
    state = DetrendState("differencing", 3, anchor=1.0)
    assert retrend([2, 3], state).tolist() == [1, 3, 6]
    quad = DetrendState("quadratic_model", 5, coefficients=(0.0, 0.0, 1.0))
    assert retrend(np.zeros(5), quad).tolist() == [0, 1, 4, 9, 16]


def test_trend_at_extrapolates():
    assert trend_at(DetrendState("subtract_mean", 10, mean=2.0), 10**6) == 2.0
    assert trend_at(DetrendState("linear_model", 10, coefficients=(3.0, 2.0)), 10) == 23.0
    assert trend_at(DetrendState("quadratic_model", 10, coefficients=(0.0, 0.0, 1.0)), 7) == 49.0


def test_trend_at_rejects_windowed_techniques():
    _, state = detrend(np.arange(10.0), DetrendTechnique("differencing"))
    with pytest.raises(CapabilityError):
        trend_at(state, 3)


def test_errors():
    with pytest.raises(LengthError):
        detrend([1.0], DetrendTechnique("differencing"))
    with pytest.raises(LengthError):
        detrend(np.arange(5.0), DetrendTechnique("moving_average", 10))
    with pytest.raises(DataError):
        detrend([1.0, float("nan"), 3.0], DetrendTechnique("linear_model"))
    _, state = detrend(np.arange(10.0), DetrendTechnique("linear_model"))
    with pytest.raises(StateError):
        retrend(np.zeros(9), state)
    with pytest.raises(ConfigError):
        DetrendTechnique("moving_average", 1)
    with pytest.raises(ConfigError):
        DetrendTechnique("seasonal")
    with pytest.raises(ConfigError):
        least_squares_fit([1.0, 2.0, 3.0, 4.0], 3)


def test_restore_forecast_recovers_true_values():
    x = 100.0 + np.cumsum(np.random.default_rng(9).normal(0, 1, 200)) + np.arange(200) * 0.1
    for tech in ROUND_TRIP:
        out, state = detrend(x, tech)
        start = 150
        restored = restore_forecast(state, start, out[start : start + 2], x)
        first = start + state.lag
        np.testing.assert_allclose(restored, x[first : first + 2], rtol=1e-9)
