"""Densities, CDFs, quantiles and samplers against closed forms and scipy oracles."""

import math

import numpy as np
import pytest
from scipy import integrate, stats
from scipy.special import ndtri

from src.errors import DomainError, EmptyRequestError, ParameterError
from src.stats.distributions import (
    GevParams,
    LogNormParams,
    gev_cdf,
    gev_median,
    gev_pdf,
    gev_quantile,
    lognorm_cdf,
    lognorm_pdf,
    lognorm_quantile,
    normal_quantile,
    sample,
)
from src.stats.goodness import ks_critical, ks_statistic
from src.stats.rng import RngStream

GEV_GRID = [GevParams(0.0, 1.0, 0.0), GevParams(0.0, 1.0, 0.5), GevParams(8.0, 1.0, 0.1), GevParams(-2.0, 0.5, -0.3)]
LOGNORM_GRID = [LogNormParams(0.0, 1.0), LogNormParams(0.0, 0.25), LogNormParams(2.0, 0.3)]
# quantiles handed to quad as breakpoints so it cannot step over the peak
BREAK_PROBS = [1e-6, 1e-3, 0.1, 0.5, 0.9, 0.999, 0.999999]


def test_gev_pdf_closed_form_values():
    assert gev_pdf(0.0, GevParams(0, 1, 0)) == pytest.approx(math.exp(-1), abs=1e-12)
    assert gev_pdf(0.0, GevParams(0, 1, 0.5)) == pytest.approx(math.exp(-1), abs=1e-12)
    assert gev_pdf(-3.0, GevParams(0, 1, 0.5)) == 0.0


def test_gev_cdf_closed_form_values():
    assert gev_cdf(3.0, GevParams(3.0, 2.0, 0.0)) == pytest.approx(math.exp(-1), abs=1e-12)
    assert gev_cdf(1e6, GevParams(0, 1, 0)) == 1.0
    assert gev_cdf(1.0, GevParams(0, 1, 0.5)) == pytest.approx(math.exp(-(1.5**-2)), abs=1e-12)
    assert gev_cdf(1.0, GevParams(0, 1, 0.5)) == pytest.approx(0.64118, abs=1e-5)


def test_gev_cdf_matches_integrated_pdf():
    p = GevParams(0, 1, 0.5)
    area, _ = integrate.quad(lambda x: gev_pdf(x, p), -2.0, 1.0)
    assert area == pytest.approx(gev_cdf(1.0, p), abs=1e-8)


def test_gev_outside_support_clamps_by_sign_of_xi():
    assert gev_cdf(-5.0, GevParams(0, 1, 0.5)) == 0.0
    assert gev_cdf(5.0, GevParams(0, 1, -0.5)) == 1.0


def test_gev_quantile_closed_forms():
    p = GevParams(4.0, 2.0, 0.3)
    assert gev_quantile(math.exp(-1), p) == pytest.approx(4.0, abs=1e-12)
    assert gev_quantile(0.5, GevParams(0, 1, 0)) == pytest.approx(-math.log(math.log(2)), abs=1e-12)
    assert gev_quantile(0.5, GevParams(0, 1, 0)) == pytest.approx(0.36651, abs=1e-5)
    assert gev_median(GevParams(0, 1, 0)) == pytest.approx(0.36651, abs=1e-5)


@pytest.mark.parametrize("p", GEV_GRID)
def test_gev_matches_scipy_with_negated_shape(p):
    ref = stats.genextreme(c=-p.xi, loc=p.mu, scale=p.sigma)
    u = np.linspace(0.01, 0.99, 41)
    np.testing.assert_allclose(gev_quantile(u, p), ref.ppf(u), rtol=1e-9, atol=1e-9)
    x = ref.ppf(u)
    np.testing.assert_allclose(gev_cdf(x, p), ref.cdf(x), atol=1e-12)
    np.testing.assert_allclose(gev_pdf(x, p), ref.pdf(x), rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("p", GEV_GRID)
def test_gev_quantile_and_cdf_are_inverse(p):
    u = np.linspace(0.01, 0.99, 99)
    np.testing.assert_allclose(gev_cdf(gev_quantile(u, p), p), u, atol=1e-10)
    x = gev_quantile(np.linspace(0.001, 0.999, 50), p)
    np.testing.assert_allclose(gev_quantile(gev_cdf(x, p), p), x, atol=1e-8)


@pytest.mark.parametrize("p", GEV_GRID)
def test_gev_pdf_integrates_to_one(p):
    lo, hi = gev_quantile(1e-12, p), gev_quantile(1 - 1e-12, p)
    breaks = gev_quantile(np.array(BREAK_PROBS), p)
    area, _ = integrate.quad(lambda x: gev_pdf(x, p), lo, hi, points=breaks, limit=400)
    assert 0.999 <= area <= 1.001


def test_gumbel_branch_continuous_with_small_xi():
    x = np.linspace(-2, 6, 33)
    gumbel = gev_pdf(x, GevParams(0, 1, 0.0))
    near = gev_pdf(x, GevParams(0, 1, 1e-6))
    np.testing.assert_allclose(near, gumbel, rtol=1e-4)


def test_gev_cdf_monotone_and_pdf_nonnegative():
    p = GevParams(8.0, 1.0, 0.1)
    x = np.linspace(0, 20, 2001)
    assert np.all(np.diff(gev_cdf(x, p)) >= 0)
    assert np.all(gev_pdf(x, p) >= 0)


def test_lognorm_pdf_values():
    assert lognorm_pdf(1.0, LogNormParams(0, 1)) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-12)
    assert lognorm_pdf(0.0, LogNormParams(0, 1)) == 0.0
    assert lognorm_pdf(-1.0, LogNormParams(0, 1)) == 0.0
    closed_form = math.exp(-0.5) / (math.e * math.sqrt(2 * math.pi))
    assert lognorm_pdf(math.e, LogNormParams(0, 1)) == pytest.approx(closed_form, abs=1e-12)
    assert lognorm_pdf(math.e, LogNormParams(0, 1)) == pytest.approx(0.0890161, abs=1e-6)


@pytest.mark.parametrize("p", LOGNORM_GRID)
def test_lognorm_matches_scipy(p):
    ref = stats.lognorm(s=p.sigma, scale=math.exp(p.mu))
    u = np.linspace(0.01, 0.99, 41)
    np.testing.assert_allclose(lognorm_quantile(u, p), ref.ppf(u), rtol=1e-9)
    x = ref.ppf(u)
    np.testing.assert_allclose(lognorm_cdf(x, p), ref.cdf(x), atol=1e-12)
    np.testing.assert_allclose(lognorm_pdf(x, p), ref.pdf(x), rtol=1e-9)


@pytest.mark.parametrize("p", LOGNORM_GRID)
def test_lognorm_pdf_integrates_to_one(p):
    hi = lognorm_quantile(1 - 1e-12, p)
    breaks = lognorm_quantile(np.array(BREAK_PROBS), p)
    area, _ = integrate.quad(lambda x: lognorm_pdf(x, p), 0.0, hi, points=breaks, limit=400)
    assert 0.999 <= area <= 1.001


def test_lognorm_quantile_medians_and_one_sigma():
    assert lognorm_quantile(0.5, LogNormParams(0, 1)) == pytest.approx(1.0, abs=1e-12)
    assert lognorm_quantile(0.5, LogNormParams(2, 0.3)) == pytest.approx(math.exp(2), rel=1e-12)
    assert lognorm_quantile(0.841345, LogNormParams(0, 1)) == pytest.approx(math.e, abs=1e-4)


def test_normal_quantile_within_1e9_of_scipy():
    u = np.concatenate([np.logspace(-12, -2, 30), np.linspace(0.01, 0.99, 99), 1 - np.logspace(-6, -2, 20)])
    np.testing.assert_allclose(normal_quantile(u), ndtri(u), atol=1e-9)
    assert normal_quantile(0.5) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_quantiles_reject_u_outside_open_interval(u):
    with pytest.raises(DomainError):
        gev_quantile(u, GevParams(0, 1, 0.1))
    with pytest.raises(DomainError):
        lognorm_quantile(u, LogNormParams(0, 1))


@pytest.mark.parametrize(
    "make",
    [
        lambda: GevParams(0, 0, 0.1),
        lambda: GevParams(0, -1, 0.1),
        lambda: GevParams(float("nan"), 1, 0.1),
        lambda: GevParams(0, 1, float("inf")),
        lambda: LogNormParams(0, 0),
        lambda: LogNormParams(float("inf"), 1),
    ],
)
def test_invalid_params_raise_parameter_error(make):
    with pytest.raises(ParameterError):
        make()


def test_sample_is_deterministic_per_stream():
    p = GevParams(8, 1, 0.1)
    a = sample("gev", p, 1000, RngStream(3, "client-1-data"))
    b = sample("gev", p, 1000, RngStream(3, "client-1-data"))
    c = sample("gev", p, 1000, RngStream(3, "client-2-data"))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_single_draw_inside_support():
    (x,) = sample("lognorm", LogNormParams(0, 0.25), 1, RngStream(0, "one"))
    assert math.isfinite(x) and x > 0


def test_sample_zero_count_is_empty_request():
    with pytest.raises(EmptyRequestError):
        sample("gev", GevParams(0, 1, 0), 0, RngStream(0, "x"))


def test_gev_sample_median_near_analytic_median():
    p = GevParams(8, 1, 0.1)
    n = 10000
    draws = sample("gev", p, n, RngStream(11, "median-check"))
    q1, q3 = np.percentile(draws, [25, 75])
    assert abs(np.median(draws) - gev_median(p)) <= 3 * (q3 - q1) / math.sqrt(n)


@pytest.mark.parametrize(
    "kind,params,cdf_fn",
    [
        ("gev", GevParams(8.0, 1.0, 0.1), gev_cdf),
        ("lognorm", LogNormParams(0.0, 0.25), lognorm_cdf),
    ],
)
def test_sampler_passes_ks_at_10000_draws(kind, params, cdf_fn):
    n = 10000
    draws = np.sort(sample(kind, params, n, RngStream(2024, f"ks-{kind}")))
    d = ks_statistic(draws, lambda x: cdf_fn(x, params))
    assert ks_critical(n) == pytest.approx(0.0204, abs=1e-12)
    assert d < 0.0204
