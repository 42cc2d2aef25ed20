import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from metasense.numerics import (
    QuadratureError,
    bivariate_normal_cdf,
    integrate_1d,
    logit_normal_expectation,
    rng_stream,
    std_normal_cdf,
    std_normal_pdf,
    std_normal_quantile,
)


def _erf_cdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _bisect_quantile(p):
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _erf_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bn_dblquad(h, k, r):
    def dens(y, x):
        q = (x * x - 2 * r * x * y + y * y) / (2 * (1 - r * r))
        return math.exp(-q) / (2 * math.pi * math.sqrt(1 - r * r))

    val, _ = integrate.dblquad(dens, -12, h, lambda x: -12, lambda x: k, epsabs=1e-13, epsrel=1e-13)
    return val


class TestStdNormal:
    def test_cdf_at_zero(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_cdf_saturates(self):
        assert std_normal_cdf(40.0) == 1.0
        assert std_normal_cdf(-40.0) == 0.0

    def test_cdf_study_aucs(self):
        # Phi(1.2265) from a printed normal table: 0.8900
        assert std_normal_cdf(1.2265) == pytest.approx(0.89, abs=5e-5)

    @pytest.mark.parametrize("x", np.linspace(-8, 8, 33))
    def test_cdf_matches_erfc(self, x):
        assert std_normal_cdf(x) == pytest.approx(_erf_cdf(x), abs=1e-12)

    def test_cdf_monotone_and_symmetric(self):
        x = np.linspace(-10, 10, 20001)
        p = std_normal_cdf(x)
        assert np.all(np.diff(p) >= 0)
        np.testing.assert_allclose(p + std_normal_cdf(-x), 1.0, atol=1e-15)

    @pytest.mark.parametrize(
        "p, expected",
        [(0.5, 0.0), (0.99, 2.326347874040839), (0.76, 0.7063025628400872)],
    )
    def test_quantile_values(self, p, expected):
        # expected values from bisection on an erfc-based CDF
        assert std_normal_quantile(p) == pytest.approx(expected, abs=1e-10)
        assert _bisect_quantile(p) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, math.nan])
    def test_quantile_rejects_outside_open_interval(self, p):
        with pytest.raises(ValueError):
            std_normal_quantile(p)

    def test_quantile_cdf_round_trip(self):
        p = np.concatenate([np.logspace(-8, -1, 50), np.linspace(0.1, 0.9, 81), 1 - np.logspace(-8, -1, 50)])
        np.testing.assert_allclose(std_normal_quantile(p), [_bisect_quantile(v) for v in p], atol=1e-8)
        np.testing.assert_allclose(std_normal_cdf(std_normal_quantile(p)), p, atol=1e-10, rtol=0)


class TestBivariateNormal:
    def test_origin_identity(self):
        assert bivariate_normal_cdf(0, 0, 0.5) == pytest.approx(1 / 3, abs=1e-12)
        assert bivariate_normal_cdf(0, 0, 0.0) == pytest.approx(0.25, abs=1e-15)

    @pytest.mark.parametrize("rho", np.round(np.arange(-0.95, 0.951, 0.05), 2))
    def test_origin_identity_grid(self, rho):
        assert bivariate_normal_cdf(0.0, 0.0, rho) == pytest.approx(0.25 + math.asin(rho) / (2 * math.pi), abs=1e-9)

    def test_against_2d_quadrature(self):
        # oracle: 0.3077836313309352 from dblquad of the density
        assert bivariate_normal_cdf(1.0, -0.5, 0.8) == pytest.approx(_bn_dblquad(1.0, -0.5, 0.8), abs=1e-8)

    @pytest.mark.parametrize(
        "h, k, r",
        [(-1.3, 0.4, -0.6), (2.0, 1.5, 0.93), (0.2, -0.1, -0.97), (-2.5, -2.0, 0.99), (1.1, 0.7, 0.1)],
    )
    def test_against_2d_quadrature_regimes(self, h, k, r):
        # covers the three Gauss-Legendre regimes and the |rho| >= 0.925 expansion
        assert bivariate_normal_cdf(h, k, r) == pytest.approx(_bn_dblquad(h, k, r), abs=1e-8)

    def test_infinite_limits(self):
        assert bivariate_normal_cdf(math.inf, 0.3, 0.4) == pytest.approx(std_normal_cdf(0.3), abs=1e-15)
        assert bivariate_normal_cdf(-math.inf, 0.3, 0.4) == 0.0
        assert bivariate_normal_cdf(math.inf, math.inf, -0.2) == 1.0

    def test_perfect_correlation(self):
        assert bivariate_normal_cdf(1.0, -0.5, 1.0) == pytest.approx(std_normal_cdf(-0.5), abs=1e-15)
        assert bivariate_normal_cdf(1.0, -0.5, -1.0) == pytest.approx(
            std_normal_cdf(1.0) - std_normal_cdf(0.5), abs=1e-15
        )
        assert bivariate_normal_cdf(-1.0, -0.5, -1.0) == 0.0

    @pytest.mark.parametrize("rho", [math.nan, math.inf, 1.01, -2.0])
    def test_rejects_bad_rho(self, rho):
        with pytest.raises(ValueError):
            bivariate_normal_cdf(0.0, 0.0, rho)

    def test_broadcasts(self):
        h = np.array([0.0, 1.0, -1.0])
        out = bivariate_normal_cdf(h, 0.0, 0.0)
        np.testing.assert_allclose(out, std_normal_cdf(h) * 0.5, atol=1e-15)

    @settings(max_examples=300, deadline=None)
    @given(
        st.floats(-6, 6),
        st.floats(-6, 6),
        st.floats(-1, 1),
    )
    def test_symmetry_and_independence(self, h, k, r):
        assert bivariate_normal_cdf(h, k, r) == pytest.approx(bivariate_normal_cdf(k, h, r), abs=1e-12)
        assert bivariate_normal_cdf(h, k, 0.0) == pytest.approx(std_normal_cdf(h) * std_normal_cdf(k), abs=1e-15)
        v = bivariate_normal_cdf(h, k, r)
        assert 0.0 <= v <= min(std_normal_cdf(h), std_normal_cdf(k)) + 1e-12


class TestIntegrate:
    def test_normal_pdf_normalised(self):
        assert integrate_1d(std_normal_pdf) == pytest.approx(1.0, abs=1e-9)

    def test_logit_normal_density_normalised(self):
        mu, sigma = 0.2, 0.5

        def dens(c):
            return std_normal_pdf((math.log(c / (1 - c)) - mu) / sigma) / (sigma * c * (1 - c))

        assert integrate_1d(dens, logit_domain=True) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("sigma", [1e-4, 0.05, 1.0, 3.0])
    def test_expectation_normalised(self, sigma):
        assert logit_normal_expectation(lambda c: 1.0, 0.3, sigma) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.slow
    def test_logit_normal_mean_against_monte_carlo(self):
        mean = logit_normal_expectation(lambda c: c, 0.0, 1.0)
        rng = np.random.default_rng(20261019)
        draws = 1.0 / (1.0 + np.exp(-rng.standard_normal(10_000_000)))
        se = draws.std() / math.sqrt(draws.size)
        assert abs(mean - draws.mean()) <= 3 * se
        # symmetric around 1/2
        assert mean == pytest.approx(0.5, abs=1e-12)

    def test_logit_normal_mean_skewed_against_monte_carlo(self):
        mean = logit_normal_expectation(lambda c: c, 0.8, 1.3)
        rng = np.random.default_rng(5)
        draws = 1.0 / (1.0 + np.exp(-(0.8 + 1.3 * rng.standard_normal(2_000_000))))
        assert abs(mean - draws.mean()) <= 3 * draws.std() / math.sqrt(draws.size)

    def test_non_convergence_reported(self):
        with pytest.raises(QuadratureError):
            integrate_1d(lambda x: math.sin(1.0 / x) / x, 1e-6, 1.0, limit=5, atol=1e-12)


class TestRngStream:
    def test_deterministic(self):
        a = rng_stream(42, 0).random(1000)
        b = rng_stream(42, 0).random(1000)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self):
        assert not np.array_equal(rng_stream(42, 0).random(100), rng_stream(42, 1).random(100))
        assert not np.array_equal(rng_stream(42, 0).random(100), rng_stream(43, 0).random(100))

    def test_tuple_stream_ids(self):
        np.testing.assert_array_equal(rng_stream(7, (1, 2)).random(10), rng_stream(7, (1, 2)).random(10))
        assert not np.array_equal(rng_stream(7, (1, 2)).random(10), rng_stream(7, (2, 1)).random(10))

    def test_uniform_mean(self):
        x = rng_stream(42, 0).random(1_000_000)
        assert x.mean() == pytest.approx(0.5, abs=0.002)
