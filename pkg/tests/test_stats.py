from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from logfreeze import stats as st
from logfreeze import theory as th


class TestKsDistance:
    def test_point_mass_against_own_step(self):
        samples = np.full(64, 2.5)
        cdf = lambda v: (np.asarray(v) >= 2.5).astype(float)
        assert st.ks_distance(samples, cdf) == pytest.approx(0.0, abs=1e-12)

    def test_null_distribution(self):
        rng = np.random.default_rng(0)
        n = 10000
        d = st.ks_distance(rng.uniform(0, 1, n), lambda v: np.clip(v, 0, 1))
        # 1.63 / sqrt(n) is the 0.999 quantile of the null statistic
        assert d < 1.63 / math.sqrt(n)

    def test_disjoint_supports(self):
        # uniform samples on [0,1] against the CDF of uniform on [1,2]
        samples = np.linspace(0.01, 0.99, 50)
        cdf = lambda v: np.clip(np.asarray(v) - 1.0, 0.0, 1.0)
        assert st.ks_distance(samples, cdf) == pytest.approx(1.0, abs=0.03)

    def test_shift_detected(self):
        rng = np.random.default_rng(1)
        x = rng.normal(1.0, 1.0, 2000)
        from scipy.stats import norm

        d = st.ks_distance(x, lambda v: norm.cdf(v))
        assert d > 0.3

    def test_non_monotone_cdf_raises(self):
        with pytest.raises(st.EstimationError):
            st.ks_distance(np.linspace(0, 1, 100), lambda v: np.sin(8 * np.asarray(v)))


class TestCumulants:
    def test_constant(self):
        k = st.sample_cumulants(np.full(100, 3.25))
        assert k[0] == 3.25 and np.allclose(k[1:], 0.0)

    def test_hand_computed_variance(self):
        x = np.array([1.0, 2.0, 3.0, 4.0, 10.0])
        k = st.sample_cumulants(np.repeat(x, 8))
        assert k[1] == pytest.approx(np.repeat(x, 8).var(ddof=1))

    def test_standard_normal(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(10**6)
        k = st.sample_cumulants(x)
        n = len(x)
        # asymptotic standard errors of k-statistics under normality
        se = (1 / math.sqrt(n), math.sqrt(2 / n), math.sqrt(6 / n), math.sqrt(24 / n))
        for est, target, s in zip(k, (0, 1, 0, 0), se):
            assert abs(est - target) < 5 * s

    def test_synthetic_max_law_mean(self):
        # inverse-CDF draws from the full-circle extreme law reproduce the
        # closed-form mean
        rng = np.random.default_rng(3)
        u = rng.uniform(1e-12, 1 - 1e-12, 200000)
        lo, hi = -40.0, 25.0
        draws = np.empty_like(u)
        order = np.argsort(u)
        left = lo
        for idx in order:
            draws[idx] = brentq(lambda v: th.cdf_max_full_circle(v) - u[idx], left, hi,
                                xtol=1e-9)
            left = draws[idx] - 1e-9
        k = st.sample_cumulants(draws, order=2)
        se = math.sqrt(k[1] / len(u))
        assert abs(k[0] - th.MAX_MEAN_FULL_CIRCLE) < 3 * se

    def test_guards(self):
        with pytest.raises(st.EstimationError):
            st.sample_cumulants(np.ones(5))
        with pytest.raises(st.EstimationError):
            st.sample_cumulants(np.ones(100), order=5)


class TestFitSlope:
    def test_exact_line(self):
        x = np.linspace(0, 5, 9)
        slope, intercept, se = st.fit_slope(x, 2.0 * x - 1.0)
        assert slope == pytest.approx(2.0, abs=1e-12)
        assert intercept == pytest.approx(-1.0, abs=1e-12)
        assert se == pytest.approx(0.0, abs=1e-10)

    def test_noisy_line(self):
        rng = np.random.default_rng(4)
        x = np.linspace(0, 1, 100)
        y = 2.0 * x + rng.normal(0, 0.1, 100)
        slope, _, se = st.fit_slope(x, y)
        assert abs(slope - 2.0) < 0.05
        assert 0.01 < se < 0.1

    def test_constant_y(self):
        slope, _, _ = st.fit_slope([0, 1, 2, 3], [5, 5, 5, 5])
        assert slope == 0.0

    def test_degenerate(self):
        with pytest.raises(st.EstimationError):
            st.fit_slope([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


class TestBootstrap:
    def test_mean_matches_formula(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(400)
        se = st.bootstrap_se(x, np.mean, n_resamples=600, seed=2)
        formula = x.std(ddof=1) / math.sqrt(len(x))
        assert abs(se - formula) / formula < 0.2

    def test_constant_sample(self):
        assert st.bootstrap_se(np.ones(50), np.mean) == 0.0

    def test_median_scale(self):
        rng = np.random.default_rng(6)
        x = rng.uniform(0, 1, 900)
        se = st.bootstrap_se(x, np.median, n_resamples=800, seed=3)
        asymptotic = 1.0 / (2.0 * math.sqrt(len(x)) * 1.0)
        assert abs(se - asymptotic) / asymptotic < 0.35

    def test_deterministic(self):
        x = np.random.default_rng(7).standard_normal(100)
        a = st.bootstrap_se(x, np.mean, 300, seed=9)
        b = st.bootstrap_se(x, np.mean, 300, seed=9)
        assert a == b


class TestNormalizeAndTails:
    def test_normalize_variance(self):
        rng = np.random.default_rng(8)
        x = rng.normal(3.0, 2.0, 5000)
        y, scale = st.normalize_variance(x, 1.0)
        assert y.var(ddof=1) == pytest.approx(1.0, rel=1e-12)
        assert y.mean() == pytest.approx(x.mean(), abs=1e-12)
        assert scale == pytest.approx(1.0 / x.std(ddof=1), rel=1e-10)

    def test_tail_exponent_recovers_pareto(self):
        rng = np.random.default_rng(9)
        alpha = 3.5
        x = (1 - rng.uniform(0, 1, 200000)) ** (-1.0 / (alpha - 1.0))
        est, se = st.tail_exponent(x, 2.0, 50.0)
        assert abs(est - alpha) < max(3 * se, 0.15)

    def test_tail_exponent_guard(self):
        with pytest.raises(st.EstimationError):
            st.tail_exponent(np.ones(50) * 0.1, 2.0, 50.0)

    def test_gumbel_fit_and_cdf(self):
        rng = np.random.default_rng(10)
        r = rng.gumbel(1.5, 2.0, 100000)
        loc, scale = st.gumbel_fit(r)
        assert abs(loc - 1.5) < 0.05 and abs(scale - 2.0) < 0.05
        d = st.ks_distance(r, lambda v: st.gumbel_cdf(v, loc, scale))
        assert d < 0.01


class TestProperties:
    """Structural invariants, property-based."""

    def test_ks_bounds_and_permutation_invariance(self):
        from hypothesis import given, settings, strategies as hst

        cdf = lambda v: st.gumbel_cdf(v)

        @given(hst.lists(hst.floats(-20, 20), min_size=12, max_size=60),
               hst.randoms())
        @settings(max_examples=60, deadline=None)
        def check(values, rnd):
            d1 = st.ks_distance(np.array(values), cdf)
            shuffled = list(values)
            rnd.shuffle(shuffled)
            d2 = st.ks_distance(np.array(shuffled), cdf)
            assert 0.0 <= d1 <= 1.0
            assert d1 == d2

        check()

    def test_normalize_variance_hits_any_target(self):
        from hypothesis import given, settings, strategies as hst

        @given(hst.floats(0.01, 50.0))
        @settings(max_examples=40, deadline=None)
        def check(target):
            x = np.linspace(-3.0, 7.0, 41)
            y, _ = st.normalize_variance(x, target)
            assert y.var(ddof=1) == pytest.approx(target, rel=1e-9)

        check()
