import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from bmom.densities import NormalDist, central_interval
from bmom.errors import DomainError, InsufficientDataError, PositivityError, ZeroVarianceError
from bmom.mean_model import Sample, fit_mean, mean_maxent, positive_mean_density, theta_interval

C95 = math.log(20.0) / math.sqrt(2.0)

samples = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=30).filter(
    lambda v: max(v) - min(v) > 1e-3
)


class TestFitMean:
    def test_three_points(self):
        post = fit_mean([1.0, 2.0, 3.0])
        assert post.ybar == 2.0
        assert post.residuals == (-1.0, 0.0, 1.0)
        assert post.s2 == 1.0
        assert post.dof == 2

    def test_identical_values(self):
        with pytest.raises(ZeroVarianceError) as exc:
            fit_mean([5.0, 5.0, 5.0, 5.0])
        assert exc.value.partial.ybar == 5.0

    def test_nearly_identical_in_floating_point(self):
        with pytest.raises(ZeroVarianceError):
            fit_mean([0.1, 0.1, 0.1])

    def test_single_point(self):
        with pytest.raises(InsufficientDataError):
            fit_mean([3.0])

    def test_non_finite(self):
        with pytest.raises(DomainError):
            Sample((1.0, math.nan))

    @given(samples)
    def test_residuals_sum_to_zero(self, values):
        post = fit_mean(values)
        assert abs(sum(post.residuals)) <= 4 * len(values) * np.finfo(float).eps * max(map(abs, values))
        assert post.s2 == pytest.approx(sum(r * r for r in post.residuals) / (len(values) - 1), rel=1e-12)


class TestMaxent:
    def test_three_point_marginals(self):
        ms = mean_maxent(fit_mean([1.0, 2.0, 3.0]))
        assert ms.theta_marginal.location == 2.0
        assert ms.theta_marginal.scale == pytest.approx(1.0 / math.sqrt(6.0), rel=1e-15)
        # sqrt(n/2)/s
        assert ms.theta_marginal.pdf(2.0) == pytest.approx(math.sqrt(1.5), rel=1e-14)
        assert ms.predictive_marginal.variance == pytest.approx(4.0 / 3.0, rel=1e-14)
        assert ms.predictive_conditional.variance == pytest.approx(4.0 / 3.0, rel=1e-14)
        assert ms.sigma2_density.mean == 1.0

    def test_conditional_defaults_to_s2(self):
        post = fit_mean([1.0, 4.0, 2.0, 8.0])
        ms = mean_maxent(post)
        assert ms.theta_conditional.variance == pytest.approx(post.s2 / 4, rel=1e-15)
        ms2 = mean_maxent(post, sigma2=2.0)
        assert ms2.theta_conditional.variance == 0.5
        assert ms2.predictive_conditional.variance == pytest.approx(2.5)
        # marginal members do not depend on the conditioning value
        assert ms2.theta_marginal == ms.theta_marginal

    def test_error_densities(self):
        post = fit_mean([1.0, 2.0, 3.0, 6.0])
        ms = mean_maxent(post, sigma2=3.0)
        for u, cond, marg in zip(post.residuals, ms.error_conditional, ms.error_marginal):
            assert cond.mean == u and cond.variance == 0.75
            assert marg.location == u
            assert marg.variance == pytest.approx(post.s2 / post.n, rel=1e-14)

    def test_bad_sigma2(self):
        with pytest.raises(DomainError):
            mean_maxent(fit_mean([1.0, 2.0]), sigma2=0.0)

    @given(samples)
    @settings(max_examples=30)
    def test_centres_agree(self, values):
        ms = mean_maxent(fit_mean(values))
        assert ms.theta_conditional.mean == ms.theta_marginal.location == ms.predictive_marginal.location

    @pytest.mark.parametrize("values", [[1.0, 2.0, 3.0], [0.2, -1.5, 3.3, 0.9, 2.2]])
    def test_variances_by_quadrature(self, values):
        post = fit_mean(values)
        ms = mean_maxent(post)
        for d, var in ((ms.theta_marginal, post.s2 / post.n),
                       (ms.predictive_marginal, (1 + 1 / post.n) * post.s2)):
            m = d.location
            num = sum(integrate.quad(lambda t: (t - m) ** 2 * d.pdf(t), a, b, epsabs=1e-14, epsrel=1e-12)[0]
                      for a, b in ((-np.inf, m), (m, np.inf)))
            assert num == pytest.approx(var, abs=1e-8)


class TestPositiveMean:
    def test_density_at_origin(self):
        post = fit_mean([1.0, 3.0])
        assert positive_mean_density(post).pdf(0.0) == 0.5

    def test_expectation(self):
        d = positive_mean_density(fit_mean([0.5, 1.5]))
        assert d.mean == 1.0
        assert integrate.quad(lambda t: t * d.pdf(t), 0, np.inf)[0] == pytest.approx(1.0, rel=1e-10)

    def test_zero_mean(self):
        with pytest.raises(PositivityError):
            positive_mean_density(fit_mean([-1.0, 0.0, 1.0]))


class TestThetaInterval:
    def test_three_points(self):
        iv = theta_interval(fit_mean([1.0, 2.0, 3.0]), 0.95)
        half = C95 / math.sqrt(3.0)
        assert (iv.lower, iv.upper) == pytest.approx((2.0 - half, 2.0 + half), rel=1e-14)
        assert half == pytest.approx(1.2230, abs=5e-5)

    def test_half_width_constant(self):
        post = fit_mean([3.1, 0.4, 2.2, 5.9, 1.0, 2.8])
        iv = theta_interval(post, 0.95)
        unit = post.s / math.sqrt(post.n)
        assert abs(0.5 * iv.width / unit - 2.118) <= 5e-4

    def test_width_ratio_to_normal(self):
        post = fit_mean([3.1, 0.4, 2.2, 5.9, 1.0, 2.8])
        lap = theta_interval(post, 0.95)
        nor = central_interval(NormalDist(post.ybar, post.s2 / post.n), 0.95)
        assert lap.width / nor.width == pytest.approx(1.081, abs=1e-3)

    def test_tiny_level(self):
        iv = theta_interval(fit_mean([1.0, 2.0, 3.0]), 1e-15)
        assert iv.lower == pytest.approx(2.0, abs=1e-13) and iv.upper == pytest.approx(2.0, abs=1e-13)


class TestEquivariance:
    @given(samples, st.floats(-1e3, 1e3))
    @settings(max_examples=40)
    def test_shift(self, values, c):
        a = fit_mean(values)
        b = fit_mean([v + c for v in values])
        scale = max(1.0, max(abs(v) for v in values), abs(c))
        tol = 1e-9 * scale
        assert b.ybar == pytest.approx(a.ybar + c, abs=tol)
        assert b.s2 == pytest.approx(a.s2, rel=1e-6, abs=tol * scale)
        ia, ib = theta_interval(a, 0.95), theta_interval(b, 0.95)
        assert ib.width == pytest.approx(ia.width, rel=1e-6, abs=tol)
        assert ib.lower == pytest.approx(ia.lower + c, abs=tol + 1e-6 * ia.width)

    @given(samples, st.floats(1e-3, 1e3))
    @settings(max_examples=40)
    def test_scale(self, values, k):
        a = fit_mean(values)
        b = fit_mean([v * k for v in values])
        assert b.ybar == pytest.approx(a.ybar * k, rel=1e-9, abs=1e-9 * k * max(map(abs, values)))
        assert b.s2 == pytest.approx(a.s2 * k * k, rel=1e-9)
        # standardized endpoints do not move
        ib = theta_interval(b, 0.95)
        unit = b.s / math.sqrt(b.n)
        assert (ib.upper - b.ybar) / unit == pytest.approx(C95, rel=1e-9)
