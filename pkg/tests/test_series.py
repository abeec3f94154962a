import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icebreaker.data import AnnualSeries
from icebreaker.errors import DegenerateSeriesError, IcebreakerError, RankError
from icebreaker.rng import normals, rng_stream, uniforms
from icebreaker.series import acf, ar1_fit, ar1_trend_fit, ols, terasvirta_nonlinearity

from conftest import ar1


class TestAcf:
    def test_alternating(self):
        y = np.tile([1.0, -1.0], 50)
        rho = acf(y, 2).rho
        assert rho[0] == pytest.approx(-1.0, abs=2 / 100)
        assert rho[1] == pytest.approx(1.0, abs=3 / 100)

    def test_white_noise(self):
        y = normals(rng_stream(3, 0), 10_000)
        assert abs(acf(y, 1).rho[0]) < 0.05

    def test_max_lag_precondition(self):
        with pytest.raises(IcebreakerError):
            acf([1.0, 2.0, 3.0, 4.0], 4)

    def test_constant(self):
        with pytest.raises(DegenerateSeriesError):
            acf(np.ones(10), 1)

    def test_matches_direct_sum(self):
        y = normals(rng_stream(4, 0), 57)
        d = y - y.mean()
        want = [sum(d[t] * d[t - k] for t in range(k, 57)) / sum(d * d) for k in (1, 2, 3)]
        np.testing.assert_allclose(acf(AnnualSeries("s", 1, y), 3).rho, want, rtol=1e-12)


class TestOls:
    def test_exact_line(self):
        x = np.arange(10.0)
        fit = ols(2 * x, np.column_stack([np.ones(10), x]))
        assert fit.coefficients[1] == pytest.approx(2.0)
        assert fit.r2 == 1.0
        assert fit.rmse == pytest.approx(0.0, abs=1e-12)

    def test_hand_normal_equations(self):
        # X'X = [[4, 4], [4, 6]], X'y = [8, 10] -> b = (1, 1)
        fit = ols([1, 2, 2, 3], np.column_stack([np.ones(4), [0, 1, 1, 2]]))
        np.testing.assert_allclose(fit.coefficients, [1.0, 1.0], atol=1e-12)

    def test_duplicated_column(self):
        x = np.arange(8.0)
        with pytest.raises(RankError):
            ols(x, np.column_stack([np.ones(8), x, x]))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.integers(8, 60), st.integers(1, 4))
    def test_agrees_with_normal_equations(self, seed, n, k):
        g = rng_stream(seed, 0)
        X = np.column_stack([np.ones(n), normals(g, (n, k))])
        y = normals(g, n)
        fit = ols(y, X)
        xtx = X.T @ X
        b = np.linalg.solve(xtx, X.T @ y)
        r = y - X @ b
        s2 = r @ r / (n - k - 1)
        np.testing.assert_allclose(fit.coefficients, b, rtol=1e-8, atol=1e-10)
        np.testing.assert_allclose(fit.std_errors, np.sqrt(s2 * np.diag(np.linalg.inv(xtx))), rtol=1e-8)


class TestAr1:
    def test_consistency(self):
        fit = ar1_trend_fit(ar1(0.5, 10_000, rng_stream(5, 0)))
        assert fit.names == ("intercept", "lag", "trend")
        assert abs(fit.coefficients[1] - 0.5) < 0.03

    def test_pure_trend_is_rank_deficient(self):
        # y_{t-1} = 0.01 (t - 1) is an exact combination of intercept and trend
        with pytest.raises(RankError):
            ar1_trend_fit(0.01 * np.arange(100.0))

    def test_trend_with_small_noise(self):
        y = 0.01 * np.arange(300.0) + 1e-4 * normals(rng_stream(6, 0), 300)
        fit = ar1_trend_fit(y)
        # lag and trend share the slope; their combined drift per step is 0.01
        drift = fit.coefficients[1] * 0.01 + fit.coefficients[2]
        assert drift == pytest.approx(0.01, rel=1e-2)
        assert fit.r2 == pytest.approx(1.0, abs=1e-6)

    def test_constant(self):
        with pytest.raises(RankError):
            ar1_trend_fit(np.full(50, 3.0))

    def test_ar1_without_trend(self):
        fit = ar1_fit(ar1(0.6, 5000, rng_stream(7, 0)))
        assert fit.names == ("intercept", "lag")
        assert abs(fit.coefficients[1] - 0.6) < 0.04


def quadratic_map(n, gen, burn=100):
    u = 0.1 * (2 * uniforms(gen, n + burn) - 1)
    z = np.zeros_like(u)
    for t in range(1, u.size):
        z[t] = 1.0 - 1.5 * z[t - 1] ** 2 + u[t]
    return z[burn:]


class TestNonlinearity:
    def test_short(self):
        with pytest.raises(IcebreakerError):
            terasvirta_nonlinearity(np.arange(20.0))

    def test_report_fields(self):
        rep = terasvirta_nonlinearity(ar1(0.5, 300, rng_stream(8, 0)), p=2)
        assert rep.test == "NONLIN"
        assert rep.extra["dof"] == 3 + 4  # squares/cross and cubes of two lags
        assert 0 <= rep.p_value <= 1

    def test_collinear_terms_dropped(self):
        # a two-valued series makes y^3 a linear function of y
        y = np.tile([1.0, -1.0, -1.0, 1.0, 1.0, 1.0, -1.0], 10)
        rep = terasvirta_nonlinearity(y, p=1)
        assert rep.extra["dropped_terms"] >= 1
        assert rep.extra["dof"] == 2 - rep.extra["dropped_terms"]

    @pytest.mark.slow
    def test_size_on_linear_ar1(self):
        rej = [
            terasvirta_nonlinearity(ar1(0.5, 300, rng_stream(1, i))).p_value < 0.05
            for i in range(500)
        ]
        assert 0.02 <= np.mean(rej) <= 0.09

    @pytest.mark.slow
    def test_power_on_quadratic_map(self):
        rej = [
            terasvirta_nonlinearity(quadratic_map(300, rng_stream(2, i))).p_value < 0.01
            for i in range(200)
        ]
        assert np.mean(rej) >= 0.9
