import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icebreaker.data import AnnualSeries
from icebreaker.errors import IcebreakerError
from icebreaker.rng import normals, rng_stream
from icebreaker.smoothing import loess_smooth, ma_transfer, ma_transfer_peak, moving_average, slutsky_demo


def wls_oracle(y, t, span=1 / 3, degree=2):
    """Loess value at position t from an explicit weighted regression on
    the raw abscissa, solved with lstsq on sqrt-weighted rows."""
    T = y.size
    x = np.arange(T, dtype=float)
    q = math.ceil(span * T)
    dist = np.abs(x - t)
    dq = np.sort(dist)[q - 1]
    w = np.where(dist < dq, (1 - (dist / dq) ** 3) ** 3, 0.0)
    keep = w > 0
    X = np.vander(x[keep], degree + 1, increasing=True)
    sw = np.sqrt(w[keep])
    beta = np.linalg.lstsq(X * sw[:, None], y[keep] * sw, rcond=None)[0]
    return np.polyval(beta[::-1], t)


class TestMovingAverage:
    def test_hand_values(self):
        ma = moving_average([1.0, 2, 3, 4, 5], 3)
        np.testing.assert_array_equal(ma.valid, [False, True, True, True, False])
        np.testing.assert_allclose(ma.values[ma.valid], [2, 3, 4])

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-100, 100), st.integers(2, 30))
    def test_constant(self, c, m):
        ma = moving_average(np.full(40, c), m)
        np.testing.assert_allclose(ma.values[ma.valid], c, atol=1e-9)
        assert ma.valid.sum() == 40 - m + 1

    @pytest.mark.parametrize("m", [3, 5, 11, 25])
    def test_ramp_preserved(self, m):
        y = np.arange(60.0)
        ma = moving_average(y, m)
        np.testing.assert_allclose(ma.values[ma.valid], y[ma.valid])

    def test_bad_window(self):
        with pytest.raises(IcebreakerError):
            moving_average(np.arange(5.0), 6)


class TestLoess:
    def test_quadratic_reproduced(self):
        t = np.arange(120.0)
        y = 2 + 0.3 * t + 0.01 * t**2
        np.testing.assert_allclose(loess_smooth(y).values, y, atol=1e-6)

    def test_constant(self):
        np.testing.assert_allclose(loess_smooth(np.full(50, 3.3)).values, 3.3, atol=1e-10)

    def test_matches_wls_oracle(self):
        y = normals(rng_stream(123, 9), 500)
        fit = loess_smooth(AnnualSeries("s", 1, y), 1 / 3).values
        for t in rng_stream(123, 10).choice(500, 10, replace=False):
            assert fit[t] == pytest.approx(wls_oracle(y, t), abs=1e-8)

    def test_linear_degree(self):
        y = normals(rng_stream(124, 0), 80)
        fit = loess_smooth(y, 0.5, degree=1).values
        for t in (0, 17, 40, 79):
            assert fit[t] == pytest.approx(wls_oracle(y, t, 0.5, 1), abs=1e-8)

    def test_bad_span(self):
        with pytest.raises(IcebreakerError):
            loess_smooth(np.arange(10.0), 0.1)


class TestTransfer:
    def test_dc_gain(self):
        assert ma_transfer(25, 0.0) == 1.0
        assert ma_transfer(25, 1e-9) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("m", [2, 10, 25, 50])
    def test_first_null(self, m):
        assert ma_transfer(m, 2 * math.pi / m) == pytest.approx(0.0, abs=1e-10)

    def test_matches_cosine_form(self):
        w = np.linspace(0.05, math.pi, 200)
        direct = (1 - np.cos(25 * w)) / (625 * (1 - np.cos(w)))
        np.testing.assert_allclose(ma_transfer(25, w), direct, rtol=1e-9, atol=1e-14)

    def test_peak_m25(self):
        omega, gain, period = ma_transfer_peak(25)
        assert 16.5 <= period <= 18.5
        grid = np.linspace(2 * math.pi / 25, math.pi, 200_000)
        assert gain >= ma_transfer(25, grid).max() - 1e-12


class TestSlutsky:
    def test_bundle(self):
        demo = slutsky_demo(n=200, seed=5)
        cols = demo.columns()
        assert list(cols) == ["year", "raw", "ma10", "ma25", "loess", "bh_mean"]
        ma = demo.smooths[25]
        ok = ~np.isnan(ma)
        assert np.ptp(ma[ok]) < np.ptp(demo.raw)

    def test_seeded(self):
        a, b = slutsky_demo(n=150, seed=1), slutsky_demo(n=150, seed=1)
        np.testing.assert_array_equal(a.raw, b.raw)
        np.testing.assert_array_equal(a.bh_mean, b.bh_mean)
        assert not np.array_equal(a.raw, slutsky_demo(n=150, seed=2).raw)
