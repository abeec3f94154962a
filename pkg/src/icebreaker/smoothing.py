"""Moving averages, local quadratic regression and the moving-average
transfer function, plus the white-noise smoothing demonstration."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .data import AnnualSeries
from .errors import IcebreakerError
from .rng import normals, rng_stream, seed_from


@dataclass
class SmoothedSeries:
    source_name: str
    method: str
    values: np.ndarray
    valid: np.ndarray
    first_year: int = 0

    @property
    def years(self):
        return np.arange(self.first_year, self.first_year + self.values.size)


def _unpack(s):
    if isinstance(s, AnnualSeries):
        return s.complete(), s.name, s.first_year
    return np.asarray(s, dtype=float), "series", 0


def moving_average(s, m):
    """Centred m-term moving average.

    Position ``t`` averages ``y[t - m//2 : t - m//2 + m]``; positions
    without a full window are NaN and flagged invalid.
    """
    y, name, first = _unpack(s)
    T = y.size
    if not 2 <= m <= T:
        raise IcebreakerError(f"window m={m} must satisfy 2 <= m <= T={T}")
    left = m // 2
    out = np.full(T, np.nan)
    cs = np.concatenate([[0.0], np.cumsum(y)])
    sums = cs[m:] - cs[:-m]
    out[left : left + sums.size] = sums / m
    valid = ~np.isnan(out)
    return SmoothedSeries(name, f"ma({m})", out, valid, first)


def loess_smooth(s, span=1 / 3, degree=2):
    """Local polynomial regression with tri-cube weights.

    At every position the ``q = ceil(span * T)`` nearest observations are
    weighted by ``(1 - (d / d_q)^3)^3``, with ``d_q`` the distance to the
    q-th nearest point, and a polynomial of the given degree is fitted by
    weighted least squares. Near the ends the neighbourhood becomes
    one-sided.
    """
    y, name, first = _unpack(s)
    T = y.size
    if not 0 < span <= 1:
        raise IcebreakerError("span must lie in (0, 1]")
    q = int(math.ceil(span * T - 1e-9))
    if q < degree + 2:
        raise IcebreakerError(f"window of {q} points too small for degree {degree}")
    x = np.arange(T, dtype=float)
    out = np.empty(T)
    for t in range(T):
        dist = np.abs(x - t)
        dq = np.partition(dist, q - 1)[q - 1]
        if dq == 0:
            dq = 1.0
        u = np.clip(dist / dq, 0.0, 1.0)
        w = (1.0 - u**3) ** 3
        idx = np.nonzero(w > 0)[0]
        dx = x[idx] - t
        ww = w[idx]
        # weighted normal equations on powers of the centred abscissa
        moments = np.array([ww @ dx**k for k in range(2 * degree + 1)])
        G = np.array([[moments[i + j] for j in range(degree + 1)] for i in range(degree + 1)])
        rhs = np.array([ww @ (dx**k * y[idx]) for k in range(degree + 1)])
        out[t] = np.linalg.solve(G, rhs)[0]
    return SmoothedSeries(name, f"loess({span:.4g})", out, np.ones(T, dtype=bool), first)


def ma_transfer(m, omega):
    """Power gain ``(1 - cos m w) / (m^2 (1 - cos w))`` of an m-term average.

    Vectorised over ``omega``; the removable singularity at zero returns 1.
    """
    if m < 2:
        raise IcebreakerError("m must be >= 2")
    w = np.asarray(omega, dtype=float)
    # half-angle form is exact where the direct ratio cancels badly
    with np.errstate(divide="ignore", invalid="ignore"):
        num = np.sin(m * w / 2.0) ** 2
        den = (m * np.sin(w / 2.0)) ** 2
        out = np.where(np.abs(w) < 1e-12, 1.0, num / den)
    return out if out.ndim else float(out)


def ma_transfer_peak(m, grid=20000):
    """Locate the largest local maximum of the gain away from zero.

    Returns ``(omega, gain, period)`` with ``period = 2 pi / omega``.
    """
    w = np.linspace(2 * math.pi / m, math.pi, grid)
    f = ma_transfer(m, w)
    interior = np.nonzero((f[1:-1] >= f[:-2]) & (f[1:-1] >= f[2:]))[0] + 1
    if interior.size == 0:
        k = int(np.argmax(f))
        return float(w[k]), float(f[k]), 2 * math.pi / float(w[k])
    k = interior[np.argmax(f[interior])]
    res = optimize.minimize_scalar(
        lambda v: -ma_transfer(m, v), bounds=(w[k - 1], w[k + 1]), method="bounded",
        options={"xatol": 1e-12},
    )
    omega = float(res.x)
    return omega, float(ma_transfer(m, omega)), 2 * math.pi / omega


@dataclass
class SlutskyDemo:
    years: np.ndarray
    raw: np.ndarray
    smooths: dict
    loess: np.ndarray
    bh_mean: np.ndarray
    bh_prob: np.ndarray
    seed: int

    def columns(self):
        cols = {"year": self.years, "raw": self.raw}
        for m, v in self.smooths.items():
            cols[f"ma{m}"] = v
        cols["loess"] = self.loess
        cols["bh_mean"] = self.bh_mean
        return cols


def slutsky_demo(n=500, seed=123, windows=(10, 25), span=1 / 3, bh_kwargs=None):
    """Smooth seeded white noise several ways next to the Barry-Hartigan
    posterior mean of the same draws."""
    from .bayes import barry_hartigan

    if n < 100:
        raise IcebreakerError("demo needs n >= 100")
    seed = seed_from(seed)
    raw = normals(rng_stream(seed, 4), n)
    series = AnnualSeries(name="white-noise", first_year=1, values=raw)
    smooths = {m: moving_average(series, m).values for m in windows}
    lo = loess_smooth(series, span).values
    bh = barry_hartigan(series, seed=seed, **(bh_kwargs or {}))
    return SlutskyDemo(
        years=series.years,
        raw=raw,
        smooths=smooths,
        loess=lo,
        bh_mean=bh.posterior_mean,
        bh_prob=bh.change_prob,
        seed=seed,
    )
