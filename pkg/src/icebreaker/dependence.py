"""Tests of the martingale difference hypothesis for annual series.

``el_portmanteau``
    heteroskedasticity-robust Box-Pierce statistic whose lag order is
    picked automatically by a penalty switching between AIC and BIC.
``avr_test``
    variance ratio at a data-driven horizon, calibrated by wild bootstrap.
``gen_spectral``
    Cramer-von Mises distance between the generalized spectral
    distribution and its flat null, calibrated by wild bootstrap.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from .data import AnnualSeries, DependenceReport
from .errors import DegenerateSeriesError, IcebreakerError
from .rng import normals, rng_stream, seed_from, uniforms
from .series import ar1_fit, terasvirta_nonlinearity

EL_PENALTY_Q = 2.4
QS_CONSTANT = 1.3221
MIN_T = 30


def _prepare(s):
    if isinstance(s, AnnualSeries):
        y, window = s.complete(), (s.first_year, s.last_year)
    else:
        y, window = np.asarray(s, dtype=float), None
    if y.size < MIN_T:
        raise IcebreakerError(f"dependence tests need T >= {MIN_T}, got {y.size}")
    if np.ptp(y) == 0.0:
        raise DegenerateSeriesError("series has zero variance")
    return y, window


def multipliers(gen, shape, kind="normal"):
    """Mean-zero, unit-variance wild-bootstrap weights."""
    if kind == "normal":
        return normals(gen, shape)
    if kind == "mammen":
        r5 = math.sqrt(5.0)
        lo, hi = -(r5 - 1) / 2, (r5 + 1) / 2
        p_lo = (r5 + 1) / (2 * r5)
        return np.where(uniforms(gen, shape) < p_lo, lo, hi)
    raise IcebreakerError(f"unknown multiplier distribution {kind!r}")


# ---------------------------------------------------------------------------
# automatic portmanteau


def _robust_corr(d, max_lag):
    T = d.size
    gam = np.empty(max_lag)
    tau = np.empty(max_lag)
    sq = d * d
    for j in range(1, max_lag + 1):
        gam[j - 1] = (d[j:] @ d[:-j]) / (T - j)
        tau[j - 1] = (sq[j:] @ sq[:-j]) / (T - j)
    return gam / np.sqrt(tau)


def el_portmanteau(s, max_lag_bound=None, q=EL_PENALTY_Q):
    """Automatic robust portmanteau test.

    Parameters
    ----------
    s : AnnualSeries or array_like
    max_lag_bound : int, optional
        Largest lag order searched; ``floor(sqrt(T))`` by default.
    q : float
        Constant of the AIC/BIC switching rule.

    Returns
    -------
    DependenceReport
        ``chosen_lag`` is the selected order; the p-value comes from a
        chi-squared law with one degree of freedom.
    """
    y, window = _prepare(s)
    T = y.size
    d = y - y.mean()
    bound = int(max_lag_bound or math.isqrt(T))
    bound = max(1, min(bound, T - 2))
    rho = _robust_corr(d, bound)
    lags = np.arange(1, bound + 1)
    q_path = T * np.cumsum(rho**2 * (T + 2) / (T - lags))
    if math.sqrt(T) * np.abs(rho).max() <= math.sqrt(q * math.log(T)):
        penalty = lags * math.log(T)
    else:
        penalty = 2.0 * lags
    chosen = int(np.argmax(q_path - penalty)) + 1
    stat = float(q_path[chosen - 1])
    return DependenceReport(
        test="Q",
        statistic=stat,
        p_value=float(stats.chi2.sf(stat, 1)),
        chosen_lag=chosen,
        window=window,
    )


# ---------------------------------------------------------------------------
# automatic variance ratio


def _avr_batch(Y):
    """Standardized variance-ratio statistics and horizons for each row."""
    B, T = Y.shape
    D = Y - Y.mean(axis=1, keepdims=True)
    denom = np.einsum("bt,bt->b", D, D)
    rho1 = np.einsum("bt,bt->b", D[:, 1:], D[:, :-1]) / denom
    rho1 = np.clip(rho1, -0.99, 0.99)
    alpha2 = 4.0 * rho1**2 / (1.0 - rho1) ** 4
    # below one the Bartlett sum is empty either way
    horizon = np.clip(QS_CONSTANT * (alpha2 * T) ** 0.2, 1.0, T - 1.0)
    n_lags = np.ceil(horizon).astype(int) - 1
    top = int(n_lags.max()) if n_lags.size else 0
    vr = np.ones(B)
    for i in range(1, top + 1):
        active = n_lags >= i
        if not active.any():
            break
        r_i = np.einsum("bt,bt->b", D[active, i:], D[active, :-i]) / denom[active]
        vr[active] += 2.0 * (1.0 - i / horizon[active]) * r_i
    stat = np.sqrt(T / horizon) * (vr - 1.0) / math.sqrt(4.0 / 3.0)
    return stat, horizon, vr


def variance_ratio(y, horizon):
    """``1 + 2 sum_{i < horizon} (1 - i/horizon) rho_i`` for one series."""
    y = np.asarray(y, dtype=float)
    d = y - y.mean()
    denom = d @ d
    out = 1.0
    i = 1
    while i < horizon:
        out += 2.0 * (1.0 - i / horizon) * (d[i:] @ d[:-i]) / denom
        i += 1
    return out


def avr_test(s, bootstrap_reps=500, seed=0, multiplier="normal"):
    """Automatic variance ratio test with wild-bootstrap p-value.

    The horizon is the quadratic-spectral plug-in bandwidth driven by an
    AR(1) approximation. Bootstrap series are the demeaned data times iid
    weights; each resample re-selects its horizon.
    """
    y, window = _prepare(s)
    d = (y - y.mean())[None, :]
    stat, horizon, vr = _avr_batch(d)
    gen = rng_stream(seed_from(seed), 2)
    eta = multipliers(gen, (bootstrap_reps, y.size), multiplier)
    boot, _, _ = _avr_batch(eta * d)
    observed = abs(float(stat[0]))
    p = float(np.mean(np.abs(boot) > observed))
    return DependenceReport(
        test="AVR",
        statistic=observed,
        p_value=p,
        chosen_lag=float(horizon[0]),
        bootstrap_reps=bootstrap_reps,
        window=window,
        extra={"variance_ratio": float(vr[0])},
    )


# ---------------------------------------------------------------------------
# generalized spectral test


def _spectral_blocks(z):
    """Yield ``(j, centred kernel block, lagged targets)`` for every lag."""
    T = z.size
    K = np.exp(-0.5 * (z[:, None] - z[None, :]) ** 2)
    for j in range(1, T):
        m = T - j
        sub = K[:m, :m]
        r = sub.mean(axis=0)
        kc = sub - r[:, None] - r[None, :] + r.mean()
        yield j, kc, z[j:]


def gen_spectral(s, bootstrap_reps=500, seed=0, multiplier="normal", chunk=100):
    """Generalized spectral test of the martingale difference hypothesis.

    With the standard normal integrating measure the weighted integral of
    ``|gamma_j(x)|^2`` reduces to a quadratic form in the Gaussian kernel
    ``exp(-(y_r - y_s)^2 / 2)``, double-centred to remove the mean of the
    exponential transform. The series is standardized first.
    """
    y, window = _prepare(s)
    T = y.size
    z = (y - y.mean()) / y.std()
    gen = rng_stream(seed_from(seed), 3)
    eta = multipliers(gen, (bootstrap_reps, T), multiplier)
    stat = 0.0
    boot = np.zeros(bootstrap_reps)
    for j, kc, target in _spectral_blocks(z):
        m = T - j
        e = target - target.mean()
        weight = 1.0 / (m * (j * math.pi) ** 2)
        stat += weight * float(e @ kc @ e)
        for lo in range(0, bootstrap_reps, chunk):
            E = eta[lo : lo + chunk, j:] * e
            boot[lo : lo + chunk] += weight * np.einsum("bi,bi->b", E @ kc, E)
    p = float(np.mean(boot > stat))
    return DependenceReport(
        test="SPEC",
        statistic=stat,
        p_value=p,
        chosen_lag=None,
        bootstrap_reps=bootstrap_reps,
        window=window,
    )


# ---------------------------------------------------------------------------


TESTS = {
    "Q": lambda s, **kw: el_portmanteau(s, max_lag_bound=kw.get("max_lag_bound")),
    "AVR": lambda s, **kw: avr_test(
        s, kw.get("bootstrap_reps", 500), kw.get("seed", 0), kw.get("multiplier", "normal")
    ),
    "SPEC": lambda s, **kw: gen_spectral(
        s, kw.get("bootstrap_reps", 500), kw.get("seed", 0), kw.get("multiplier", "normal")
    ),
    "NONLIN": lambda s, **kw: terasvirta_nonlinearity(s, kw.get("p", 1)),
}


def run_test(name, s, **kw):
    """Dispatch on the test id (``Q``, ``AVR``, ``SPEC`` or ``NONLIN``)."""
    try:
        fn = TESTS[name.upper()]
    except KeyError:
        raise IcebreakerError(f"unknown test {name!r}; choose from {sorted(TESTS)}") from None
    return fn(s, **kw)


def residual_recheck(s, test, **kw):
    """Fit an AR(1) without trend and run ``test`` on its residuals."""
    y, _ = _prepare(s)
    fit = ar1_fit(y)
    first = s.first_year + 1 if isinstance(s, AnnualSeries) else 1
    name = s.name if isinstance(s, AnnualSeries) else "series"
    resid = AnnualSeries(name=f"{name}-ar1-resid", first_year=first, values=fit.residuals)
    report = run_test(test, resid, **kw)
    report.extra["ar1_lag"] = float(fit.coefficients[1])
    report.extra["ar1_lag_p"] = float(fit.p_values[1])
    return report
