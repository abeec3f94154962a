"""Autocorrelations and least-squares fits for annual series."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np
from scipy import stats

from .data import AnnualSeries, DependenceReport
from .errors import DegenerateSeriesError, IcebreakerError, RankError


@dataclass
class AcfResult:
    """Sample autocorrelations at lags ``1..len(rho)``."""

    rho: np.ndarray
    n: int


@dataclass
class RegressionFit:
    coefficients: np.ndarray
    std_errors: np.ndarray
    rmse: float
    r2: float
    n: int
    residuals: np.ndarray = None
    names: tuple = ()

    @property
    def t_values(self):
        return self.coefficients / self.std_errors

    @property
    def p_values(self):
        dof = self.n - self.coefficients.size
        return 2.0 * stats.t.sf(np.abs(self.t_values), dof)

    def as_dict(self):
        out = {"n": self.n, "rmse": self.rmse, "r2": self.r2}
        names = self.names or tuple(f"b{i}" for i in range(self.coefficients.size))
        for name, coef, se in zip(names, self.coefficients, self.std_errors):
            out[name] = float(coef)
            out[f"{name}_se"] = float(se)
        return out


def _values(s):
    if isinstance(s, AnnualSeries):
        return s.complete()
    return np.asarray(s, dtype=float)


def autocorrelations(y, max_lag):
    """Plain-array version of :func:`acf`."""
    y = np.asarray(y, dtype=float)
    d = y - y.mean()
    denom = d @ d
    if denom <= 0.0 or not np.isfinite(denom):
        raise DegenerateSeriesError("autocorrelation of a constant series is undefined")
    return np.array([d[k:] @ d[:-k] for k in range(1, max_lag + 1)]) / denom


def acf(s, max_lag):
    """Autocorrelations of a complete series.

    ``rho[i-1] = sum (y_t - ybar)(y_{t-i} - ybar) / sum (y_t - ybar)^2``,
    the sums running over the available terms.
    """
    y = _values(s)
    if max_lag < 1 or max_lag >= y.size:
        raise IcebreakerError(f"max_lag must satisfy 1 <= max_lag < T={y.size}")
    return AcfResult(rho=autocorrelations(y, max_lag), n=y.size)


def ols(y, X, names=()):
    """Ordinary least squares with classical standard errors.

    Parameters
    ----------
    y : array_like, shape (n,)
    X : array_like, shape (n, k)
        Design matrix; include a column of ones for an intercept.

    Returns
    -------
    RegressionFit
        ``r2`` is measured against the intercept-only model.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, k = X.shape
    if y.shape != (n,):
        raise IcebreakerError("y and X have different numbers of rows")
    if n <= k:
        raise RankError(f"need more observations than regressors (n={n}, k={k})")
    scale = np.linalg.norm(X, axis=0)
    scale[scale == 0] = 1.0
    if np.linalg.matrix_rank(X / scale) < k:
        raise RankError("design matrix is rank deficient")
    q, r = np.linalg.qr(X)
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - X @ beta
    ssr = float(resid @ resid)
    dof = n - k
    sigma2 = ssr / dof
    r_inv = np.linalg.inv(r)
    cov = sigma2 * (r_inv @ r_inv.T)
    tss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ssr / tss if tss > 0 else 1.0
    return RegressionFit(
        coefficients=beta,
        std_errors=np.sqrt(np.diag(cov)),
        rmse=float(np.sqrt(sigma2)),
        r2=float(min(max(r2, 0.0), 1.0)),
        n=n,
        residuals=resid,
        names=tuple(names),
    )


def ar1_trend_fit(s):
    """Fit ``y_t = alpha + beta * y_{t-1} + gamma * t``.

    The trend counts from 1 at the second observation.
    """
    y = _values(s)
    if y.size < 10:
        raise IcebreakerError("AR(1) with trend needs at least 10 observations")
    t = np.arange(1, y.size, dtype=float)
    X = np.column_stack([np.ones(y.size - 1), y[:-1], t])
    return ols(y[1:], X, names=("intercept", "lag", "trend"))


def ar1_fit(s):
    """Fit ``y_t = alpha + beta * y_{t-1}`` (no trend)."""
    y = _values(s)
    if y.size < 3:
        raise IcebreakerError("AR(1) needs at least 3 observations")
    X = np.column_stack([np.ones(y.size - 1), y[:-1]])
    return ols(y[1:], X, names=("intercept", "lag"))


def _lag_matrix(y, p):
    n = y.size
    return np.column_stack([y[p - i : n - i] for i in range(1, p + 1)])


def terasvirta_nonlinearity(s, p=1):
    """Neural-network (Taylor expansion) test for neglected nonlinearity.

    A linear AR(p) is fitted by OLS; its residuals are regressed on the AR
    regressors plus every second- and third-order product of the lags.
    ``T * R^2`` of that auxiliary regression is referred to a chi-squared
    law with one degree of freedom per added term. Exactly collinear
    products are dropped and the degrees of freedom reduced accordingly.
    """
    y = _values(s)
    if y.size < 30:
        raise IcebreakerError("nonlinearity test needs T >= 30")
    if p < 1:
        raise IcebreakerError("lag order must be >= 1")
    sd = y.std()
    if sd == 0:
        raise DegenerateSeriesError("constant series")
    y = (y - y.mean()) / sd
    lags = _lag_matrix(y, p)
    target = y[p:]
    base = np.column_stack([np.ones(target.size), lags])
    linear = ols(target, base)
    resid = linear.residuals

    extra = []
    for order in (2, 3):
        for combo in combinations_with_replacement(range(p), order):
            extra.append(np.prod(lags[:, combo], axis=1))
    extra = np.column_stack(extra)

    kept = []
    design = base
    for j in range(extra.shape[1]):
        trial = np.column_stack([design, extra[:, j]])
        scaled = trial / np.linalg.norm(trial, axis=0)
        if np.linalg.matrix_rank(scaled) == trial.shape[1]:
            design = trial
            kept.append(j)
    dropped = extra.shape[1] - len(kept)
    aux = ols(resid, design)
    # residuals of the linear fit have mean zero, so the uncentred and
    # centred R^2 coincide
    stat = target.size * aux.r2
    dof = len(kept)
    p_value = float(stats.chi2.sf(stat, dof)) if dof > 0 else 1.0
    return DependenceReport(
        test="NONLIN",
        statistic=float(stat),
        p_value=p_value,
        chosen_lag=p,
        window=(s.first_year, s.last_year) if isinstance(s, AnnualSeries) else None,
        extra={"dof": dof, "dropped_terms": dropped},
    )
