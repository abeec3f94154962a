"""Analysis runners that turn series into table and figure files.

Each runner returns an ordered mapping ``{filename: text}``; callers
decide where to write. Formatting is deterministic so identical inputs
and seeds give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import math

import numpy as np

from . import svg
from .bayes import barry_hartigan, icc_summary
from .bayes.anova import anova_chains
from .changepoint import bai_perron, cbs
from .dependence import residual_recheck, run_test
from .ingest import demean, format_annual_csv, impute_median, window
from .series import acf, ar1_trend_fit
from .sim import paper_scenarios, run_power
from .smoothing import loess_smooth, ma_transfer_peak, moving_average, slutsky_demo

ANALYSES = ("describe", "anova", "icc", "breaks", "ar1", "mds", "smooth", "slutsky", "power")


def cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return ""
        return repr(v)
    return str(v)


def to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([cell(v) for v in row])
    return buf.getvalue()


def prepare(s):
    """Fill gaps with the series median so every analysis sees complete data."""
    return impute_median(s) if s.has_missing else s


# ---------------------------------------------------------------------------


def run_describe(s, max_lag=5):
    v = s.values[~s.missing]
    lags = min(max_lag, len(s) - 1)
    rho = acf(prepare(s), lags).rho if lags >= 1 and np.ptp(v) > 0 else []
    header = ["name", "season", "first_year", "last_year", "n", "missing", "mean", "sd", "min", "max"]
    header += [f"acf{i}" for i in range(1, lags + 1)]
    row = [s.name, s.season, s.first_year, s.last_year, len(s), int(s.missing.sum()),
           v.mean(), v.std(ddof=1) if v.size > 1 else float("nan"), v.min(), v.max()]
    row += list(rho) + [None] * (lags - len(rho))
    return {"describe.csv": to_csv(header, [row])}


def run_ingest(s):
    return {f"{s.name}.csv": format_annual_csv(s)}


def run_breaks(s, min_seg=0.15, kmax=5, alpha=0.01, nperm=1000, seed=0,
               iterations=550, burnin=50, p0=0.2, w0=0.2, bh_threshold=0.5, prefix=""):
    s = prepare(s)
    bp = bai_perron(s, min_seg, kmax)
    vo = cbs(s, alpha=alpha, n_perm=nperm, seed=seed)
    bh = barry_hartigan(s, iterations=iterations, burnin=burnin, p0=p0, w0=w0, seed=seed)
    rows = []
    for year in bp.break_years:
        rows.append(["BP", year, None, bp.bic_by_k[bp.chosen_k]])
    for year, p in zip(vo.changepoints, vo.p_values):
        rows.append(["CBS", year, p, None])
    for year, prob in zip(bh.years, bh.change_prob):
        if prob >= bh_threshold:
            rows.append(["BH", year, None, prob])
    years = s.years
    per_year = to_csv(
        ["year", "value", "posterior_mean", "change_prob"],
        zip(years, s.values, bh.posterior_mean, bh.change_prob),
    )
    top = svg.Panel(title=f"{s.name}: series and posterior mean", ylabel=s.unit)
    top.line(years, s.values, "data", style=5)
    top.line(years, bh.posterior_mean, "posterior mean", style=0)
    edges = [0] + [b + 1 for b in bp.break_indices] + [len(s)]
    fitted = np.repeat(bp.segment_means, np.diff(edges))
    top.line(years, fitted, "BP segment means", style=1)
    bottom = svg.Panel(title="posterior probability of a change", ylim=(0.0, 1.0))
    bottom.bars(years, bh.change_prob, "change probability", style=1)
    figure = svg.render([top, bottom], title=f"Change points: {s.name}")
    return {
        f"{prefix}breaks.csv": to_csv(["method", "break_year", "p_value", "criterion"], rows),
        f"{prefix}bcp.csv": per_year,
        f"{prefix}breaks.svg": figure,
    }


def paper_windows(s):
    """The four sub-periods of the dependence table, clipped to the data."""
    cands = [
        (1701, 1900),
        (1701, s.last_year),
        (s.first_year, 1700),
        (s.first_year, 1900),
    ]
    out = []
    for lo, hi in cands:
        lo, hi = max(lo, s.first_year), min(hi, s.last_year)
        if hi - lo + 1 >= 30 and (lo, hi) not in out:
            out.append((lo, hi))
    return out


def run_mds(s, windows=None, bootstrap=500, seed=0, nonlin=False, max_lag=None,
            recheck=False, multiplier="normal", prefix=""):
    s = prepare(s)
    windows = windows or [(s.first_year, s.last_year)]
    tests = ["Q", "AVR", "SPEC"] + (["NONLIN"] if nonlin else [])
    rows = []
    for lo, hi in windows:
        sub = window(s, lo, hi)
        for test in tests:
            kw = {"bootstrap_reps": bootstrap, "seed": seed, "max_lag_bound": max_lag,
                  "multiplier": multiplier}
            rep = run_test(test, sub, **kw)
            rows.append([lo, hi, test, "data", rep.statistic, rep.chosen_lag, rep.p_value])
            if recheck and test != "NONLIN":
                rr = residual_recheck(sub, test, **kw)
                rows.append([lo, hi, test, "ar1_residuals", rr.statistic, rr.chosen_lag, rr.p_value])
    header = ["from_year", "to_year", "test", "input", "statistic", "chosen_lag", "p_value"]
    return {f"{prefix}mds.csv": to_csv(header, rows)}


def run_ar1(s, prefix=""):
    fit = ar1_trend_fit(prepare(s))
    rows = [
        [name, coef, se, p]
        for name, coef, se, p in zip(fit.names, fit.coefficients, fit.std_errors, fit.p_values)
    ]
    rows += [["rmse", fit.rmse, None, None], ["r2", fit.r2, None, None], ["n", fit.n, None, None]]
    return {f"{prefix}ar1.csv": to_csv(["term", "estimate", "std_error", "p_value"], rows)}


def run_anova(s, block_len=50, iterations=10000, burnin=2500, seed=0, chains=3,
              end_year=None, prefix="", name="anova"):
    s = prepare(s)
    if end_year is not None and end_year < s.last_year:
        s = window(s, s.first_year, end_year)
    s = demean(s)
    posts, psrf = anova_chains(s, n_chains=chains, block_len=block_len,
                               iterations=iterations, burnin=burnin, seed=seed)
    pooled = posts[0]
    if chains > 1:
        pooled = type(pooled)(
            alpha_draws=np.vstack([p.alpha_draws for p in posts]),
            mu_draws=np.concatenate([p.mu_draws for p in posts]),
            sigma_w_draws=np.concatenate([p.sigma_w_draws for p in posts]),
            sigma_b_draws=np.concatenate([p.sigma_b_draws for p in posts]),
            icc_draws=np.concatenate([p.icc_draws for p in posts]),
            block_len=block_len,
            block_starts=pooled.block_starts,
        )
    summ = icc_summary(pooled)
    rows = []
    for key in ("icc", "sigma_w", "sigma_b"):
        d = summ[key]
        rows.append([key, None, d["median"], d["ci95_low"], d["ci95_high"], psrf.get(key)])
    starts = s.first_year + pooled.block_starts
    for start, d in zip(starts, summ["alpha"]):
        rows.append(["alpha", start, d["median"], d["ci95_low"], d["ci95_high"], None])
    table = to_csv(["parameter", "block_start", "median", "ci95_low", "ci95_high", "psrf"], rows)
    panel = svg.Panel(title=f"{s.name}: block means, 95% intervals")
    mid = starts + block_len / 2.0
    panel.errorbars(mid, [d["median"] for d in summ["alpha"]],
                    [d["ci95_low"] for d in summ["alpha"]],
                    [d["ci95_high"] for d in summ["alpha"]], "block effect")
    figure = svg.render([panel], title=f"One-way ANOVA by {block_len}-year blocks")
    return {f"{prefix}{name}.csv": table, f"{prefix}{name}.svg": figure}


def run_smooth(s, windows=(30,), span=1 / 3, prefix=""):
    s = prepare(s)
    cols = {"year": s.years, "value": s.values}
    panel = svg.Panel(title=f"{s.name}: smoothed")
    panel.line(s.years, s.values, "data", style=5)
    for k, m in enumerate(windows):
        ma = moving_average(s, m)
        cols[f"ma{m}"] = ma.values
        panel.line(s.years, ma.values, f"MA({m})", style=k)
    lo = loess_smooth(s, span)
    cols["loess"] = lo.values
    panel.line(s.years, lo.values, f"loess({span:.3g})", style=len(windows))
    table = to_csv(list(cols), zip(*cols.values()))
    return {f"{prefix}smooth.csv": table, f"{prefix}smooth.svg": svg.render([panel])}


def run_slutsky(n=500, seed=123, windows=(10, 25), span=1 / 3, transfer_m=(10, 25, 30, 50)):
    demo = slutsky_demo(n=n, seed=seed, windows=windows, span=span)
    cols = demo.columns()
    table = to_csv(list(cols), zip(*cols.values()))
    panel = svg.Panel(title=f"{n} standard normal draws, seed {demo.seed}")
    panel.points(demo.years, demo.raw, style=5)
    for k, m in enumerate(windows):
        panel.line(demo.years, demo.smooths[m], f"MA({m})", style=k)
    panel.line(demo.years, demo.loess, "loess", style=len(windows))
    panel.line(demo.years, demo.bh_mean, "BH posterior mean", style=len(windows) + 1)
    rows = []
    for m in transfer_m:
        omega, gain, period = ma_transfer_peak(m)
        rows.append([m, omega, gain, period])
    return {
        "slutsky.csv": table,
        "slutsky.svg": svg.render([panel], title="Smoothing white noise"),
        "transfer.csv": to_csv(["m", "omega_peak", "gain", "period"], rows),
    }


def run_power_table(scenarios=None, replicates=1000, seed=2014):
    """Detection rates for the given ``(label, scenario, published)`` list."""
    if scenarios is None:
        scenarios = paper_scenarios(replicates=replicates, seed=seed)
    rows = []
    for label, sc, published in scenarios:
        res = run_power(sc)
        rows.append([label, sc.detector, sc.n, sc.replicates, sc.seed,
                     res.detection_rate, res.mc_stderr, published])
    header = ["scenario", "detector", "n", "replicates", "seed", "detection_rate", "mc_stderr", "published"]
    return {"power.csv": to_csv(header, rows)}
