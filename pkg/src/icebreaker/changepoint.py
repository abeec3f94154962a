"""Classical change-point detection for shifts in the mean.

Two detectors are provided:

``bai_perron``
    globally optimal partitions for 0..k_max breaks by dynamic programming
    over segment sums of squares, with the number of breaks chosen by BIC.
``cbs``
    circular binary segmentation: recursive search for the arc of a
    circularised segment whose mean differs most from the rest, judged by
    a permutation test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import cbs_max_arc, cbs_max_batch
from .data import AnnualSeries
from .errors import IcebreakerError
from .rng import rng_stream, seed_from


@dataclass
class BreakModel:
    break_indices: list
    break_years: list
    segment_means: list
    ssr_by_k: np.ndarray
    bic_by_k: np.ndarray
    chosen_k: int
    min_segment: int = 0
    partitions: dict = field(default_factory=dict)

    @property
    def n_breaks(self):
        return len(self.break_indices)


@dataclass
class CbsResult:
    changepoints: list
    p_values: list
    alpha: float
    n_perm: int
    change_indices: list = field(default_factory=list)
    statistics: list = field(default_factory=list)


def _as_array(s):
    if isinstance(s, AnnualSeries):
        return s.complete(), s.first_year
    return np.asarray(s, dtype=float), 0


def segment_cost_matrix(y, h):
    """``cost[i, j]`` = within sum of squares of ``y[i:j]``; ``inf`` when
    the segment is shorter than ``h``."""
    n = y.size
    d = y - y.mean()
    cs = np.concatenate([[0.0], np.cumsum(d)])
    cs2 = np.concatenate([[0.0], np.cumsum(d * d)])
    i = np.arange(n + 1)[:, None]
    j = np.arange(n + 1)[None, :]
    length = j - i
    with np.errstate(divide="ignore", invalid="ignore"):
        s = cs[j] - cs[i]
        cost = (cs2[j] - cs2[i]) - s * s / length
    cost = np.where(length >= h, np.maximum(cost, 0.0), np.inf)
    return cost


def optimal_partitions(y, h, k_max):
    """Minimal SSR partitions of ``y`` into ``k + 1`` segments of length
    at least ``h`` for ``k = 0..k_max``.

    Returns ``(ssr, breaks)`` where ``breaks[k]`` lists the last index of
    every segment but the final one. Ties go to the earliest break.
    """
    n = y.size
    cost = segment_cost_matrix(y, h)
    best = np.full((k_max + 1, n + 1), np.inf)
    arg = np.zeros((k_max + 1, n + 1), dtype=int)
    best[0] = cost[0]
    for k in range(1, k_max + 1):
        # best[k][j] = min_i best[k-1][i] + cost[i, j]
        total = best[k - 1][:, None] + cost
        arg[k] = np.argmin(total, axis=0)
        best[k] = total[arg[k], np.arange(n + 1)]
    ssr = best[:, n].copy()
    breaks = {}
    for k in range(k_max + 1):
        if not np.isfinite(ssr[k]):
            continue
        cuts = []
        j = n
        for kk in range(k, 0, -1):
            i = arg[kk][j]
            cuts.append(i)
            j = i
        breaks[k] = [c - 1 for c in reversed(cuts)]
    return ssr, breaks


def bai_perron(s, min_seg_frac=0.15, k_max=5):
    """Optimal mean-shift breakpoints with BIC selection.

    Parameters
    ----------
    s : AnnualSeries or array_like
        Complete series.
    min_seg_frac : float
        Minimum segment length as a fraction of T (rounded up).
    k_max : int
        Largest number of breaks considered; reduced when the minimum
        segment length makes it infeasible.

    Returns
    -------
    BreakModel
        ``bic_by_k[k] = T log(SSR_k / T) + (2k + 1) log T``.
    """
    y, first_year = _as_array(s)
    n = y.size
    h = max(int(math.ceil(min_seg_frac * n - 1e-9)), 1)
    if h < 2 or n < h:
        raise IcebreakerError(
            f"series of length {n} too short for minimum segment fraction {min_seg_frac}"
        )
    k_max = min(int(k_max), n // h - 1)
    ssr, breaks = optimal_partitions(y, h, max(k_max, 0))
    tss = ssr[0]
    ks = np.arange(k_max + 1)
    if tss <= 0.0:
        bic = np.where(ks == 0, -np.inf, np.inf)
        chosen = 0
    else:
        floor = tss * 1e-14
        bic = n * np.log(np.maximum(ssr, floor) / n) + (2 * ks + 1) * math.log(n)
        chosen = int(np.argmin(bic))
    idx = breaks[chosen]
    edges = [0] + [b + 1 for b in idx] + [n]
    means = [float(y[a:b].mean()) for a, b in zip(edges[:-1], edges[1:])]
    return BreakModel(
        break_indices=list(idx),
        break_years=[first_year + b for b in idx],
        segment_means=means,
        ssr_by_k=ssr,
        bic_by_k=bic,
        chosen_k=chosen,
        min_segment=h,
        partitions=breaks,
    )


def _perm_pvalue(x, observed, n_perm, alpha, gen, min_width, early_stop, batch=100):
    limit = alpha * n_perm
    exceed = 0
    done = 0
    tol = 1e-10 * max(observed, 1.0)
    base = np.tile(x, (batch, 1))
    while done < n_perm:
        m = min(batch, n_perm - done)
        perms = gen.permuted(base[:m], axis=1)
        stats = cbs_max_batch(perms, min_width)
        exceed += int(np.count_nonzero(stats >= observed - tol))
        done += m
        if early_stop and exceed > limit:
            break
    return exceed / n_perm


def cbs(s, alpha=0.01, n_perm=1000, seed=0, min_width=2, early_stop=False):
    """Circular binary segmentation with permutation p-values.

    Each segment is treated as a circle; the arc maximising the
    standardized difference between its mean and the mean of the
    complement is tested against ``n_perm`` random permutations of the
    segment. Significant splits (``p <= alpha``) are applied and the
    pieces searched again. Segments shorter than four are not tested.

    With ``early_stop`` the permutation loop ends as soon as the split can
    no longer be accepted. Accepted splits are unaffected, and every
    segment draws from its own stream keyed by its position, so the
    reported result is the same either way.
    """
    y, first_year = _as_array(s)
    n = y.size
    seed = seed_from(seed)
    found = []
    stack = [(0, n)]
    while stack:
        lo, hi = stack.pop()
        seg = y[lo:hi]
        m = seg.size
        if m < 4 or m < 2 * min_width or np.ptp(seg) == 0.0:
            continue
        stat, i, j = cbs_max_arc(seg, min_width)
        if stat <= 0.0:
            continue
        gen = rng_stream(seed, lo, hi)
        p = _perm_pvalue(seg, stat, n_perm, alpha, gen, min_width, early_stop)
        if p > alpha:
            continue
        tstat = stat / seg.std(ddof=1)
        cuts = [c for c in (i, j) if 0 < c < m]
        for c in cuts:
            found.append((lo + c - 1, p, tstat))
        edges = [0] + cuts + [m]
        for a, b in zip(edges[:-1], edges[1:]):
            stack.append((lo + a, lo + b))
    found.sort()
    return CbsResult(
        changepoints=[first_year + k for k, _, _ in found],
        p_values=[p for _, p, _ in found],
        alpha=alpha,
        n_perm=n_perm,
        change_indices=[k for k, _, _ in found],
        statistics=[t for _, _, t in found],
    )


def cbs_statistic(x, min_width=2):
    """Return ``(stat, i, j)`` for the best arc of ``x`` (no test)."""
    return cbs_max_arc(np.ascontiguousarray(x, dtype=float), min_width)
