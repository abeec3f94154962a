"""Compiled inner loops: circular segmentation statistics and the
product-partition Gibbs sampler."""

import math

import numpy as np
from numba import njit

# ---------------------------------------------------------------------------
# circular binary segmentation


@njit(cache=True)
def cbs_max_arc(x, min_width):
    """Largest standardized arc-versus-complement mean difference.

    Returns ``(stat, i, j)`` with the arc covering ``x[i:j]``. The statistic
    is ``|S_j - S_i| / sqrt(l (n - l) / n)`` on centred partial sums, i.e.
    unscaled by the noise level.
    """
    n = x.shape[0]
    s = np.empty(n + 1)
    s[0] = 0.0
    mean = 0.0
    for k in range(n):
        mean += x[k]
    mean /= n
    for k in range(n):
        s[k + 1] = s[k] + (x[k] - mean)
    best = -1.0
    bi = 0
    bj = n
    for i in range(n):
        si = s[i]
        jmax = min(n, i + n - min_width)
        for j in range(i + min_width, jmax + 1):
            l = j - i
            d = s[j] - si
            z = d * d * n / (l * (n - l))
            if z > best:
                best = z
                bi = i
                bj = j
    if best < 0.0:
        return 0.0, 0, n
    return math.sqrt(best), bi, bj


@njit(cache=True)
def cbs_max_batch(xs, min_width):
    out = np.empty(xs.shape[0])
    for r in range(xs.shape[0]):
        out[r] = cbs_max_arc(xs[r], min_width)[0]
    return out


# ---------------------------------------------------------------------------
# incomplete beta in log space


@njit(cache=True)
def _lbeta(a, b):
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


@njit(cache=True)
def _betacf(a, b, x):
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 1000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h


@njit(cache=True)
def log_betainc(a, b, x):
    """log of the regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return -np.inf
    if x >= 1.0:
        return 0.0
    lfront = a * math.log(x) + b * math.log1p(-x) - _lbeta(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        return lfront + math.log(_betacf(a, b, x)) - math.log(a)
    tail = math.exp(lfront + math.log(_betacf(b, a, 1.0 - x)) - math.log(b))
    if tail >= 1.0:
        return -745.0
    return math.log1p(-tail)


@njit(cache=True)
def log_beta_integral(p_exp, q_exp, upper):
    """log of int_0^upper p^p_exp (1 - p)^q_exp dp."""
    return _lbeta(p_exp + 1.0, q_exp + 1.0) + log_betainc(p_exp + 1.0, q_exp + 1.0, upper)


@njit(cache=True)
def _log_t_integral(a, c, t0):
    # log int_0^t0 t^a (1 + t)^(-c) dt, Simpson in s = log t where the
    # integrand exp((a + 1) s) (1 + e^s)^(-c) is smooth
    hi = math.log(t0)
    lo = min(hi, 0.0) - 60.0 / (a + 1.0)
    m = 4000
    h = (hi - lo) / m
    vals = np.empty(m + 1)
    top = -np.inf
    for k in range(m + 1):
        s = lo + k * h
        sp = s + math.log1p(math.exp(-s)) if s > 0.0 else math.log1p(math.exp(s))
        vals[k] = (a + 1.0) * s - c * sp
        if vals[k] > top:
            top = vals[k]
    acc = 0.0
    for k in range(m + 1):
        wgt = 1.0 if (k == 0 or k == m) else (4.0 if k % 2 == 1 else 2.0)
        acc += wgt * math.exp(vals[k] - top)
    return top + math.log(acc * h / 3.0)


@njit(cache=True)
def log_w_integral(a, c, W, B, w0):
    """log of int_0^w0 w^a (W + B w)^(-c) dw for W > 0, B >= 0."""
    if B * w0 <= 1e-15 * W:
        return -c * math.log(W) + (a + 1.0) * math.log(w0) - math.log(a + 1.0)
    u0 = B * w0 / (W + B * w0)
    front = (a + 1.0 - c) * math.log(W) - (a + 1.0) * math.log(B)
    bb = c - a - 1.0
    if bb > 0.0:
        return front + _lbeta(a + 1.0, bb) + log_betainc(a + 1.0, bb, u0)
    # substitute t = B w / W
    return front + _log_t_integral(a, c, B * w0 / W)


# ---------------------------------------------------------------------------
# product partition Gibbs sampler


@njit(cache=True)
def _block(cs, cs2, lo, hi):
    # within and between sums of squares of x[lo..hi] (inclusive), mean 0
    m = hi - lo + 1
    s = cs[hi + 1] - cs[lo]
    ss = cs2[hi + 1] - cs2[lo]
    mean = s / m
    within = ss - s * mean
    if within < 0.0:
        within = 0.0
    return within, m * mean * mean


@njit(cache=True)
def bcp_gibbs(x, unif, burnin, p0, w0):
    """Barry-Hartigan sampler on a centred series.

    ``unif`` has one row per sweep and ``n - 1`` columns. Returns the
    posterior mean of the level, the change-probability per position
    (position ``i`` meaning a change between ``i`` and ``i + 1``), and the
    posterior mean of the signal ratio ``w``.
    """
    n = x.shape[0]
    sweeps = unif.shape[0]
    cs = np.zeros(n + 1)
    cs2 = np.zeros(n + 1)
    for k in range(n):
        cs[k + 1] = cs[k] + x[k]
        cs2[k + 1] = cs2[k] + x[k] * x[k]
    wfloor = 1e-12 * cs2[n] + 1e-300
    c = (n - 1) / 2.0

    lp = np.empty(n + 2)
    for b in range(1, n + 1):
        lp[b] = log_beta_integral(b - 1.0, n - b + 0.0, p0)

    U = np.zeros(n - 1, dtype=np.int64)
    ends = np.empty(n, dtype=np.int64)
    mean_acc = np.zeros(n)
    prob_acc = np.zeros(n)
    w_acc = 0.0
    kept = 0

    for sweep in range(sweeps):
        # fresh totals each sweep keep rounding drift out
        W = 0.0
        B = 0.0
        nblocks = 1
        lo = 0
        for k in range(n - 1):
            if U[k] == 1:
                wi, bi = _block(cs, cs2, lo, k)
                W += wi
                B += bi
                lo = k + 1
                nblocks += 1
        wi, bi = _block(cs, cs2, lo, n - 1)
        W += wi
        B += bi

        ends[n - 1] = n - 1
        for k in range(n - 2, -1, -1):
            ends[k] = k if U[k] == 1 else ends[k + 1]

        L = 0
        for i in range(n - 1):
            R = ends[i + 1]
            wm, bm = _block(cs, cs2, L, R)
            wl, bl = _block(cs, cs2, L, i)
            wr, br = _block(cs, cs2, i + 1, R)
            if U[i] == 1:
                W_rest = W - wl - wr
                B_rest = B - bl - br
                b0 = nblocks - 1
            else:
                W_rest = W - wm
                B_rest = B - bm
                b0 = nblocks
            W0 = max(W_rest + wm, wfloor)
            B0 = max(B_rest + bm, 0.0)
            W1 = max(W_rest + wl + wr, wfloor)
            B1 = max(B_rest + bl + br, 0.0)
            log_odds = (
                lp[b0 + 1]
                - lp[b0]
                + log_w_integral(b0 / 2.0, c, W1, B1, w0)
                - log_w_integral((b0 - 1.0) / 2.0, c, W0, B0, w0)
            )
            if log_odds > 0:
                prob = 1.0 / (1.0 + math.exp(-log_odds))
            else:
                e = math.exp(log_odds)
                prob = e / (1.0 + e)
            if unif[sweep, i] < prob:
                U[i] = 1
                W = W1
                B = B1
                nblocks = b0 + 1
                L = i + 1
            else:
                U[i] = 0
                W = W0
                B = B0
                nblocks = b0

        if sweep >= burnin:
            kept += 1
            a = (nblocks - 1) / 2.0
            Wc = max(W, wfloor)
            wbar = math.exp(
                log_w_integral(a + 1.0, c, Wc, B, w0) - log_w_integral(a, c, Wc, B, w0)
            )
            w_acc += wbar
            lo = 0
            for k in range(n):
                if k == n - 1 or U[k] == 1:
                    m = k - lo + 1
                    bmean = (cs[k + 1] - cs[lo]) / m
                    level = (1.0 - wbar) * bmean
                    for t in range(lo, k + 1):
                        mean_acc[t] += level
                    if k < n - 1:
                        prob_acc[k] += 1.0
                    lo = k + 1

    if kept == 0:
        kept = 1
    return mean_acc / kept, prob_acc / kept, w_acc / kept
