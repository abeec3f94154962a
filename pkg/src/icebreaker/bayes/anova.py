"""One-way random-effects ANOVA over fixed-length blocks of years.

Model::

    y_ij ~ N(alpha_j, sigma_w^2)
    alpha_j ~ N(mu, sigma_b^2)
    mu ~ N(0, 10000),  sigma_b ~ U[0, 20],  sigma_w ~ U[0, 20]

Block means and ``mu`` are drawn from their normal full conditionals; the
two standard deviations by slice sampling inside their uniform support.
Reported block effects are recentred to sum to zero in every draw.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import AnnualSeries
from ..errors import IcebreakerError
from ..rng import normals, rng_stream, seed_from
from .diagnostics import gelman_rubin

SIGMA_MAX = 20.0
MU_PRIOR_VAR = 10000.0


@dataclass
class AnovaPosterior:
    alpha_draws: np.ndarray
    mu_draws: np.ndarray
    sigma_w_draws: np.ndarray
    sigma_b_draws: np.ndarray
    icc_draws: np.ndarray
    block_len: int
    block_starts: np.ndarray = None

    @property
    def n_draws(self):
        return self.icc_draws.size


def _slice_sigma(sigma, count, ss, gen):
    # target: sigma^-count * exp(-ss / (2 sigma^2)) on (0, SIGMA_MAX]
    def logp(s):
        return -count * np.log(s) - ss / (2.0 * s * s)

    level = logp(sigma) - gen.exponential()
    lo, hi = 0.0, SIGMA_MAX
    while True:
        prop = lo + (hi - lo) * gen.random()
        if prop > 0.0 and logp(prop) > level:
            return prop
        if prop < sigma:
            lo = prop
        else:
            hi = prop
        if hi - lo < 1e-12:
            return sigma


def _blocks(y, block_len):
    n = y.size
    labels = np.arange(n) // block_len
    n_blocks = labels[-1] + 1
    counts = np.bincount(labels, minlength=n_blocks).astype(float)
    sums = np.bincount(labels, weights=y, minlength=n_blocks)
    return labels, counts, sums


def _chain(y, block_len, iterations, burnin, gen):
    labels, counts, sums = _blocks(y, block_len)
    J = counts.size
    means = sums / counts
    alpha = means.copy()
    mu = float(y.mean())
    sigma_w = float(np.clip(y.std(ddof=1), 1e-3, SIGMA_MAX * 0.99))
    sigma_b = float(np.clip(means.std(ddof=1), 1e-2, SIGMA_MAX * 0.99))

    kept = iterations - burnin
    out_alpha = np.empty((kept, J))
    out = np.empty((4, kept))
    for it in range(iterations):
        prec = counts / sigma_w**2 + 1.0 / sigma_b**2
        centre = (sums / sigma_w**2 + mu / sigma_b**2) / prec
        alpha = centre + normals(gen, J) / np.sqrt(prec)

        prec_mu = J / sigma_b**2 + 1.0 / MU_PRIOR_VAR
        mu = alpha.sum() / sigma_b**2 / prec_mu + normals(gen, 1)[0] / np.sqrt(prec_mu)

        resid = y - alpha[labels]
        sigma_w = _slice_sigma(sigma_w, y.size, float(resid @ resid), gen)
        dev = alpha - mu
        sigma_b = _slice_sigma(sigma_b, J, float(dev @ dev), gen)

        if it >= burnin:
            k = it - burnin
            out_alpha[k] = alpha - alpha.mean()
            out[0, k] = mu
            out[1, k] = sigma_w
            out[2, k] = sigma_b
            out[3, k] = sigma_b**2 / (sigma_b**2 + sigma_w**2)
    return out_alpha, out


def hierarchical_anova(s, block_len=50, iterations=10000, burnin=2500, seed=0, chain=0):
    """Posterior draws for block effects, within/between SDs and the ICC.

    Parameters
    ----------
    s : AnnualSeries or array_like
        Demeaned complete series.
    block_len : int
        Years per block; a shorter trailing block is kept.
    iterations, burnin : int
        Total iterations and the number discarded.
    seed, chain : int
        Master seed and chain number of the random stream.
    """
    y = s.complete() if isinstance(s, AnnualSeries) else np.asarray(s, dtype=float)
    if block_len < 1:
        raise IcebreakerError("block_len must be positive")
    if y.size <= block_len:
        raise IcebreakerError("need at least two blocks")
    if not 0 <= burnin < iterations:
        raise IcebreakerError("need 0 <= burnin < iterations")
    gen = rng_stream(seed_from(seed), 1, chain)
    alpha, out = _chain(y, block_len, iterations, burnin, gen)
    return AnovaPosterior(
        alpha_draws=alpha,
        mu_draws=out[0],
        sigma_w_draws=out[1],
        sigma_b_draws=out[2],
        icc_draws=out[3],
        block_len=block_len,
        block_starts=np.arange(0, y.size, block_len),
    )


def anova_chains(s, n_chains=3, **kw):
    """Run independent chains; returns the posteriors and PSRF per scalar
    parameter."""
    posts = [hierarchical_anova(s, chain=c, **kw) for c in range(n_chains)]
    psrf = {
        name: gelman_rubin([getattr(p, f"{name}_draws") for p in posts])
        for name in ("sigma_w", "sigma_b", "icc", "mu")
    }
    return posts, psrf


def _summ(draws):
    lo, med, hi = np.quantile(draws, [0.025, 0.5, 0.975])
    return {"median": float(med), "ci95_low": float(lo), "ci95_high": float(hi)}


def icc_summary(a):
    """Medians and equal-tailed 95% intervals of the ANOVA posterior."""
    if a.n_draws < 100:
        raise IcebreakerError("need at least 100 retained draws")
    icc = np.asarray(a.icc_draws)
    if np.any(icc < 0) or np.any(icc > 1):
        raise IcebreakerError("ICC draws outside [0, 1]")
    for name in ("sigma_w_draws", "sigma_b_draws"):
        d = np.asarray(getattr(a, name))
        if np.any(d < 0) or np.any(d > SIGMA_MAX):
            raise IcebreakerError(f"{name} outside prior support [0, {SIGMA_MAX}]")
    out = {
        "icc": _summ(icc),
        "sigma_w": _summ(a.sigma_w_draws),
        "sigma_b": _summ(a.sigma_b_draws),
        "alpha": [_summ(col) for col in np.asarray(a.alpha_draws).T],
    }
    return out
