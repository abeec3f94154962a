"""Barry-Hartigan product partition model fitted by Gibbs sampling.

Given a partition of the series into contiguous blocks, observations are
normal around block means, the block means are normal around a common
level, and the signal ratio ``w = sigma^2 / (sigma^2 + sigma_0^2)`` and
the change probability ``p`` have uniform priors on ``(0, w0]`` and
``(0, p0]``. Each sweep visits every boundary indicator in turn and draws
it from its conditional odds, in which ``p``, ``w``, the block means and
the noise variance are integrated out analytically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._kernels import bcp_gibbs
from ..data import AnnualSeries
from ..errors import IcebreakerError
from ..rng import rng_stream, seed_from, uniforms


@dataclass
class BcpResult:
    posterior_mean: np.ndarray
    change_prob: np.ndarray
    iterations: int
    burnin: int
    p0: float
    w0: float
    first_year: int = 0
    w_mean: float = float("nan")

    @property
    def years(self):
        return np.arange(self.first_year, self.first_year + self.posterior_mean.size)

    def max_prob_near(self, index, radius=10):
        """Largest change probability within ``radius`` positions of ``index``."""
        lo = max(index - radius, 0)
        hi = min(index + radius + 1, self.change_prob.size)
        return float(self.change_prob[lo:hi].max())


def barry_hartigan(s, iterations=550, burnin=50, p0=0.2, w0=0.2, seed=0):
    """Posterior level and change probabilities under the product
    partition model.

    Parameters
    ----------
    s : AnnualSeries or array_like
        Complete series of length at least 4.
    iterations : int
        Total sweeps, including the ``burnin`` sweeps that are discarded.
    p0, w0 : float
        Upper limits of the uniform priors on the change probability and
        the signal-to-noise ratio.
    seed : int

    Returns
    -------
    BcpResult
        ``change_prob[t]`` is the posterior probability of a change
        between positions ``t`` and ``t + 1`` (zero for the last one).
    """
    if isinstance(s, AnnualSeries):
        y, first_year = s.complete(), s.first_year
    else:
        y, first_year = np.asarray(s, dtype=float), 0
    n = y.size
    if n < 4:
        raise IcebreakerError("Barry-Hartigan needs at least 4 observations")
    if not 0 <= burnin < iterations:
        raise IcebreakerError("need 0 <= burnin < iterations")
    if not (0 < p0 <= 1 and 0 < w0 <= 1):
        raise IcebreakerError("p0 and w0 must lie in (0, 1]")
    if np.ptp(y) == 0.0:
        return BcpResult(
            posterior_mean=y.copy(),
            change_prob=np.zeros(n),
            iterations=iterations,
            burnin=burnin,
            p0=p0,
            w0=w0,
            first_year=first_year,
        )
    center = y.mean()
    gen = rng_stream(seed_from(seed), 0)
    unif = uniforms(gen, (iterations, n - 1))
    mean, prob, wbar = bcp_gibbs(y - center, unif, burnin, float(p0), float(w0))
    # keep the posterior level inside the data hull despite rounding
    mean = np.clip(mean + center, y.min(), y.max())
    return BcpResult(
        posterior_mean=mean,
        change_prob=prob,
        iterations=iterations,
        burnin=burnin,
        p0=p0,
        w0=w0,
        first_year=first_year,
        w_mean=float(wbar),
    )
