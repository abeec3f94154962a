import numpy as np

from ..errors import IcebreakerError


def gelman_rubin(chains):
    """Potential scale reduction factor of several equal-length chains.

    ``sqrt(((n - 1) / n * W + B / n) / W)`` with ``W`` the mean within-chain
    variance and ``B`` equal to ``n`` times the variance of the chain
    means.
    """
    x = np.asarray(chains, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise IcebreakerError("need at least two chains of equal length")
    m, n = x.shape
    if n < 10:
        raise IcebreakerError("chains must have at least 10 draws")
    W = x.var(axis=1, ddof=1).mean()
    if W <= 0:
        raise IcebreakerError("within-chain variance is zero; chains are degenerate")
    B = n * x.mean(axis=1).var(ddof=1)
    return float(np.sqrt(((n - 1) / n * W + B / n) / W))
