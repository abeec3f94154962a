"""Deterministic random streams.

Every stochastic routine derives its generator from a master seed plus an
integer key path, so results do not depend on execution order. Normal
variates come from the inverse CDF of PCG64 uniforms rather than from
numpy's ziggurat, which keeps the mapping from seed to draws a plain
composition of documented pieces.
"""

import numpy as np
from scipy.special import ndtri

_HALF_ULP = 2.0 ** -54


def rng_stream(master_seed, *stream_index):
    """Return a ``numpy.random.Generator`` for ``(master_seed, index...)``.

    Distinct index paths give statistically independent PCG64 streams.
    """
    key = tuple(int(i) for i in stream_index)
    ss = np.random.SeedSequence(int(master_seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def uniforms(gen, size):
    """Uniforms on the open interval (0, 1)."""
    return gen.random(size) + _HALF_ULP


def normals(gen, size, loc=0.0, scale=1.0):
    """Normal variates by inverse-CDF transform of :func:`uniforms`."""
    z = ndtri(uniforms(gen, size))
    if loc == 0.0 and scale == 1.0:
        return z
    return loc + scale * z


def seed_from(seed):
    """Normalise ``None`` to a fixed default so every run is reproducible."""
    return 0 if seed is None else int(seed)
