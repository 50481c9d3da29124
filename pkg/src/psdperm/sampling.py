"""Seeded complex-normal sampling.

Streams are Philox counter generators keyed by ``(seed, stream)``, so parallel
workers that use distinct stream indices draw independent, reproducible
sequences. Complex normals come from the polar Box-Muller transform: with
``u1, u2`` uniform, ``sqrt(-ln u1) * exp(2 pi i u2)`` has independent real and
imaginary parts of variance 1/2.
"""

import numpy as np

DEFAULT_SEED = 20170507


def make_rng(seed=DEFAULT_SEED, stream=0):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def sample_cnormal(dim, rng, size=None):
    """Draw standard complex normal vectors CN(0, I).

    Parameters
    ----------
    dim : int
        Vector dimension.
    rng : numpy.random.Generator
        Stream from :func:`make_rng` (any Generator works).
    size : int, optional
        Number of vectors. When given the result has shape ``(size, dim)``.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    shape = (dim,) if size is None else (int(size), dim)
    # interleaved pairs keep the stream independent of how draws are batched
    u = rng.random(shape + (2,))
    u1 = 1.0 - u[..., 0]  # in (0, 1]
    u2 = u[..., 1]
    return np.sqrt(-np.log(u1)) * np.exp(2j * np.pi * u2)
