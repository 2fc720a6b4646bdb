"""Seeded random matrices used by the generators, harnesses and tests."""
import numpy as np


def rng_from(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(rng, rows, cols=None, real=False):
    cols = rows if cols is None else cols
    g = rng.standard_normal((rows, cols))
    if not real:
        g = g + 1j * rng.standard_normal((rows, cols))
    return g


def random_psd(rng, d, rank=None, trace=None, real=False):
    """Random PSD matrix ``G G^dagger`` of the given rank (full by default)."""
    rank = d if rank is None else rank
    g = ginibre(rng, d, rank, real=real)
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    if trace is not None:
        m = m * (trace / np.trace(m).real)
    return m


def random_unitary(rng, d):
    q, r = np.linalg.qr(ginibre(rng, d))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_invertible(rng, d, real=False, max_cond=1e3):
    """Gaussian matrix resampled until its condition number is at most ``max_cond``."""
    while True:
        g = ginibre(rng, d, real=real)
        if np.linalg.cond(g) <= max_cond:
            return g


def random_unit_vector(rng, d):
    v = ginibre(rng, d, 1)[:, 0]
    return v / np.linalg.norm(v)
