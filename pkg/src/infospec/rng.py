"""Counter-based random streams.

A stream is a 64-bit key; its j-th uniform is the j-th output of SplitMix64
seeded with that key. Keys are derived from a user seed and a tuple of
indices (sample, codebook, trial, ...), so any partitioning of the work
across workers reproduces exactly the same draws.
"""
import numpy as np

from . import _kernels
from ._kernels.numpy_impl import splitmix64
from .errors import InputError

MAX_SEED = 2 ** 64 - 1


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise InputError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def derive_keys(seed, *indices):
    """Fold ``seed`` and broadcastable index arrays into a flat array of stream keys."""
    idx = [np.asarray(i, dtype=np.uint64) for i in indices]
    shape = np.broadcast_shapes(*[a.shape for a in idx]) if idx else ()
    key = np.full(max(1, int(np.prod(shape))), splitmix64(check_seed(seed))[0], dtype=np.uint64)
    for a in idx:
        key = splitmix64(key ^ np.broadcast_to(a, shape).ravel())
    return key


def stream_uniforms(keys, count):
    return _kernels.uniforms(np.asarray(keys, dtype=np.uint64), int(count))


def partition(total, chunk):
    """Fixed-size index ranges; boundaries never depend on the worker count."""
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]


def run_chunks(fn, ranges, workers=1):
    """Apply ``fn(lo, hi)`` to each range, returning results in range order."""
    workers = max(1, int(workers or 1))
    if workers == 1 or len(ranges) <= 1:
        return [fn(lo, hi) for lo, hi in ranges]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: fn(*r), ranges))
