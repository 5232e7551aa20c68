"""Pure-numpy kernels.

Every function here has a twin in ``numba_impl`` with the same signature and
the same floating-point evaluation order, so the two backends agree bit for
bit on integer outputs and on every decision derived from the float ones.
"""
import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = (np.uint64(k) for k in (30, 27, 31, 11))
_UNIT = 2.0 ** -53


def _mix(z):
    z = (z ^ (z >> _S30)) * MIX1
    z = (z ^ (z >> _S27)) * MIX2
    return z ^ (z >> _S31)


def splitmix64(x):
    """First SplitMix64 output for state ``x`` (elementwise, wrapping uint64)."""
    z = np.atleast_1d(np.asarray(x, dtype=np.uint64))
    with np.errstate(over="ignore"):
        return _mix(z + GAMMA)


def uniforms(keys, count):
    """``count`` doubles in [0, 1) per key: the SplitMix64 stream seeded by the key."""
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    with np.errstate(over="ignore"):
        steps = np.arange(1, count + 1, dtype=np.uint64) * GAMMA
        out = _mix(keys[:, None] + steps[None, :])
    return (out >> _S11).astype(np.float64) * _UNIT


def _pick(rows, u):
    # rows hold inclusive cumulative sums whose last positive entry is exactly 1
    idx = (rows <= u[:, None]).sum(axis=1)
    return np.minimum(idx, rows.shape[1] - 1)


def sample_chain(u, comp, init_cum, trans_cum):
    """Draw state sequences from per-component (time-varying) Markov chains.

    ``u`` is (N, n); ``init_cum`` is (K, S); ``trans_cum`` is (K, n-1, S, S).
    """
    N, n = u.shape
    out = np.empty((N, n), dtype=np.int64)
    if n == 0:
        return out
    out[:, 0] = _pick(init_cum[comp], u[:, 0])
    for i in range(1, n):
        out[:, i] = _pick(trans_cum[comp, i - 1, out[:, i - 1]], u[:, i])
    return out


def sample_given(u, comp, x, cum):
    """Draw outputs position by position from ``cum[comp, i, x_i]``."""
    N, n = u.shape
    out = np.empty((N, n), dtype=np.int64)
    for i in range(n):
        out[:, i] = _pick(cum[comp, i, x[:, i]], u[:, i])
    return out


def _mixture_scores(parts, logw):
    # parts: (K, ...) per-component log-likelihoods
    K = parts.shape[0]
    if K == 1:
        return parts[0]
    vals = logw.reshape((K,) + (1,) * (parts.ndim - 1)) + parts
    m = vals.max(axis=0)
    acc = np.zeros_like(m)
    finite = m > -np.inf
    shift = np.where(finite, m, 0.0)
    for k in range(K):
        acc += np.exp(vals[k] - shift)
    with np.errstate(divide="ignore"):
        return np.where(finite, shift + np.log(acc), -np.inf)


def _choose(scores, u, rtol):
    mask = _tied(scores, rtol)
    counts = mask.sum(axis=1)
    j = np.minimum((u * counts).astype(np.int64), counts - 1)
    cs = np.cumsum(mask, axis=1)
    return np.argmax(cs > j[:, None], axis=1)


def _tied(scores, rtol):
    best = scores.max(axis=1)
    thr = best - rtol * np.maximum(1.0, np.abs(best))
    return scores >= thr[:, None]


def _errors(scores, truth, u, rtol, ties_as_errors):
    # truth: column index of the correct candidate in each row
    if ties_as_errors:
        mask = _tied(scores, rtol)
        rows = np.arange(scores.shape[0])
        return ~mask[rows, truth] | (mask.sum(axis=1) > 1)
    return _choose(scores, u, rtol) != truth


def ml_decode(codebooks, book, ys, sent, u_tie, logW, logv, rtol, ties_as_errors=False):
    """Maximum-likelihood decoding; ties broken uniformly by ``u_tie``.

    ``codebooks`` is (B, M, n) and received word ``t`` was sent with
    ``codebooks[book[t]]``. With ``ties_as_errors`` any tie involving the sent
    codeword is an error. Returns a boolean error flag per received word.
    """
    K, n = logW.shape[0], logW.shape[1]
    T, M = ys.shape[0], codebooks.shape[1]
    words = codebooks[book]
    parts = np.zeros((K, T, M))
    for i in range(n):
        parts += logW[:, i][:, words[:, :, i], ys[:, i][:, None]]
    scores = _mixture_scores(parts, logv)
    return _errors(scores, sent, u_tie, rtol, ties_as_errors)


def map_decode(bin_ptr, members, bin_of, x_rank, ys, u_tie, logP, logw, xsize, rtol,
               ties_as_errors=False):
    """MAP decoding of a binned sequence given side information."""
    K, n = logP.shape[0], logP.shape[1]
    powers = xsize ** np.arange(n - 1, -1, -1, dtype=np.int64)
    errors = np.empty(x_rank.shape[0], dtype=np.bool_)
    for t in range(x_rank.shape[0]):
        b = bin_of[x_rank[t]]
        cand = members[bin_ptr[b]:bin_ptr[b + 1]]
        digits = (cand[:, None] // powers[None, :]) % xsize
        parts = np.zeros((K, 1, cand.shape[0]))
        for i in range(n):
            parts[:, 0] += logP[:, i][:, digits[:, i], ys[t, i]]
        scores = _mixture_scores(parts, logw)
        truth = np.searchsorted(cand, x_rank[t])
        errors[t] = _errors(scores, np.array([truth]), u_tie[t:t + 1], rtol, ties_as_errors)[0]
    return errors
