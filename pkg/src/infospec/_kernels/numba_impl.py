"""numba-compiled kernels; loop-level twins of ``numpy_impl``."""
import math

import numpy as np
from numba import njit

GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S11 = np.uint64(11)
UNIT = 2.0 ** -53

_jit = njit(cache=True, nogil=True)


@_jit
def _mix(z):
    z = (z ^ (z >> S30)) * MIX1
    z = (z ^ (z >> S27)) * MIX2
    return z ^ (z >> S31)


@_jit
def _splitmix64(x):
    out = np.empty(x.shape[0], dtype=np.uint64)
    for i in range(x.shape[0]):
        out[i] = _mix(x[i] + GAMMA)
    return out


def splitmix64(x):
    return _splitmix64(np.atleast_1d(np.asarray(x, dtype=np.uint64)))


@_jit
def _uniforms(keys, count):
    N = keys.shape[0]
    out = np.empty((N, count), dtype=np.float64)
    for s in range(N):
        state = keys[s]
        for j in range(count):
            state = state + GAMMA
            out[s, j] = np.float64(_mix(state) >> S11) * UNIT
    return out


def uniforms(keys, count):
    return _uniforms(np.ascontiguousarray(keys, dtype=np.uint64), count)


@_jit
def _pick(row, u):
    S = row.shape[0]
    idx = 0
    for j in range(S):
        if row[j] <= u:
            idx += 1
    return min(idx, S - 1)


@_jit
def sample_chain(u, comp, init_cum, trans_cum):
    N, n = u.shape
    out = np.empty((N, n), dtype=np.int64)
    for s in range(N):
        if n == 0:
            continue
        k = comp[s]
        prev = _pick(init_cum[k], u[s, 0])
        out[s, 0] = prev
        for i in range(1, n):
            prev = _pick(trans_cum[k, i - 1, prev], u[s, i])
            out[s, i] = prev
    return out


@_jit
def sample_given(u, comp, x, cum):
    N, n = u.shape
    out = np.empty((N, n), dtype=np.int64)
    for s in range(N):
        k = comp[s]
        for i in range(n):
            out[s, i] = _pick(cum[k, i, x[s, i]], u[s, i])
    return out


@_jit
def _combine(parts, logw):
    K = parts.shape[0]
    if K == 1:
        return parts[0]
    m = -np.inf
    for k in range(K):
        v = logw[k] + parts[k]
        if v > m:
            m = v
    if m == -np.inf:
        return -np.inf
    acc = 0.0
    for k in range(K):
        acc += math.exp(logw[k] + parts[k] - m)
    return m + math.log(acc)


@_jit
def _choose(scores, u, rtol):
    M = scores.shape[0]
    best = -np.inf
    for m in range(M):
        if scores[m] > best:
            best = scores[m]
    thr = best - rtol * max(1.0, abs(best))
    count = 0
    for m in range(M):
        if scores[m] >= thr:
            count += 1
    j = min(int(u * count), count - 1)
    for m in range(M):
        if scores[m] >= thr:
            if j == 0:
                return m
            j -= 1
    return M - 1


@_jit
def _error(scores, truth, u, rtol, ties_as_errors):
    if not ties_as_errors:
        return _choose(scores, u, rtol) != truth
    best = -np.inf
    for m in range(scores.shape[0]):
        if scores[m] > best:
            best = scores[m]
    thr = best - rtol * max(1.0, abs(best))
    if scores[truth] < thr:
        return True
    for m in range(scores.shape[0]):
        if m != truth and scores[m] >= thr:
            return True
    return False


@_jit
def ml_decode(codebooks, book, ys, sent, u_tie, logW, logv, rtol, ties_as_errors=False):
    K, n = logW.shape[0], logW.shape[1]
    T, M = ys.shape[0], codebooks.shape[1]
    errors = np.empty(T, dtype=np.bool_)
    parts = np.empty(K)
    scores = np.empty(M)
    for t in range(T):
        b = book[t]
        for m in range(M):
            for k in range(K):
                acc = 0.0
                for i in range(n):
                    acc += logW[k, i, codebooks[b, m, i], ys[t, i]]
                parts[k] = acc
            scores[m] = _combine(parts, logv)
        errors[t] = _error(scores, sent[t], u_tie[t], rtol, ties_as_errors)
    return errors


@_jit
def map_decode(bin_ptr, members, bin_of, x_rank, ys, u_tie, logP, logw, xsize, rtol,
               ties_as_errors=False):
    K, n = logP.shape[0], logP.shape[1]
    T = x_rank.shape[0]
    errors = np.empty(T, dtype=np.bool_)
    digits = np.empty(n, dtype=np.int64)
    parts = np.empty(K)
    for t in range(T):
        b = bin_of[x_rank[t]]
        lo, hi = bin_ptr[b], bin_ptr[b + 1]
        scores = np.empty(hi - lo)
        truth = 0
        for c in range(lo, hi):
            r = members[c]
            if r == x_rank[t]:
                truth = c - lo
            for i in range(n - 1, -1, -1):
                digits[i] = r % xsize
                r //= xsize
            for k in range(K):
                acc = 0.0
                for i in range(n):
                    acc += logP[k, i, digits[i], ys[t, i]]
                parts[k] = acc
            scores[c - lo] = _combine(parts, logw)
        errors[t] = _error(scores, truth, u_tie[t], rtol, ties_as_errors)
    return errors
