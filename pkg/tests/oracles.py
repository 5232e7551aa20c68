"""Brute-force references written directly from the definitions.

Everything here works on plain Python callables and itertools products and
never touches the package's tables, so it can serve as an independent check.
"""
import itertools
import math

import mpmath

mpmath.mp.dps = 40


def seqs(q, n):
    return list(itertools.product(range(q), repeat=n))


def iid(p):
    return lambda xs: math.prod(p[x] for x in xs)


def dmc(W):
    return lambda ys, xs: math.prod(W[x][y] for x, y in zip(xs, ys))


def joint_iid(P):
    return lambda xs, ys: math.prod(P[x][y] for x, y in zip(xs, ys))


def mix(weights, fns):
    return lambda *a: sum(w * f(*a) for w, f in zip(weights, fns))


def bsc(p):
    return [[1 - p, p], [p, 1 - p]]


def dsbs(p):
    return [[(1 - p) / 2, p / 2], [p / 2, (1 - p) / 2]]


def e0(P, W, q_x, q_y, n, rho):
    """-(1/n) ln sum_y (sum_x P(x) W(y|x)^(1/(1+rho)))^(1+rho), in mpmath."""
    rho = mpmath.mpf(rho)
    xs, ys = seqs(q_x, n), seqs(q_y, n)
    total = mpmath.mpf(0)
    for y in ys:
        inner = mpmath.fsum(mpmath.mpf(P(x)) * mpmath.mpf(W(y, x)) ** (1 / (1 + rho)) for x in xs)
        total += inner ** (1 + rho)
    return float(-mpmath.log(total) / n)


def j0(PXY, q_x, q_y, n, rho):
    """(1/n) ln sum_y (sum_x P(x,y)^(1/(1+rho)))^(1+rho)."""
    rho = mpmath.mpf(rho)
    xs, ys = seqs(q_x, n), seqs(q_y, n)
    total = mpmath.mpf(0)
    for y in ys:
        inner = mpmath.fsum(mpmath.mpf(PXY(x, y)) ** (1 / (1 + rho)) for x in xs)
        total += inner ** (1 + rho)
    return float(mpmath.log(total) / n)


def info_spectrum(P, W, q_x, q_y, n):
    """List of (density, mass) over every (x, y) with positive joint mass."""
    xs, ys = seqs(q_x, n), seqs(q_y, n)
    py = {y: sum(P(x) * W(y, x) for x in xs) for y in ys}
    out = []
    for x in xs:
        for y in ys:
            m = P(x) * W(y, x)
            if m > 0:
                out.append((math.log(W(y, x) / py[y]) / n, m))
    return out


def entropy_spectrum(PXY, q_x, q_y, n):
    xs, ys = seqs(q_x, n), seqs(q_y, n)
    py = {y: sum(PXY(x, y) for x in xs) for y in ys}
    out = []
    for x in xs:
        for y in ys:
            m = PXY(x, y)
            if m > 0:
                out.append((-math.log(m / py[y]) / n, m))
    return out


def prob_below(atoms, t):
    return math.fsum(m for v, m in atoms if v < t)


def prob_above(atoms, t):
    return math.fsum(m for v, m in atoms if v > t)
