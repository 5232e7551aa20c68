"""One-dimensional maximization of unimodal functions on an interval."""
import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_max(f, a, b, tol=1e-10):
    """Golden-section search for the maximizer of a unimodal ``f`` on [a, b].

    Returns ``(x, f(x))`` for the best point evaluated once the bracket is
    narrower than ``tol``.
    """
    h = b - a
    if h <= tol:
        return a, f(a)
    c, d = a + INV_PHI2 * h, a + INV_PHI * h
    fc, fd = f(c), f(d)
    while h > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + INV_PHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + INV_PHI * h
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def maximize_unit_interval(f, grid_size=33, tol=1e-10):
    """Maximize a unimodal ``f`` on [0, 1]: coarse grid, then golden refinement.

    Ties go to the smaller argument.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    grid = np.linspace(0.0, 1.0, grid_size)
    vals = np.array([f(x) for x in grid])
    i = int(np.argmax(vals))
    best_x, best_v = float(grid[i]), float(vals[i])
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid_size - 1)]
    x, v = golden_max(f, float(lo), float(hi), tol)
    if v > best_v:
        best_x, best_v = float(x), float(v)
    return best_x, best_v
