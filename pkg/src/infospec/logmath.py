"""Log-domain helpers."""
import math

import numpy as np
from scipy.special import logsumexp as _scipy_lse

LN2 = math.log(2.0)
HOEFFDING_LEVEL = 0.01


def logsumexp(a, axis=None):
    """``ln sum exp(a)`` that returns -inf (silently) for all -inf input."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return _scipy_lse(a, axis=axis)


def log(p):
    with np.errstate(divide="ignore"):
        return np.log(p)


def xlogx_sum(logp):
    """-sum p ln p given ln p, skipping zero-probability cells."""
    logp = np.asarray(logp, dtype=float)
    ok = logp > -np.inf
    return float(-np.sum(np.exp(logp[ok]) * logp[ok]))


def hoeffding_halfwidth(count, level=HOEFFDING_LEVEL):
    """Two-sided Hoeffding half-width for a mean of ``count`` [0,1] samples."""
    if count <= 0:
        return math.inf
    return math.sqrt(math.log(2.0 / level) / (2.0 * count))
