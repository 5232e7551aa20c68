"""Exhaustive log-probability tables over all sequences of length n.

Sequence ranks put the first symbol in the most significant digit, so rank
``r`` of a length-``n`` sequence over ``q`` symbols has digits
``r // q**(n-1-i) % q``.
"""
import numpy as np

from .errors import CapacityError, InputError
from .logmath import log, logsumexp
from .models import ChannelModel, JointSourceModel, SourceModel

DEFAULT_BUDGET = 2 ** 24


def check_n(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InputError(f"blocklength must be a positive integer, got {n!r}")
    return int(n)


def check_budget(x_size, y_size, n, budget=None):
    budget = DEFAULT_BUDGET if budget is None else budget
    cells = (x_size * y_size) ** n
    if cells > budget:
        raise CapacityError(
            f"exact enumeration needs {cells} (x^n, y^n) pairs, over the budget of {budget}; "
            "use Monte Carlo mode or a smaller n")
    return cells


def all_sequences(size, n):
    """Every length-``n`` sequence over ``size`` symbols, in rank order."""
    ranks = np.arange(size ** n, dtype=np.int64)
    powers = size ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (ranks[:, None] // powers[None, :]) % size


def _kron_sum(tables):
    out = np.zeros((1, 1))
    for t in tables:
        X, Y = t.shape
        out = (out[:, None, :, None] + t[None, :, None, :]).reshape(out.shape[0] * X, out.shape[1] * Y)
    return out


def _kron_sum_1d(vectors):
    out = np.zeros(1)
    for v in vectors:
        out = (out[:, None] + v[None, :]).ravel()
    return out


def _mix(model, fn):
    vals = [lw + fn(c) for lw, c in model.parts()]
    return vals[0] if len(vals) == 1 else logsumexp(np.stack(vals), axis=0)


def source_table(source: SourceModel, n):
    """ln P_{X^n}(x^n) for every rank, shape (|X|^n,)."""
    X = source.size

    def one(c):
        if c.family == "memoryless":
            return _kron_sum_1d([log(c.dist_at(i)) for i in range(n)])
        out = log(c.initial)
        lt = log(c.transition)
        for _ in range(1, n):
            last = np.arange(out.shape[0]) % X
            out = (out[:, None] + lt[last]).ravel()
        return out

    return _mix(source, one)


def channel_table(channel: ChannelModel, n):
    """ln W^n(y^n | x^n), shape (|X|^n, |Y|^n)."""
    return _mix(channel, lambda c: _kron_sum([log(c.matrix_at(i)) for i in range(n)]))


def joint_table(joint: JointSourceModel, n):
    """ln P_{X^n Y^n}(x^n, y^n), shape (|X|^n, |Y|^n)."""
    X, Y = joint.x_size, joint.y_size

    def one(c):
        if c.family == "memoryless":
            return _kron_sum([log(c.dist_at(i)) for i in range(n)])
        lt4 = log(c.transition).reshape(X, Y, X, Y)
        out = log(c.initial)
        for _ in range(1, n):
            lx = np.arange(out.shape[0]) % X
            ly = np.arange(out.shape[1]) % Y
            step = lt4[lx[:, None], ly[None, :]].transpose(0, 2, 1, 3)
            out = (out[:, None, :, None] + step).reshape(out.shape[0] * X, out.shape[1] * Y)
        return out

    return _mix(joint, one)


def pair_tables(model, n, budget=None):
    """Joint, marginal and (for channel pairs) conditional tables.

    ``model`` is a JointSourceModel or a ``(SourceModel, ChannelModel)`` pair.
    Returns ``(log_joint, log_py, log_w)`` with ``log_w`` None for a joint.
    """
    n = check_n(n)
    if isinstance(model, tuple):
        source, channel = model
        if source.size != channel.x_size:
            raise InputError("source alphabet does not match channel input")
        check_budget(channel.x_size, channel.y_size, n, budget)
        lw = channel_table(channel, n)
        lj = source_table(source, n)[:, None] + lw
    else:
        check_budget(model.x_size, model.y_size, n, budget)
        lw = None
        lj = joint_table(model, n)
    return lj, logsumexp(lj, axis=0), lw
