"""Inverse-CDF tables consumed by the sampling and decoding kernels."""
import numpy as np

from . import _kernels
from .logmath import log
from .models import ChannelModel, JointSourceModel, SourceModel


def cumulative(p):
    """Inclusive cumulative sums along the last axis, pinned to exactly 1.

    Entries from the last positive-probability symbol onward are set to 1.0,
    so a uniform in [0, 1) never lands on a trailing zero-probability symbol.
    """
    p = np.asarray(p, dtype=float)
    c = np.cumsum(p, axis=-1)
    S = p.shape[-1]
    last = S - 1 - np.argmax(p[..., ::-1] > 0, axis=-1)
    c[np.arange(S) >= last[..., None]] = 1.0
    return c


def component_cum(model):
    return cumulative(np.array([np.exp(lw) for lw, _ in model.parts()]))


def pick_component(comp_cum, u):
    idx = (comp_cum[None, :] <= np.asarray(u)[:, None]).sum(axis=1)
    return np.minimum(idx, comp_cum.shape[0] - 1).astype(np.int64)


def chain_tables(model, n):
    """(comp_cum, init_cum, trans_cum) for a SourceModel or JointSourceModel.

    Joint models run on pair states ``x * |Y| + y``.
    """
    inits, transs = [], []
    for _, c in model.parts():
        if c.family == "memoryless":
            flat = [np.ravel(c.dist_at(i)) for i in range(n)]
            inits.append(cumulative(flat[0]))
            S = flat[0].shape[0]
            transs.append(np.stack([np.broadcast_to(cumulative(f), (S, S)) for f in flat[1:]])
                          if n > 1 else np.zeros((0, S, S)))
        else:
            init = np.ravel(c.initial)
            S = init.shape[0]
            inits.append(cumulative(init))
            transs.append(np.broadcast_to(cumulative(c.transition), (max(n - 1, 0), S, S)))
    return (component_cum(model), np.ascontiguousarray(np.stack(inits)),
            np.ascontiguousarray(np.stack(transs)))


def channel_tables(channel: ChannelModel, n):
    """(comp_cum, cum, log_w, log_v) with per-position arrays of shape (K, n, X, Y)."""
    mats = np.stack([[c.matrix_at(i) for i in range(n)] for _, c in channel.parts()])
    logv = np.array([lw for lw, _ in channel.parts()])
    return component_cum(channel), cumulative(mats), log(mats), logv


def joint_log_tables(joint: JointSourceModel, n):
    """Per-position ln P tables (K, n, X, Y) and component log-weights for memoryless joints."""
    tabs = np.stack([[c.dist_at(i) for i in range(n)] for _, c in joint.parts()])
    return log(tabs), np.array([lw for lw, _ in joint.parts()])


def sample_sequences(model, n, keys):
    """Draw one sequence per key; joint models return ``(xs, ys)``."""
    return sample_from_uniforms(model, n, _kernels.uniforms(keys, n + 1))


def sample_from_uniforms(model, n, u, tables=None):
    """Sequences driven by ``u[:, 0]`` (component) and ``u[:, 1:n+1]`` (positions)."""
    comp_cum, init_cum, trans_cum = tables or chain_tables(model, n)
    comp = pick_component(comp_cum, u[:, 0])
    states = _kernels.sample_chain(np.ascontiguousarray(u[:, 1:n + 1]), comp, init_cum, trans_cum)
    if isinstance(model, SourceModel):
        return states
    Y = model.y_size
    return states // Y, states % Y
