"""Information and entropy spectra at a fixed blocklength.

The information density of an input/channel pair is
``(1/n) ln W^n(y|x) / P_{Y^n}(y)`` and the entropy density of a joint source
is ``(1/n) ln 1 / P_{X^n|Y^n}(x|y)``. Their exact laws come either from a
per-position convolution (memoryless components, including mixtures of
them) or from exhaustive enumeration; Monte Carlo estimates cover larger n.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from . import sampling
from .enumeration import DEFAULT_BUDGET, check_n, pair_tables
from .errors import InputError, UndefinedPointError
from .logmath import hoeffding_halfwidth, log, logsumexp
from .models import (ChannelModel, JointSourceModel, SourceModel, channel_log_prob,
                     channel_log_prob_batch, induce_joint, joint_log_prob,
                     joint_log_prob_batch, marginal_y_log_prob, marginal_y_log_prob_batch)
from .rng import check_seed, derive_keys, partition, run_chunks

INFORMATION = "information"
ENTROPY = "entropy"
MERGE_TOL = 1e-12
MC_CHUNK = 8192


@dataclass(frozen=True, eq=False)
class SpectrumCdf:
    """Law of the normalized density at blocklength ``n``.

    In exact mode ``values``/``masses`` are the sorted atoms; in Monte Carlo
    mode ``values`` holds the samples in draw order and ``masses`` is None.
    """

    n: int
    kind: str
    mode: str
    values: np.ndarray
    masses: np.ndarray | None = None
    sample_count: int = 0
    seed: int | None = None

    def mean(self) -> float:
        if self.masses is None:
            return float(np.mean(self.values))
        return math.fsum(self.values * self.masses)

    def total_mass(self) -> float:
        return 1.0 if self.masses is None else math.fsum(self.masses)


@dataclass(frozen=True)
class TailProbe:
    threshold: float
    epsilon: float
    mode: str
    ci_halfwidth: float = 0.0


@dataclass(frozen=True)
class ProofSetReport:
    epsilon: float
    mass_B_complement: float
    bound_sqrt_epsilon: float
    holds: bool

    def to_dict(self):
        return dict(self.__dict__)


def _resolve(model, kind):
    is_pair = isinstance(model, tuple)
    if kind is None:
        kind = INFORMATION if is_pair else ENTROPY
    if kind not in (INFORMATION, ENTROPY):
        raise InputError(f"unknown density kind {kind!r}")
    if is_pair:
        source, channel = model
        if not (isinstance(source, SourceModel) and isinstance(channel, ChannelModel)):
            raise InputError("a model pair must be (SourceModel, ChannelModel)")
    elif not isinstance(model, JointSourceModel):
        raise InputError("expected a JointSourceModel or a (SourceModel, ChannelModel) pair")
    if kind == INFORMATION and not is_pair:
        raise InputError("the information density needs an explicit (source, channel) pair")
    if kind == ENTROPY and is_pair:
        model = induce_joint(*model)
    return model, kind


# ---------------------------------------------------------- pointwise

def information_density(source, channel, xn, yn) -> float:
    """(1/n) ln W^n(yn|xn) / P_{Y^n}(yn); -inf where the channel forbids yn."""
    n = len(yn)
    lpy = marginal_y_log_prob(induce_joint(source, channel), yn)
    if lpy == -math.inf:
        raise UndefinedPointError("output sequence has zero marginal probability")
    return (channel_log_prob(channel, xn, yn) - lpy) / n


def entropy_density(joint, xn, yn) -> float:
    """(1/n) ln 1 / P_{X^n|Y^n}(xn|yn); +inf for impossible pairs."""
    n = len(yn)
    lpy = marginal_y_log_prob(joint, yn)
    if lpy == -math.inf:
        raise UndefinedPointError("output sequence has zero marginal probability")
    return -(joint_log_prob(joint, xn, yn) - lpy) / n


# ---------------------------------------------------------- atom merging

def _group_ids(F, tol):
    # hierarchical single-linkage grouping, one coordinate at a time
    A, D = F.shape
    gid = np.zeros(A, dtype=np.int64)
    for d in range(D):
        col = F[:, d]
        order = np.lexsort((col, gid))
        c, g = col[order], gid[order]
        with np.errstate(invalid="ignore"):
            same = (g[1:] == g[:-1]) & ((c[1:] == c[:-1]) | (np.abs(c[1:] - c[:-1]) <= tol))
        ids = np.concatenate(([0], np.cumsum(~same)))
        gid = np.empty(A, dtype=np.int64)
        gid[order] = ids
    return gid


def merge_atoms(features, masses, tol):
    """Merge atoms whose feature vectors agree within ``tol``; masses add."""
    gid = _group_ids(features, tol)
    _, first = np.unique(gid, return_index=True)
    out = np.zeros((first.shape[0], masses.shape[1]))
    np.add.at(out, gid, masses)
    return features[first], out


def merge_values(values, masses, tol=MERGE_TOL):
    values = np.asarray(values, dtype=float)
    masses = np.asarray(masses, dtype=float)
    keep = masses > 0
    v, m = merge_atoms(values[keep, None], masses[keep, None], tol)
    order = np.argsort(v[:, 0], kind="stable")
    return v[order, 0], m[order, 0]


# ---------------------------------------------------------- exact laws

def _convolution_setup(model, kind):
    """Per-position cells for the memoryless convolution path.

    Returns ``(log_weights, cells(i) -> (features, masses), finish(F) -> n * density)``.
    """
    if kind == INFORMATION:
        source, channel = model
        joint = induce_joint(source, channel)
        ch_parts = channel.parts()
    else:
        joint = model
    parts = joint.parts()
    logw = np.array([lw for lw, _ in parts])
    K = len(parts)

    def cells(i):
        P = np.stack([c.dist_at(i) for _, c in parts])          # (K, X, Y)
        lpy = log(P.sum(axis=1))                                  # (K, Y)
        X, Y = P.shape[1:]
        if kind == INFORMATION:
            lW = np.stack([log(c.matrix_at(i)) for _, c in ch_parts])  # (B, X, Y)
            if K == 1:
                feats = [lW[0] - lpy[0][None, :]]
            else:
                feats = list(lW) + [np.broadcast_to(l[None, :], (X, Y)) for l in lpy]
        else:
            lP = log(P)
            if K == 1:
                feats = [lP[0] - lpy[0][None, :]]
            else:
                feats = list(lP) + [np.broadcast_to(l[None, :], (X, Y)) for l in lpy]
        F = np.stack([f.ravel() for f in feats], axis=1)
        M = P.reshape(K, -1).T
        keep = M.max(axis=1) > 0
        return F[keep], M[keep]

    if K == 1:
        sign = 1.0 if kind == INFORMATION else -1.0
        return logw, cells, lambda F: sign * F[:, 0]

    B = len(ch_parts) if kind == INFORMATION else K
    num_w = np.array([lw for lw, _ in ch_parts]) if kind == INFORMATION else logw

    def finish(F):
        top = logsumexp(F[:, :B] + num_w[None, :], axis=1)
        bottom = logsumexp(F[:, B:] + logw[None, :], axis=1)
        return top - bottom if kind == INFORMATION else bottom - top

    return logw, cells, finish


def _convolved(model, kind, n):
    logw, cells, finish = _convolution_setup(model, kind)
    F, M = None, None
    for i in range(n):
        cf, cm = cells(i)
        if F is None:
            F, M = cf, cm
        else:
            D, K = cf.shape[1], cm.shape[1]
            F = (F[:, None, :] + cf[None, :, :]).reshape(-1, D)
            M = (M[:, None, :] * cm[None, :, :]).reshape(-1, K)
        F, M = merge_atoms(F, M, MERGE_TOL * (i + 1))
    return merge_values(finish(F) / n, M @ np.exp(logw))


def _enumerated(model, kind, n, budget):
    lj, lpy, lw = pair_tables(model, n, budget)
    pos = lj > -np.inf
    if kind == INFORMATION:
        dens = (lw - lpy[None, :]) / n
    else:
        dens = -(lj - lpy[None, :]) / n
    return merge_values(dens[pos], np.exp(lj[pos]))


def _convolvable(model, kind):
    if kind == INFORMATION:
        return model[0].all_memoryless and model[1].all_memoryless
    return model.all_memoryless


def exact_spectrum(model, n, kind=None, method="auto", budget=DEFAULT_BUDGET) -> SpectrumCdf:
    """Exact law of the density at blocklength ``n``.

    ``method`` is ``"auto"`` (convolution when every component is memoryless,
    enumeration otherwise), ``"convolution"`` or ``"enumeration"``.
    """
    n = check_n(n)
    model, kind = _resolve(model, kind)
    if method == "auto":
        method = "convolution" if _convolvable(model, kind) else "enumeration"
    if method == "convolution":
        if not _convolvable(model, kind):
            raise InputError("convolution needs memoryless (or mixture-of-memoryless) models")
        values, masses = _convolved(model, kind, n)
    elif method == "enumeration":
        values, masses = _enumerated(model, kind, n, budget)
    else:
        raise InputError(f"unknown method {method!r}")
    return SpectrumCdf(n=n, kind=kind, mode="exact", values=values, masses=masses)


def epsilon_at(spectrum: SpectrumCdf, t, tail=None) -> TailProbe:
    """Tail mass: strictly below ``t`` for information spectra, strictly above for entropy."""
    expected = "below" if spectrum.kind == INFORMATION else "above"
    tail = expected if tail is None else tail
    if tail not in ("below", "above"):
        raise InputError(f"tail must be 'below' or 'above', got {tail!r}")
    if tail != expected:
        raise InputError(f"{spectrum.kind} spectra use the strict-{expected} tail")
    hit = spectrum.values < t if tail == "below" else spectrum.values > t
    if spectrum.masses is None:
        eps = float(np.count_nonzero(hit)) / spectrum.sample_count
        return TailProbe(float(t), eps, "monte-carlo", hoeffding_halfwidth(spectrum.sample_count))
    eps = min(max(math.fsum(spectrum.masses[hit]), 0.0), 1.0)
    return TailProbe(float(t), eps, "exact", 0.0)


# ---------------------------------------------------------- Monte Carlo

def monte_carlo_spectrum(model, n, kind=None, samples=10000, seed=0, workers=1) -> SpectrumCdf:
    """Sampled density values; sample ``s`` depends only on ``(seed, s)``."""
    n = check_n(n)
    seed = check_seed(seed)
    if int(samples) < 1:
        raise InputError("samples must be at least 1")
    samples = int(samples)
    model, kind = _resolve(model, kind)
    if kind == INFORMATION:
        source, channel = model
        joint = induce_joint(source, channel)
    else:
        joint = model

    def chunk(lo, hi):
        keys = derive_keys(seed, np.arange(lo, hi, dtype=np.uint64))
        xs, ys = sampling.sample_sequences(joint, n, keys)
        lpy = marginal_y_log_prob_batch(joint, ys)
        if kind == INFORMATION:
            return (channel_log_prob_batch(channel, xs, ys) - lpy) / n
        return -(joint_log_prob_batch(joint, xs, ys) - lpy) / n

    values = np.concatenate(run_chunks(chunk, partition(samples, MC_CHUNK), workers))
    return SpectrumCdf(n=n, kind=kind, mode="monte-carlo", values=values,
                       sample_count=samples, seed=seed)


# ---------------------------------------------------------- proof sets

def proof_set_diagnostic(model, n, t, kind=None, budget=DEFAULT_BUDGET) -> ProofSetReport:
    """Check P_{Y^n}(B^c) <= sqrt(eps) by exhaustive enumeration.

    A(y) collects the x with density >= t (information) or <= t (entropy);
    B collects the y whose conditional mass outside A(y) is strictly below
    sqrt(eps).
    """
    n = check_n(n)
    model, kind = _resolve(model, kind)
    lj, lpy, lw = pair_tables(model, n, budget)
    mass = np.exp(lj)
    pos = lj > -np.inf
    with np.errstate(invalid="ignore"):
        if kind == INFORMATION:
            outside = pos & ((lw - lpy[None, :]) / n < t)
        else:
            outside = pos & (-(lj - lpy[None, :]) / n > t)
    eps = min(math.fsum(mass[outside]), 1.0)
    root = math.sqrt(eps)
    if eps == 0.0:
        return ProofSetReport(0.0, 0.0, 0.0, True)
    py = np.exp(lpy)
    live = py > 0
    cond = np.where(outside, mass, 0.0).sum(axis=0)[live] / py[live]
    mass_bc = math.fsum(py[live][~(cond < root)])
    return ProofSetReport(eps, mass_bc, root, bool(mass_bc <= root + 1e-12))


# ---------------------------------------------------------- export

def spectrum_to_csv(spectrum: SpectrumCdf, units="nats", fmt=".12g") -> str:
    scale = 1.0 if units == "nats" else 1.0 / math.log(2.0)
    buf = io.StringIO()
    buf.write(f"# n={spectrum.n} kind={spectrum.kind} mode={spectrum.mode} "
              f"seed={spectrum.seed} samples={spectrum.sample_count} units={units}\n")
    if spectrum.masses is None:
        buf.write(f"sample_value_{units}\n")
        for v in spectrum.values:
            buf.write(f"{format(v * scale, fmt)}\n")
    else:
        buf.write(f"value_{units},mass\n")
        for v, m in zip(spectrum.values, spectrum.masses):
            buf.write(f"{format(v * scale, fmt)},{format(m, fmt)}\n")
    return buf.getvalue()
