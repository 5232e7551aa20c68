"""Finite-alphabet sources, correlated sources and channels.

Three process families are supported:

* ``memoryless`` -- independent positions with a (possibly time-varying)
  per-position table; position ``i`` uses entry ``i % period``.
* ``markov`` -- homogeneous first-order chain (sources and joint sources only;
  a joint chain runs on pair states ``x * |Y| + y``).
* ``mixture`` -- a finite weighted list of non-mixture components.

All probability evaluations return natural logarithms, with ``-inf`` for
impossible events.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .logmath import log, logsumexp, xlogx_sum

NORM_TOL = 1e-12
FAMILIES = ("memoryless", "markov", "mixture")


@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if isinstance(self.size, bool) or int(self.size) != self.size or self.size < 1:
            raise InputError(f"alphabet size must be a positive integer, got {self.size!r}")
        object.__setattr__(self, "size", int(self.size))

    @property
    def log_size(self) -> float:
        return math.log(self.size)


@dataclass(frozen=True)
class Violation:
    """One failed normalization check reported by :func:`validate_model`."""

    location: str
    residual: float
    message: str


def _frozen(values, ndim, what):
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise InputError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def _check_mixture(weights, components, cls):
    if len(components) == 0:
        raise InputError("mixture needs at least one component")
    if len(weights) != len(components):
        raise InputError("mixture weights and components differ in length")
    for c in components:
        if not isinstance(c, cls):
            raise InputError(f"mixture component must be a {cls.__name__}")
        if c.family == "mixture":
            raise InputError("nested mixtures are not supported")


class _Model:
    family: str
    weights: np.ndarray | None
    components: tuple

    def parts(self):
        """``[(log_weight, component), ...]``; a non-mixture is its own single part."""
        if self.family != "mixture":
            return [(0.0, self)]
        return [(float(log(w)), c) for w, c in zip(self.weights, self.components)]

    @property
    def all_memoryless(self) -> bool:
        return all(c.family == "memoryless" for _, c in self.parts())


@dataclass(frozen=True, eq=False)
class SourceModel(_Model):
    family: str
    alphabet: Alphabet
    distributions: np.ndarray | None = None
    initial: np.ndarray | None = None
    transition: np.ndarray | None = None
    weights: np.ndarray | None = None
    components: tuple = field(default=())

    def __post_init__(self):
        X = self.alphabet.size
        if self.family == "memoryless":
            if self.distributions is None or self.distributions.shape[1:] != (X,) or len(self.distributions) == 0:
                raise InputError("memoryless source needs an (L, |X|) distribution array")
        elif self.family == "markov":
            if self.initial is None or self.initial.shape != (X,):
                raise InputError("markov source needs an initial distribution of length |X|")
            if self.transition is None or self.transition.shape != (X, X):
                raise InputError("markov source needs an |X| x |X| transition matrix")
        elif self.family == "mixture":
            _check_mixture(self.weights, self.components, SourceModel)
            if any(c.alphabet != self.alphabet for c in self.components):
                raise InputError("mixture components must share the alphabet")
        else:
            raise InputError(f"unknown family {self.family!r}")

    @classmethod
    def memoryless(cls, distributions):
        """A memoryless source; a 1-D argument gives the stationary (i.i.d.) case."""
        arr = np.array(distributions, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        arr = _frozen(arr, 2, "distributions")
        return cls("memoryless", Alphabet(arr.shape[1]), distributions=arr)

    @classmethod
    def markov(cls, initial, transition):
        init = _frozen(initial, 1, "initial")
        return cls("markov", Alphabet(init.shape[0]), initial=init,
                   transition=_frozen(transition, 2, "transition"))

    @classmethod
    def mixture(cls, weights, components):
        components = tuple(components)
        w = _frozen(weights, 1, "weights")
        _check_mixture(w, components, cls)
        return cls("mixture", components[0].alphabet, weights=w, components=components)

    @property
    def size(self) -> int:
        return self.alphabet.size

    def dist_at(self, i):
        return self.distributions[i % len(self.distributions)]


@dataclass(frozen=True, eq=False)
class JointSourceModel(_Model):
    family: str
    alphabets: tuple
    distributions: np.ndarray | None = None
    initial: np.ndarray | None = None
    transition: np.ndarray | None = None
    weights: np.ndarray | None = None
    components: tuple = field(default=())

    def __post_init__(self):
        X, Y = self.x_size, self.y_size
        if self.family == "memoryless":
            if self.distributions is None or self.distributions.shape[1:] != (X, Y) or len(self.distributions) == 0:
                raise InputError("memoryless joint needs an (L, |X|, |Y|) array")
        elif self.family == "markov":
            if self.initial is None or self.initial.shape != (X, Y):
                raise InputError("markov joint needs an |X| x |Y| initial distribution")
            if self.transition is None or self.transition.shape != (X * Y, X * Y):
                raise InputError("markov joint needs an |X||Y| x |X||Y| transition matrix")
        elif self.family == "mixture":
            _check_mixture(self.weights, self.components, JointSourceModel)
            if any(c.alphabets != self.alphabets for c in self.components):
                raise InputError("mixture components must share the alphabets")
        else:
            raise InputError(f"unknown family {self.family!r}")

    @classmethod
    def memoryless(cls, distributions):
        arr = np.array(distributions, dtype=float)
        if arr.ndim == 2:
            arr = arr[None]
        arr = _frozen(arr, 3, "distributions")
        return cls("memoryless", (Alphabet(arr.shape[1]), Alphabet(arr.shape[2])), distributions=arr)

    @classmethod
    def markov(cls, initial, transition):
        init = _frozen(initial, 2, "initial")
        return cls("markov", (Alphabet(init.shape[0]), Alphabet(init.shape[1])), initial=init,
                   transition=_frozen(transition, 2, "transition"))

    @classmethod
    def mixture(cls, weights, components):
        components = tuple(components)
        w = _frozen(weights, 1, "weights")
        _check_mixture(w, components, cls)
        return cls("mixture", components[0].alphabets, weights=w, components=components)

    @property
    def x_size(self) -> int:
        return self.alphabets[0].size

    @property
    def y_size(self) -> int:
        return self.alphabets[1].size

    def dist_at(self, i):
        return self.distributions[i % len(self.distributions)]


@dataclass(frozen=True, eq=False)
class ChannelModel(_Model):
    family: str
    alphabets: tuple
    matrices: np.ndarray | None = None
    weights: np.ndarray | None = None
    components: tuple = field(default=())

    def __post_init__(self):
        X, Y = self.x_size, self.y_size
        if self.family == "memoryless":
            if self.matrices is None or self.matrices.shape[1:] != (X, Y) or len(self.matrices) == 0:
                raise InputError("memoryless channel needs an (L, |X|, |Y|) array")
        elif self.family == "mixture":
            _check_mixture(self.weights, self.components, ChannelModel)
            if any(c.alphabets != self.alphabets for c in self.components):
                raise InputError("mixture components must share the alphabets")
        else:
            raise InputError(f"unsupported channel family {self.family!r}")

    @classmethod
    def memoryless(cls, matrices):
        arr = np.array(matrices, dtype=float)
        if arr.ndim == 2:
            arr = arr[None]
        arr = _frozen(arr, 3, "matrices")
        return cls("memoryless", (Alphabet(arr.shape[1]), Alphabet(arr.shape[2])), matrices=arr)

    @classmethod
    def mixture(cls, weights, components):
        components = tuple(components)
        w = _frozen(weights, 1, "weights")
        _check_mixture(w, components, cls)
        return cls("mixture", components[0].alphabets, weights=w, components=components)

    @property
    def x_size(self) -> int:
        return self.alphabets[0].size

    @property
    def y_size(self) -> int:
        return self.alphabets[1].size

    def matrix_at(self, i):
        return self.matrices[i % len(self.matrices)]


# ---------------------------------------------------------------- validation

def _check_dist(values, where, out):
    values = np.asarray(values, dtype=float)
    neg = values.min() if values.size else 0.0
    if neg < 0:
        out.append(Violation(where, float(-neg), "negative probability"))
    residual = abs(float(values.sum()) - 1.0)
    if residual > NORM_TOL:
        out.append(Violation(where, residual, "does not sum to 1"))


def _check_rows(matrix, where, out):
    for r, row in enumerate(np.asarray(matrix)):
        _check_dist(row, f"{where}[{r}]", out)


def validate_model(model, prefix=""):
    """List every normalization problem in ``model``; never raises."""
    out = []
    if model.family == "mixture":
        w = np.asarray(model.weights)
        bad = w[w <= 0]
        if bad.size:
            out.append(Violation(f"{prefix}weights", float(-bad.min()), "mixture weights must be positive"))
        residual = abs(float(w.sum()) - 1.0)
        if residual > NORM_TOL:
            out.append(Violation(f"{prefix}weights", residual, "mixture weights do not sum to 1"))
        for k, comp in enumerate(model.components):
            out.extend(validate_model(comp, f"{prefix}components[{k}]."))
        return out
    if isinstance(model, SourceModel):
        if model.family == "memoryless":
            _check_rows(model.distributions, f"{prefix}distributions", out)
        else:
            _check_dist(model.initial, f"{prefix}initial", out)
            _check_rows(model.transition, f"{prefix}transition", out)
    elif isinstance(model, JointSourceModel):
        if model.family == "memoryless":
            for i, d in enumerate(model.distributions):
                _check_dist(d, f"{prefix}distributions[{i}]", out)
        else:
            _check_dist(model.initial, f"{prefix}initial", out)
            _check_rows(model.transition, f"{prefix}transition", out)
    elif isinstance(model, ChannelModel):
        for i, m in enumerate(model.matrices):
            _check_rows(m, f"{prefix}matrices[{i}]", out)
    return out


# ------------------------------------------------------ sequence evaluation

def _as_batch(seqs, size, what):
    arr = np.asarray(seqs)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise InputError(f"{what} must be a non-empty symbol sequence")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise InputError(f"{what} must contain integer symbols")
    arr = arr.astype(np.int64)
    if arr.min() < 0 or arr.max() >= size:
        raise InputError(f"{what} has symbols outside 0..{size - 1}")
    return arr


def _pair_batch(xs, ys, x_size, y_size):
    xs = _as_batch(xs, x_size, "xn")
    ys = _as_batch(ys, y_size, "yn")
    if xs.shape != ys.shape:
        raise InputError(f"xn and yn lengths differ: {xs.shape[1]} vs {ys.shape[1]}")
    return xs, ys


def _mix_parts(model, fn):
    vals = [lw + fn(c) for lw, c in model.parts()]
    if len(vals) == 1:
        return vals[0]
    return logsumexp(np.stack(vals), axis=0)


def source_log_prob_batch(source: SourceModel, xs):
    xs = _as_batch(xs, source.size, "xn")

    def one(c):
        acc = np.zeros(xs.shape[0])
        if c.family == "memoryless":
            for i in range(xs.shape[1]):
                acc += log(c.dist_at(i))[xs[:, i]]
        else:
            acc += log(c.initial)[xs[:, 0]]
            lt = log(c.transition)
            for i in range(1, xs.shape[1]):
                acc += lt[xs[:, i - 1], xs[:, i]]
        return acc

    return _mix_parts(source, one)


def channel_log_prob_batch(channel: ChannelModel, xs, ys):
    xs, ys = _pair_batch(xs, ys, channel.x_size, channel.y_size)

    def one(c):
        acc = np.zeros(xs.shape[0])
        for i in range(xs.shape[1]):
            acc += log(c.matrix_at(i))[xs[:, i], ys[:, i]]
        return acc

    return _mix_parts(channel, one)


def joint_log_prob_batch(joint: JointSourceModel, xs, ys):
    xs, ys = _pair_batch(xs, ys, joint.x_size, joint.y_size)
    Y = joint.y_size

    def one(c):
        acc = np.zeros(xs.shape[0])
        if c.family == "memoryless":
            for i in range(xs.shape[1]):
                acc += log(c.dist_at(i))[xs[:, i], ys[:, i]]
        else:
            acc += log(c.initial)[xs[:, 0], ys[:, 0]]
            lt = log(c.transition)
            s = xs * Y + ys
            for i in range(1, xs.shape[1]):
                acc += lt[s[:, i - 1], s[:, i]]
        return acc

    return _mix_parts(joint, one)


def marginal_y_log_prob_batch(joint: JointSourceModel, ys):
    ys = _as_batch(ys, joint.y_size, "yn")
    X, Y = joint.x_size, joint.y_size

    def one(c):
        if c.family == "memoryless":
            acc = np.zeros(ys.shape[0])
            for i in range(ys.shape[1]):
                acc += log(c.dist_at(i).sum(axis=0))[ys[:, i]]
            return acc
        # forward recursion over the hidden x-state
        lt4 = log(c.transition).reshape(X, Y, X, Y)
        alpha = log(c.initial)[:, ys[:, 0]].T
        for i in range(1, ys.shape[1]):
            g = lt4[:, ys[:, i - 1], :, ys[:, i]]  # (N, X, X')
            alpha = logsumexp(alpha[:, :, None] + g, axis=1)
        return logsumexp(alpha, axis=1)

    return _mix_parts(joint, one)


def source_log_prob(source, xn) -> float:
    return float(source_log_prob_batch(source, xn)[0])


def channel_log_prob(channel, xn, yn) -> float:
    """ln W^n(yn | xn) in nats."""
    return float(channel_log_prob_batch(channel, xn, yn)[0])


def joint_log_prob(joint, xn, yn) -> float:
    return float(joint_log_prob_batch(joint, xn, yn)[0])


def marginal_y_log_prob(joint, yn) -> float:
    return float(marginal_y_log_prob_batch(joint, yn)[0])


# ------------------------------------------------------------- composition

def induce_joint(source: SourceModel, channel: ChannelModel) -> JointSourceModel:
    """The joint law of (input, output) when ``source`` drives ``channel``."""
    if source.size != channel.x_size:
        raise InputError(f"source alphabet {source.size} does not match channel input {channel.x_size}")
    if source.family == "mixture" or channel.family == "mixture":
        weights, comps = [], []
        for lwa, a in source.parts():
            for lwb, b in channel.parts():
                weights.append(math.exp(lwa + lwb))
                comps.append(induce_joint(a, b))
        return JointSourceModel.mixture(weights, comps)
    if source.family == "memoryless":
        La, Lb = len(source.distributions), len(channel.matrices)
        L = math.lcm(La, Lb)
        return JointSourceModel.memoryless(
            [source.dist_at(i)[:, None] * channel.matrix_at(i) for i in range(L)])
    if len(channel.matrices) != 1:
        raise InputError("a markov source can only drive a stationary memoryless channel")
    W = channel.matrices[0]
    X, Y = channel.x_size, channel.y_size
    trans = (source.transition[:, None, :, None] * W[None, None, :, :])
    trans = np.broadcast_to(trans, (X, Y, X, Y)).reshape(X * Y, X * Y)
    return JointSourceModel.markov(source.initial[:, None] * W, trans)


# ------------------------------------------------------- reference values

def mutual_information(table) -> float:
    """Single-letter I(X;Y) in nats for a joint table P[x, y]."""
    p = np.asarray(table, dtype=float)
    px, py = p.sum(axis=1), p.sum(axis=0)
    return xlogx_sum(log(px)) + xlogx_sum(log(py)) - xlogx_sum(log(p))


def conditional_entropy(table) -> float:
    """Single-letter H(X|Y) in nats for a joint table P[x, y]."""
    p = np.asarray(table, dtype=float)
    return xlogx_sum(log(p)) - xlogx_sum(log(p.sum(axis=0)))


@dataclass(frozen=True)
class ModelReference:
    """Closed-form spectral rates (nats/symbol); ``None`` where not available."""

    inf_mutual_info: float | None = None
    sup_cond_entropy: float | None = None
    note: str = ""


def _stationary_table(joint):
    if joint.family != "memoryless":
        return None
    d = joint.distributions
    if all(np.array_equal(d[0], t) for t in d[1:]):
        return d[0]
    return None


def reference_rates(model) -> ModelReference:
    """Spectral rates for stationary memoryless models and finite mixtures of them.

    ``model`` is a :class:`JointSourceModel` or a ``(SourceModel, ChannelModel)``
    pair. Mixtures take the worst component: the smallest mutual information
    and the largest conditional entropy.
    """
    is_pair = isinstance(model, tuple)
    joint = induce_joint(*model) if is_pair else model
    tables = [_stationary_table(c) for _, c in joint.parts()]
    if any(t is None for t in tables):
        return ModelReference(note="no closed form: only stationary memoryless components are supported")
    h = max(conditional_entropy(t) for t in tables)
    i = min(mutual_information(t) for t in tables) if is_pair else None
    return ModelReference(inf_mutual_info=i, sup_cond_entropy=h)


# ------------------------------------------------------------ small library

def binary_symmetric_channel(p) -> ChannelModel:
    return ChannelModel.memoryless([[1 - p, p], [p, 1 - p]])


def identity_channel(size=2) -> ChannelModel:
    return ChannelModel.memoryless(np.eye(size))


def uniform_source(size=2) -> SourceModel:
    return SourceModel.memoryless(np.full(size, 1.0 / size))


def doubly_symmetric_source(p) -> JointSourceModel:
    """Uniform binary X observed through a BSC(p)."""
    return JointSourceModel.memoryless([[(1 - p) / 2, p / 2], [p / 2, (1 - p) / 2]])


def perfectly_correlated_pair(size=2) -> JointSourceModel:
    return JointSourceModel.memoryless(np.eye(size) / size)


def independent_uniform_pair(size=2) -> JointSourceModel:
    return JointSourceModel.memoryless(np.full((size, size), 1.0 / size ** 2))
