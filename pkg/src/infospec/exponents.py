"""Gallager functions, their optimized exponents and the threshold bounds.

``gallager_e0`` is the channel function
``-(1/n) ln sum_y (sum_x P(x) W(y|x)^{1/(1+rho)})^{1+rho}`` and ``source_j0``
the source function ``(1/n) ln sum_y (sum_x P(x,y)^{1/(1+rho)})^{1+rho}``.
Both have a per-position fast path for (non-mixture) memoryless models and
fall back to exhaustive enumeration otherwise.
"""
from __future__ import annotations

import io
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .enumeration import (DEFAULT_BUDGET, check_budget, check_n, channel_table, joint_table,
                          source_table, _kron_sum)
from .errors import DomainError, InputError
from .logmath import LN2, log, logsumexp
from .models import ChannelModel, JointSourceModel, SourceModel
from .optimize import maximize_unit_interval
from .spectrum import ENTROPY, INFORMATION, epsilon_at, exact_spectrum

THREE_LN2 = 3.0 * LN2
HOLDS_TOL = 1e-12
RHO_CLAMP_TOL = 1e-9
RHO_GRID = 33


def check_rho(rho) -> float:
    """Validate rho in [0, 1], clamping (with a warning) values a hair outside."""
    rho = float(rho)
    if not math.isfinite(rho):
        raise InputError(f"rho must be finite, got {rho}")
    if 0.0 <= rho <= 1.0:
        return rho + 0.0
    if -RHO_CLAMP_TOL <= rho < 0.0 or 1.0 < rho <= 1.0 + RHO_CLAMP_TOL:
        clamped = min(max(rho, 0.0), 1.0)
        warnings.warn(f"rho={rho!r} clamped to {clamped}", RuntimeWarning, stacklevel=3)
        return clamped
    raise InputError(f"rho must lie in [0, 1], got {rho}")


def check_rate(R, name="rate") -> float:
    R = float(R)
    if not math.isfinite(R) or R < 0:
        raise InputError(f"{name} must be finite and nonnegative, got {R}")
    return R


# ------------------------------------------------------------ E0 and J0

def e0_single_letter(p, W, rho) -> float:
    s = 1.0 / (1.0 + rho)
    inner = logsumexp(log(p)[:, None] + s * log(W), axis=0)
    return -float(logsumexp((1.0 + rho) * inner))


def j0_single_letter(P, rho) -> float:
    s = 1.0 / (1.0 + rho)
    inner = logsumexp(s * log(P), axis=0)
    return float(logsumexp((1.0 + rho) * inner))


def _pick_method(method, fast_ok):
    if method == "auto":
        return "fast" if fast_ok else "enumerate"
    if method not in ("fast", "enumerate"):
        raise InputError(f"unknown method {method!r}")
    if method == "fast" and not fast_ok:
        raise InputError("the fast path needs non-mixture memoryless models")
    return method


def _e0_evaluator(source, channel, n, method="auto", budget=DEFAULT_BUDGET):
    n = check_n(n)
    if source.size != channel.x_size:
        raise InputError(f"source alphabet {source.size} does not match channel input {channel.x_size}")
    fast_ok = source.family == "memoryless" and channel.family == "memoryless"
    if _pick_method(method, fast_ok) == "fast":
        letters = [(source.dist_at(i), channel.matrix_at(i)) for i in range(n)]
        return lambda rho: math.fsum(e0_single_letter(p, W, rho) for p, W in letters) / n
    check_budget(channel.x_size, channel.y_size, n, budget)
    lp, lw = source_table(source, n)[:, None], channel_table(channel, n)

    def f(rho):
        inner = logsumexp(lp + lw / (1.0 + rho), axis=0)
        return -float(logsumexp((1.0 + rho) * inner)) / n

    return f


def _j0_evaluator(joint, n, method="auto", budget=DEFAULT_BUDGET):
    n = check_n(n)
    if _pick_method(method, joint.family == "memoryless") == "fast":
        letters = [joint.dist_at(i) for i in range(n)]
        return lambda rho: math.fsum(j0_single_letter(P, rho) for P in letters) / n
    check_budget(joint.x_size, joint.y_size, n, budget)
    lj = joint_table(joint, n)

    def f(rho):
        inner = logsumexp(lj / (1.0 + rho), axis=0)
        return float(logsumexp((1.0 + rho) * inner)) / n

    return f


def gallager_e0(source: SourceModel, channel: ChannelModel, n, rho, method="auto",
                budget=DEFAULT_BUDGET) -> float:
    """E0^(n)(rho, X) in nats per symbol."""
    rho = check_rho(rho)
    return _e0_evaluator(source, channel, n, method, budget)(rho)


def source_j0(joint: JointSourceModel, n, rho, method="auto", budget=DEFAULT_BUDGET) -> float:
    """J0^(n)(rho) in nats per symbol."""
    rho = check_rho(rho)
    return _j0_evaluator(joint, n, method, budget)(rho)


# ------------------------------------------------------------ rho_n

def rho_n_channel(t, epsilon_n, n) -> float:
    """min{-ln(eps) / (2 n t), 1}, with eps = 0 giving 1."""
    t, eps = float(t), float(epsilon_n)
    if not t > 0:
        raise InputError(f"threshold must be positive, got {t}")
    if not 0.0 <= eps <= 1.0:
        raise InputError(f"epsilon must lie in [0, 1], got {eps}")
    if eps == 0.0:
        return 1.0
    return min(-0.5 * math.log(eps) / (n * t), 1.0) + 0.0


def rho_n_source(t, epsilon_n, n, ln_alphabet) -> float:
    """min{-ln(eps) / (2 n (ln|X| - t)), 1}; 1 once t reaches ln|X| or eps = 0."""
    t, eps, lnx = float(t), float(epsilon_n), float(ln_alphabet)
    if not lnx > 0:
        raise InputError(f"ln|X| must be positive, got {lnx}")
    if not 0.0 <= eps <= 1.0:
        raise InputError(f"epsilon must lie in [0, 1], got {eps}")
    if t >= lnx or eps == 0.0:
        return 1.0
    return min(-0.5 * math.log(eps) / (n * (lnx - t)), 1.0) + 0.0


# ------------------------------------------------------------ bound checks

@dataclass(frozen=True)
class BoundReport:
    theorem: int
    n: int
    threshold: float
    epsilon_n: float
    rho_n: float
    lhs: float
    rhs: float
    slack: float
    holds: bool

    def to_dict(self):
        return asdict(self)


def verify_theorem1(source, channel, n, t, budget=DEFAULT_BUDGET) -> BoundReport:
    """E0(rho_n) >= rho_n t - 3 ln 2 / n with eps = Pr{information density < t}."""
    n = check_n(n)
    t = float(t)
    spec = exact_spectrum((source, channel), n, INFORMATION, budget=budget)
    eps = epsilon_at(spec, t).epsilon
    rho = rho_n_channel(t, eps, n)
    lhs = gallager_e0(source, channel, n, rho, budget=budget)
    rhs = rho * t - THREE_LN2 / n
    slack = lhs - rhs
    return BoundReport(1, n, t, eps, rho, lhs, rhs, slack, slack >= -HOLDS_TOL)


def verify_theorem2(joint, n, t, budget=DEFAULT_BUDGET) -> BoundReport:
    """J0(rho_n) <= rho_n t + 3 ln 2 / n with eps = Pr{entropy density > t}."""
    n = check_n(n)
    t = check_rate(t, "threshold")
    spec = exact_spectrum(joint, n, ENTROPY, budget=budget)
    eps = epsilon_at(spec, t).epsilon
    rho = rho_n_source(t, eps, n, joint.alphabets[0].log_size)
    lhs = source_j0(joint, n, rho, budget=budget)
    rhs = rho * t + THREE_LN2 / n
    slack = rhs - lhs
    return BoundReport(2, n, t, eps, rho, lhs, rhs, slack, slack >= -HOLDS_TOL)


def threshold_grid(lo, hi, count):
    """``count`` evenly spaced points strictly inside (lo, hi)."""
    return list(np.linspace(lo, hi, count + 2)[1:-1])


# ------------------------------------------------------------ exponents

def channel_exponent(source, channel, n, R, rho_grid_size=RHO_GRID, budget=DEFAULT_BUDGET):
    """max over rho in [0, 1] of E0(rho) - rho R for the given input; returns (value, rho)."""
    R = check_rate(R)
    e0 = _e0_evaluator(source, channel, n, budget=budget)
    f = lambda r: e0(r) - r * R
    rho, value = maximize_unit_interval(f, rho_grid_size)
    return value, rho


def source_exponent(joint, n, R, rho_grid_size=RHO_GRID, budget=DEFAULT_BUDGET):
    """max over rho in [0, 1] of rho R - J0(rho); returns (value, rho)."""
    R = check_rate(R)
    j0 = _j0_evaluator(joint, n, budget=budget)
    f = lambda r: r * R - j0(r)
    rho, value = maximize_unit_interval(f, rho_grid_size)
    return value, rho


def optimize_iid_input(channel, R, rho_grid_size=RHO_GRID, max_sweeps=50, tol=1e-13):
    """Coordinate ascent of E0(rho, p) - rho R over rho and an i.i.d. input p.

    Only stationary memoryless channels are supported. Each coordinate move
    sets p_j = s and rescales the other entries; E0 is quasi-concave in p,
    so every line search is unimodal. Returns ``(value, rho, p)``.
    """
    R = check_rate(R)
    if channel.family != "memoryless" or len(channel.matrices) != 1:
        raise InputError("input optimization needs a stationary memoryless channel")
    W = channel.matrices[0]
    X = W.shape[0]
    p = np.full(X, 1.0 / X)

    def objective(rho, q):
        return e0_single_letter(q, W, rho) - rho * R

    def along(j, q):
        rest = np.delete(q, j)
        rest = rest / rest.sum() if rest.sum() > 0 else np.full(X - 1, 1.0 / (X - 1))

        def line(s):
            return np.insert((1.0 - s) * rest, j, s)

        return line

    rho, best = maximize_unit_interval(lambda r: objective(r, p), rho_grid_size)
    for _ in range(max_sweeps):
        before = best
        for j in range(X if X > 1 else 0):
            line = along(j, p)
            s, v = maximize_unit_interval(lambda s: objective(rho, line(s)), rho_grid_size)
            if v > best:
                p, best = line(s), v
        rho, v = maximize_unit_interval(lambda r: objective(r, p), rho_grid_size)
        best = max(best, v)
        if best - before <= tol:
            break
    return best, rho, p


# ------------------------------------------------------------ tilted law

@dataclass(frozen=True, eq=False)
class TiltedJoint:
    """Tilted joint law at ``rho``; stored per position for memoryless joints.

    ``log_normalizer`` is ln of the tilting denominator, i.e. n * J0(rho).
    """

    n: int
    rho: float
    log_normalizer: float
    log_masses: np.ndarray | None = None
    factors: tuple | None = None

    def table(self):
        """Full (|X|^n, |Y|^n) log-mass table, expanding factors if needed."""
        if self.log_masses is not None:
            return self.log_masses
        return _kron_sum(list(self.factors))

    def total_mass(self) -> float:
        if self.factors is not None:
            return math.prod(float(np.exp(logsumexp(f))) for f in self.factors)
        return float(np.exp(logsumexp(self.log_masses)))

    def conditional_entropy(self) -> float:
        """H(X|Y) of the tilted law in nats (not normalized by n)."""
        tabs = self.factors if self.factors is not None else (self.log_masses,)
        total = []
        for L in tabs:
            lpy = logsumexp(L, axis=0)
            ok = L > -np.inf
            with np.errstate(invalid="ignore"):
                terms = np.exp(L) * (L - lpy[None, :])
            total.append(-math.fsum(terms[ok]))
        return math.fsum(total)


def _tilt(lp, rho):
    s = 1.0 / (1.0 + rho)
    ls = logsumexp(s * lp, axis=0)
    lz = float(logsumexp((1.0 + rho) * ls))
    return s * lp + rho * ls[None, :] - lz, lz


def tilted_joint(joint, n, rho, budget=DEFAULT_BUDGET) -> TiltedJoint:
    n = check_n(n)
    rho = check_rho(rho)
    if joint.family == "memoryless":
        pieces = [_tilt(log(joint.dist_at(i)), rho) for i in range(n)]
        return TiltedJoint(n, rho, math.fsum(z for _, z in pieces),
                           factors=tuple(t for t, _ in pieces))
    check_budget(joint.x_size, joint.y_size, n, budget)
    table, lz = _tilt(joint_table(joint, n), rho)
    return TiltedJoint(n, rho, lz, log_masses=table)


def j0_derivative(joint, n, rho, budget=DEFAULT_BUDGET) -> float:
    """dJ0/drho, evaluated as (1/n) H of X given Y under the tilted law."""
    return tilted_joint(joint, n, rho, budget).conditional_entropy() / check_n(n)


def solve_rho0(joint, n, R, budget=DEFAULT_BUDGET, tol=1e-12, max_iter=200) -> float:
    """The rho in (0, 1) at which dJ0/drho equals R, found by bisection."""
    R = check_rate(R)
    d = lambda r: j0_derivative(joint, n, r, budget)
    lo_val, hi_val = d(0.0), d(1.0)
    if not lo_val < R < hi_val:
        raise DomainError(f"R must lie strictly inside ({lo_val:.12g}, {hi_val:.12g}) nats")
    lo, hi = 0.0, 1.0
    mid = 0.5
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        v = d(mid) - R
        if abs(v) <= tol or hi - lo <= 1e-16:
            break
        if v < 0:
            lo = mid
        else:
            hi = mid
    return mid


# ------------------------------------------------------------ curves

@dataclass(frozen=True)
class ExponentCurve:
    model_id: str
    n: int
    parameter: str
    points: tuple

    def __post_init__(self):
        params = [p for p, _ in self.points]
        if any(b <= a for a, b in zip(params, params[1:])):
            raise InputError("curve parameters must be strictly increasing")
        if not all(math.isfinite(v) for _, v in self.points):
            raise InputError("curve values must be finite")

    def to_csv(self, units="nats", fmt=".12g", header=()):
        scale = 1.0 if units == "nats" else 1.0 / LN2
        pscale = scale if self.parameter == "rate" else 1.0
        buf = io.StringIO()
        for line in header:
            buf.write(f"# {line}\n")
        buf.write(f"{self.parameter},exponent_{units}\n")
        for p, v in self.points:
            buf.write(f"{format(p * pscale, fmt)},{format(v * scale, fmt)}\n")
        return buf.getvalue()


def e0_curve(source, channel, n, rhos, model_id="", budget=DEFAULT_BUDGET) -> ExponentCurve:
    pts = tuple((float(r), gallager_e0(source, channel, n, r, budget=budget)) for r in rhos)
    return ExponentCurve(model_id, n, "rho", pts)


def j0_curve(joint, n, rhos, model_id="", budget=DEFAULT_BUDGET) -> ExponentCurve:
    pts = tuple((float(r), source_j0(joint, n, r, budget=budget)) for r in rhos)
    return ExponentCurve(model_id, n, "rho", pts)
