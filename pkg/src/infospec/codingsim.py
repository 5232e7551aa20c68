"""Monte Carlo random-coding and random-binning experiments.

Random stream layout (see :mod:`infospec.rng`), with ``seed`` the user seed:

* codeword ``m`` of codebook ``c``: key ``(seed, 0, c, m)``, uniforms
  ``[component, x_1..x_n]``;
* transmission ``t`` of codebook ``c``: key ``(seed, 1, c, t)``, uniforms
  ``[message, channel component, y_1..y_n, tie-break]``;
* Slepian-Wolf trial ``t``: key ``(seed, 2, t)``, uniforms
  ``[component, pair_1..pair_n, tie-break]``.

Bin of the sequence with rank ``r`` (first symbol most significant):
``splitmix64(bin_seed XOR r) mod num_bins`` where
``splitmix64(z) = mix(z + 0x9E3779B97F4A7C15)`` and ``mix`` is the SplitMix64
finalizer ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
z *= 0x94D049BB133111EB; z ^= z >> 31`` on wrapping 64-bit words.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels, sampling
from .enumeration import DEFAULT_BUDGET, check_n
from .errors import CapacityError, InputError
from .exponents import channel_exponent, check_rate, source_exponent
from .logmath import hoeffding_halfwidth
from .models import ChannelModel, JointSourceModel, SourceModel, joint_log_prob_batch
from .rng import check_seed, derive_keys, partition, run_chunks
from ._kernels import numpy_impl

MAX_MESSAGES = 2 ** 20
TIE_RTOL = 1e-9
SW_CHUNK = 4096
CHANNEL_CHUNK_CELLS = 1 << 18


def message_count(n, R) -> int:
    """ceil(exp(nR)), at least 2; guarded against rounding just above an integer."""
    x = n * check_rate(R)
    if x > math.log(MAX_MESSAGES):
        raise CapacityError(f"exp(nR) exceeds {MAX_MESSAGES} codewords")
    return max(2, math.ceil(math.exp(x) * (1 - 1e-12)))


def bin_count(n, R, limit) -> int:
    x = n * check_rate(R)
    if x > math.log(limit) + 1:
        return int(limit)
    return max(1, math.ceil(math.exp(x) * (1 - 1e-12)))


def bin_index(ranks, bin_seed, num_bins):
    """Bin of each sequence rank under the SplitMix64 binning hash."""
    ranks = np.asarray(ranks, dtype=np.uint64)
    h = _kernels.splitmix64(np.uint64(check_seed(bin_seed)) ^ ranks.ravel())
    return (h % np.uint64(num_bins)).astype(np.int64).reshape(ranks.shape)


@dataclass(frozen=True, eq=False)
class ChannelSimConfig:
    source: SourceModel
    channel: ChannelModel
    n: int
    rate: float
    codebooks: int = 100
    transmissions: int = 500
    seed: int = 0
    ties_as_errors: bool = False

    @property
    def message_count(self) -> int:
        return message_count(self.n, self.rate)

    def echo(self):
        return {"n": self.n, "rate": self.rate, "messages": self.message_count,
                "codebooks": self.codebooks, "transmissions": self.transmissions,
                "seed": self.seed, "ties_as_errors": self.ties_as_errors}


@dataclass(frozen=True)
class SimResult:
    empirical_error: float
    trials: int
    errors: int
    ci_halfwidth: float
    analytic_bound: float
    bound_satisfied_within_ci: bool
    per_codebook_error: tuple = field(default=())
    config: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["per_codebook_error"] = list(self.per_codebook_error)
        return d


def _result(errors, trials, bound, per_codebook=(), config=None, units=None):
    # ``units`` counts the independent draws behind the estimate; transmissions
    # sharing a codebook are dependent, so the channel CI is taken over codebooks
    rate = errors / trials
    hw = hoeffding_halfwidth(trials if units is None else units)
    return SimResult(rate, trials, int(errors), hw, bound, bool(rate <= bound + hw),
                     tuple(per_codebook), dict(config or {}))


def simulate_channel_code(cfg: ChannelSimConfig, workers=1, analytic=True) -> SimResult:
    """Ensemble-average ML decoding error of i.i.d. random codebooks.

    Every codebook draws ``M`` codewords from the input model; each
    transmission picks a uniform message, passes it through the channel and
    decodes by maximum likelihood. The analytic bound is exp(-n E(R)) for the
    same input model.
    """
    n = check_n(cfg.n)
    seed = check_seed(cfg.seed)
    if cfg.source.size != cfg.channel.x_size:
        raise InputError("source alphabet does not match channel input")
    if cfg.codebooks < 1 or cfg.transmissions < 1:
        raise InputError("codebooks and transmissions must be positive")
    M = cfg.message_count
    src_tables = sampling.chain_tables(cfg.source, n)
    comp_cum, cum, logW, logv = sampling.channel_tables(cfg.channel, n)
    T = int(cfg.transmissions)
    per_chunk = max(1, CHANNEL_CHUNK_CELLS // (M * T))

    def codebooks(lo, hi):
        B = hi - lo
        cs = np.arange(lo, hi, dtype=np.uint64)
        ukeys = derive_keys(seed, 0, np.repeat(cs, M), np.tile(np.arange(M, dtype=np.uint64), B))
        books = sampling.sample_from_uniforms(cfg.source, n, _kernels.uniforms(ukeys, n + 1),
                                              src_tables).reshape(B, M, n)
        tkeys = derive_keys(seed, 1, np.repeat(cs, T), np.tile(np.arange(T, dtype=np.uint64), B))
        u = _kernels.uniforms(tkeys, n + 3)
        book = np.repeat(np.arange(B, dtype=np.int64), T)
        sent = np.minimum((u[:, 0] * M).astype(np.int64), M - 1)
        comp = sampling.pick_component(comp_cum, u[:, 1])
        ys = _kernels.sample_given(np.ascontiguousarray(u[:, 2:n + 2]), comp, books[book, sent], cum)
        err = _kernels.ml_decode(books, book, ys, sent, np.ascontiguousarray(u[:, n + 2]), logW, logv,
                                 TIE_RTOL, bool(cfg.ties_as_errors))
        return np.count_nonzero(err.reshape(B, T), axis=1).tolist()

    counts = [k for chunk in run_chunks(codebooks, partition(int(cfg.codebooks), per_chunk), workers)
              for k in chunk]
    bound = math.nan
    if analytic:
        e, _ = channel_exponent(cfg.source, cfg.channel, n, cfg.rate)
        bound = math.exp(-n * e)
    return _result(sum(counts), int(cfg.codebooks) * T, bound, [k / T for k in counts], cfg.echo(),
                   units=int(cfg.codebooks))


def simulate_slepian_wolf(joint: JointSourceModel, n, R, bin_seed=0, trials=10000, seed=0,
                          workers=1, budget=DEFAULT_BUDGET, ties_as_errors=False,
                          analytic=True) -> SimResult:
    """Random binning of X^n at rate R with MAP decoding given Y^n.

    The analytic reference exp(-n J(R)) is one term of the full random-binning
    bound, so it is a trend diagnostic rather than a guarantee.
    """
    n = check_n(n)
    seed = check_seed(seed)
    R = check_rate(R)
    trials = int(trials)
    if trials < 1:
        raise InputError("trials must be positive")
    X = joint.x_size
    space = X ** n
    if space > budget:
        raise CapacityError(f"MAP decoding scans {space} source sequences, over the budget of {budget}")
    bins = bin_count(n, R, space)
    ranks = np.arange(space, dtype=np.int64)
    bin_of = bin_index(ranks, bin_seed, bins)
    members = ranks[np.argsort(bin_of, kind="stable")]
    bin_ptr = np.concatenate(([0], np.cumsum(np.bincount(bin_of, minlength=bins)))).astype(np.int64)
    tables = sampling.chain_tables(joint, n)
    powers = X ** np.arange(n - 1, -1, -1, dtype=np.int64)
    fast = joint.all_memoryless
    if fast:
        logP, logw = sampling.joint_log_tables(joint, n)

    def chunk(lo, hi):
        keys = derive_keys(seed, 2, np.arange(lo, hi, dtype=np.uint64))
        u = _kernels.uniforms(keys, n + 2)
        xs, ys = sampling.sample_from_uniforms(joint, n, u, tables)
        x_rank = xs @ powers
        u_tie = np.ascontiguousarray(u[:, n + 1])
        if fast:
            err = _kernels.map_decode(bin_ptr, members, bin_of, x_rank, ys, u_tie, logP, logw,
                                      X, TIE_RTOL, bool(ties_as_errors))
        else:
            err = np.empty(hi - lo, dtype=bool)
            for t in range(hi - lo):
                cand = members[bin_ptr[bin_of[x_rank[t]]]:bin_ptr[bin_of[x_rank[t]] + 1]]
                digits = (cand[:, None] // powers[None, :]) % X
                scores = joint_log_prob_batch(joint, digits, np.broadcast_to(ys[t], digits.shape))
                truth = np.array([np.searchsorted(cand, x_rank[t])])
                err[t] = numpy_impl._errors(scores[None, :], truth, u_tie[t:t + 1], TIE_RTOL,
                                            ties_as_errors)[0]
        return int(np.count_nonzero(err))

    errors = sum(run_chunks(chunk, partition(trials, SW_CHUNK), workers))
    bound = math.nan
    if analytic:
        j, _ = source_exponent(joint, n, R, budget=budget)
        bound = math.exp(-n * j)
    echo = {"n": n, "rate": R, "bins": bins, "bin_seed": int(bin_seed), "trials": trials, "seed": seed,
            "ties_as_errors": bool(ties_as_errors)}
    return _result(errors, trials, bound, (), echo)
