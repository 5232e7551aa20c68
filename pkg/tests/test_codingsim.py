import math

import numpy as np
import pytest
from scipy.stats import binom

import infospec as I
from infospec import codingsim as C
from infospec.errors import CapacityError, InputError
from infospec.models import JointSourceModel

from conftest import bsc_mixture, markov_source

U = I.uniform_source()
MASK = (1 << 64) - 1


def splitmix64_py(z):
    z = (z + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def test_message_count():
    assert C.message_count(4, 0.3) == 4
    assert C.message_count(10, 0.0) == 2
    assert C.message_count(10, math.log(2) * 0.3) == 8
    with pytest.raises(CapacityError):
        C.message_count(100, 0.5)


def test_bin_hash_is_documented_splitmix():
    ranks = np.arange(300)
    got = C.bin_index(ranks, 0xDEADBEEF, 37)
    ref = [splitmix64_py(0xDEADBEEF ^ r) % 37 for r in range(300)]
    assert got.tolist() == ref


def collision_error(n, M, ties_as_errors):
    """Exact error on a noiseless channel from the binomial count of colliding codewords."""
    q = 2.0 ** -n
    k = np.arange(M)
    pk = binom.pmf(k, M - 1, q)
    if ties_as_errors:
        return float(pk[1:].sum())
    return float((pk * k / (k + 1)).sum())


@pytest.mark.parametrize("channel", [I.identity_channel(), I.binary_symmetric_channel(0.0)])
@pytest.mark.parametrize("ties", [False, True])
def test_noiseless_collision_oracle(channel, ties):
    cfg = C.ChannelSimConfig(U, channel, 4, 0.3, codebooks=40000, transmissions=5, seed=11,
                             ties_as_errors=ties)
    r = C.simulate_channel_code(cfg)
    assert cfg.message_count == 4
    assert abs(r.empirical_error - collision_error(4, 4, ties)) <= r.ci_halfwidth
    assert r.bound_satisfied_within_ci


def test_m2_identity_is_two_to_minus_n():
    cfg = C.ChannelSimConfig(U, I.identity_channel(), 5, 0.0, codebooks=60000, transmissions=4,
                             seed=3, ties_as_errors=True)
    r = C.simulate_channel_code(cfg)
    assert abs(r.empirical_error - 2.0 ** -5) <= r.ci_halfwidth
    cfg = C.ChannelSimConfig(U, I.identity_channel(), 5, 0.0, codebooks=60000, transmissions=4, seed=3)
    r = C.simulate_channel_code(cfg)
    assert abs(r.empirical_error - 2.0 ** -6) <= r.ci_halfwidth


@pytest.mark.parametrize("pair", [(U, I.binary_symmetric_channel(0.11)), (U, bsc_mixture()),
                                  (markov_source(), I.binary_symmetric_channel(0.05))])
def test_channel_bound_within_ci(pair):
    cfg = C.ChannelSimConfig(*pair, 10, 0.05, codebooks=100, transmissions=200, seed=8)
    r = C.simulate_channel_code(cfg)
    assert r.trials == 20000 and len(r.per_codebook_error) == 100
    assert r.bound_satisfied_within_ci, r


def test_ci_counts_codebooks():
    cfg = C.ChannelSimConfig(U, I.identity_channel(), 3, 0.1, codebooks=50, transmissions=40, seed=1)
    r = C.simulate_channel_code(cfg, analytic=False)
    assert r.ci_halfwidth == pytest.approx(math.sqrt(math.log(200) / 100))


def test_channel_determinism_across_workers():
    cfg = C.ChannelSimConfig(U, bsc_mixture(), 9, 0.2, codebooks=16, transmissions=100, seed=99)
    runs = [C.simulate_channel_code(cfg, workers=w, analytic=False).to_dict() for w in (1, 4, 8)]
    assert runs[0] == runs[1] == runs[2]


def test_channel_input_errors():
    with pytest.raises(InputError):
        C.simulate_channel_code(C.ChannelSimConfig(I.uniform_source(3), I.identity_channel(), 3, 0.1))
    with pytest.raises(InputError):
        C.simulate_channel_code(C.ChannelSimConfig(U, I.identity_channel(), 3, 0.1, codebooks=0))


def test_sw_perfect_pair_never_errs():
    r = C.simulate_slepian_wolf(I.perfectly_correlated_pair(), 8, 0.1, trials=3000, seed=1)
    assert r.errors == 0


def test_sw_trend_and_converse():
    j = I.doubly_symmetric_source(0.11)
    errs = [C.simulate_slepian_wolf(j, n, 0.55, bin_seed=1, trials=20000, seed=2).empirical_error
            for n in (8, 10, 12)]
    assert errs[0] > errs[1] > errs[2]
    assert C.simulate_slepian_wolf(j, 12, 0.2, trials=5000, seed=2).empirical_error > 0.1


def test_sw_markov_path_matches_kernel_path():
    # a Markov joint whose rows all equal the i.i.d. law decodes like the memoryless model
    P = np.array([[0.445, 0.055], [0.055, 0.445]])
    mk = JointSourceModel.markov(P, np.tile(P.ravel(), (4, 1)))
    iid = JointSourceModel.memoryless(P)
    a = C.simulate_slepian_wolf(mk, 7, 0.4, trials=1500, seed=6, analytic=False)
    b = C.simulate_slepian_wolf(iid, 7, 0.4, trials=1500, seed=6, analytic=False)
    assert a.errors == b.errors


def test_sw_determinism_and_budget():
    j = I.doubly_symmetric_source(0.2)
    runs = [C.simulate_slepian_wolf(j, 9, 0.5, trials=9000, seed=4, workers=w, analytic=False).to_dict()
            for w in (1, 4, 8)]
    assert runs[0] == runs[1] == runs[2]
    with pytest.raises(CapacityError):
        C.simulate_slepian_wolf(j, 30, 0.5, trials=10)
