import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import infospec as I
from infospec import exponents as E
from infospec.errors import DomainError, InputError
from infospec.models import ChannelModel, JointSourceModel, SourceModel

import oracles as O
from conftest import bsc_mixture, dsbs_mixture, markov_source

LN2 = math.log(2)
U = I.uniform_source()
RHOS = [0.0, 0.25, 0.5, 0.75, 1.0]


def hb(p):
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


def e0_np(p, W, rho):
    """Single-letter E0 on a vector of rho values, straight from the formula."""
    p, W = np.asarray(p), np.asarray(W)
    rho = np.asarray(rho)[:, None, None]
    inner = (p[None, :, None] * W[None] ** (1 / (1 + rho))).sum(axis=1)
    return -np.log((inner ** (1 + rho[:, 0])).sum(axis=1))


def j0_np(P, rho):
    P = np.asarray(P)
    rho = np.asarray(rho)[:, None, None]
    inner = (P[None] ** (1 / (1 + rho))).sum(axis=1)
    return np.log((inner ** (1 + rho[:, 0])).sum(axis=1))


# ---------------------------------------------------------------- closed forms

def test_e0_bsc_rho1_closed_form():
    ref = LN2 - 2 * math.log(math.sqrt(0.11) + math.sqrt(0.89))
    bsc = I.binary_symmetric_channel(0.11)
    for n in (1, 2, 3):
        assert I.gallager_e0(U, bsc, n, 1.0) == pytest.approx(ref, abs=1e-12)
        assert I.gallager_e0(U, bsc, n, 1.0, method="enumerate") == pytest.approx(ref, abs=1e-12)
        assert O.e0(O.iid([0.5, 0.5]), O.dmc(O.bsc(0.11)), 2, 2, n, 1.0) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("rho", RHOS)
def test_identity_channel_e0(rho):
    for n in (1, 4):
        assert I.gallager_e0(U, I.identity_channel(), n, rho) == pytest.approx(rho * LN2, abs=1e-12)


@pytest.mark.parametrize("rho", RHOS)
def test_independent_j0(rho):
    for n in (1, 3, 6):
        assert I.source_j0(I.independent_uniform_pair(), n, rho, method="enumerate") == \
            pytest.approx(rho * LN2, abs=1e-12)


def test_dsbs_j0_rho1():
    ref = 2 * math.log(math.sqrt(0.11) + math.sqrt(0.89))
    j = I.doubly_symmetric_source(0.11)
    for n in (1, 2, 3):
        assert I.source_j0(j, n, 1.0) == pytest.approx(ref, abs=1e-12)
        assert O.j0(O.joint_iid(O.dsbs(0.11)), 2, 2, n, 1.0) == pytest.approx(ref, abs=1e-12)


# ---------------------------------------------------------------- oracle equivalence

CHANNELS = {
    "bsc011": (U, I.binary_symmetric_channel(0.11), [0.5, 0.5], O.bsc(0.11)),
    "skew": (SourceModel.memoryless([0.3, 0.7]), ChannelModel.memoryless([[0.8, 0.2], [0.35, 0.65]]),
             [0.3, 0.7], [[0.8, 0.2], [0.35, 0.65]]),
    "erasure": (U, ChannelModel.memoryless([[0.8, 0.2, 0.0], [0.0, 0.2, 0.8]]),
                [0.5, 0.5], [[0.8, 0.2, 0.0], [0.0, 0.2, 0.8]]),
}


@pytest.mark.parametrize("name", sorted(CHANNELS))
@pytest.mark.parametrize("rho", RHOS)
def test_e0_fast_matches_brute_force(name, rho):
    src, ch, p, W = CHANNELS[name]
    for n in (1, 3, 6) if ch.y_size == 2 else (1, 3, 4):
        fast = I.gallager_e0(src, ch, n, rho, method="fast")
        assert fast == pytest.approx(I.gallager_e0(src, ch, n, rho, method="enumerate"), abs=1e-10)
        if n <= 3:
            assert fast == pytest.approx(O.e0(O.iid(p), O.dmc(W), 2, ch.y_size, n, rho), abs=1e-10)


def test_e0_mixture_and_markov_vs_brute_force():
    W = O.mix([0.5, 0.5], [O.dmc(O.bsc(0.02)), O.dmc(O.bsc(0.3))])
    m = markov_source()
    P = lambda xs: m.initial[xs[0]] * math.prod(m.transition[a, b] for a, b in zip(xs, xs[1:]))
    for rho in (0.3, 1.0):
        assert I.gallager_e0(U, bsc_mixture(), 3, rho) == pytest.approx(
            O.e0(O.iid([0.5, 0.5]), W, 2, 2, 3, rho), abs=1e-12)
        assert I.gallager_e0(m, I.binary_symmetric_channel(0.2), 3, rho) == pytest.approx(
            O.e0(P, O.dmc(O.bsc(0.2)), 2, 2, 3, rho), abs=1e-12)


JOINTS = {
    "dsbs011": I.doubly_symmetric_source(0.11),
    "dsbs025": I.doubly_symmetric_source(0.25),
    "pc": I.perfectly_correlated_pair(),
    "indep": I.independent_uniform_pair(),
    "tv": JointSourceModel.memoryless([O.dsbs(0.1), [[0.1, 0.2], [0.3, 0.4]]]),
}


@pytest.mark.parametrize("name", sorted(JOINTS))
@pytest.mark.parametrize("rho", RHOS)
def test_j0_fast_matches_enumeration(name, rho):
    j = JOINTS[name]
    for n in (1, 4, 6):
        assert I.source_j0(j, n, rho, method="fast") == pytest.approx(
            I.source_j0(j, n, rho, method="enumerate"), abs=1e-10)


def test_j0_mixture_vs_brute_force():
    P = O.mix([0.5, 0.5], [O.joint_iid(O.dsbs(0.05)), O.joint_iid(O.dsbs(0.2))])
    for rho in (0.2, 0.9):
        assert I.source_j0(dsbs_mixture(), 3, rho) == pytest.approx(O.j0(P, 2, 2, 3, rho), abs=1e-12)


# ---------------------------------------------------------------- shape properties

ALL_PAIRS = [(U, I.binary_symmetric_channel(0.11)), (U, bsc_mixture()),
             (markov_source(), I.binary_symmetric_channel(0.2))]
ALL_JOINTS = list(JOINTS.values()) + [dsbs_mixture()]


@pytest.mark.parametrize("k", range(len(ALL_PAIRS)))
def test_e0_shape(k):
    src, ch = ALL_PAIRS[k]
    grid = np.linspace(0, 1, 50)
    v = np.array([I.gallager_e0(src, ch, 5, r) for r in grid])
    assert abs(v[0]) <= 1e-12
    assert np.all(v >= -1e-12) and np.all(np.diff(v) >= -1e-12)
    assert np.all(np.diff(v, 2) <= 1e-10)


@pytest.mark.parametrize("k", range(len(ALL_JOINTS)))
def test_j0_shape(k):
    j = ALL_JOINTS[k]
    grid = np.linspace(0, 1, 50)
    v = np.array([I.source_j0(j, 5, r) for r in grid])
    assert abs(v[0]) <= 1e-12
    assert np.all(v >= -1e-12) and np.all(np.diff(v) >= -1e-12)
    assert np.all(np.diff(v, 2) >= -1e-10)
    assert np.all(v <= grid * LN2 + 1e-12)


def test_rho_clamp_and_reject():
    with pytest.warns(RuntimeWarning):
        assert I.gallager_e0(U, I.identity_channel(), 1, 1 + 1e-16 + 1e-12) == pytest.approx(LN2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert I.gallager_e0(U, I.identity_channel(), 1, -0.0) == 0.0
    with pytest.raises(InputError):
        I.source_j0(I.independent_uniform_pair(), 1, 1.1)


# ---------------------------------------------------------------- rho_n

def test_rho_n_channel_examples():
    assert I.rho_n_channel(0.5, math.exp(-4), 2) == 1.0
    assert I.rho_n_channel(0.1, 0.01, 100) == pytest.approx(math.log(100) / 20, abs=1e-12)
    assert I.rho_n_channel(0.1, 0.01, 100) == pytest.approx(0.23026, abs=1e-5)
    assert I.rho_n_channel(0.3, 0.0, 7) == 1.0
    assert I.rho_n_channel(0.3, 1.0, 7) == 0.0
    with pytest.raises(InputError):
        I.rho_n_channel(0.0, 0.1, 3)


def test_rho_n_source_examples():
    assert I.rho_n_source(LN2, 0.3, 5, LN2) == 1.0
    assert I.rho_n_source(LN2 - 0.1, 0.01, 100, LN2) == pytest.approx(0.23026, abs=1e-5)
    assert I.rho_n_source(0.2, 1.0, 5, LN2) == 0.0
    with pytest.raises(InputError):
        I.rho_n_source(0.2, 0.1, 5, 0.0)


# ---------------------------------------------------------------- theorem checks

def test_theorem1_identity_example():
    r = I.verify_theorem1(U, I.identity_channel(), 4, LN2 - 0.05)
    assert r.epsilon_n == 0.0 and r.rho_n == 1.0
    assert r.lhs == pytest.approx(LN2, abs=1e-12)
    assert r.rhs == pytest.approx(LN2 - 0.05 - 3 * LN2 / 4, abs=1e-12)
    assert r.holds


def test_theorem1_bsc_and_mixture():
    t = LN2 - hb(0.11) - 0.05
    r = I.verify_theorem1(U, I.binary_symmetric_channel(0.11), 8, t)
    assert r.holds and r.slack > 0
    assert I.verify_theorem1(U, bsc_mixture(), 6, 0.05).holds


def test_theorem2_examples():
    r = I.verify_theorem2(I.perfectly_correlated_pair(), 4, 0.1)
    assert r.epsilon_n == 0.0 and r.rho_n == 1.0 and r.lhs == pytest.approx(0.0, abs=1e-15)
    assert r.rhs == pytest.approx(0.1 + 3 * LN2 / 4) and r.holds
    assert I.verify_theorem2(I.doubly_symmetric_source(0.11), 8, hb(0.11) + 0.05).holds
    assert I.verify_theorem2(dsbs_mixture(), 6, hb(0.2) + 0.1).holds


@pytest.mark.parametrize("n", [2, 5, 10])
def test_theorems_hold_markov(n):
    src, ch = markov_source(), I.binary_symmetric_channel(0.15)
    for t in np.linspace(0.02, 0.5, 6):
        assert I.verify_theorem1(src, ch, n, t).holds
    j = I.induce_joint(src, ch)
    for t in np.linspace(0.1, 0.68, 6):
        assert I.verify_theorem2(j, n, t).holds


def test_threshold_grid_interior():
    g = E.threshold_grid(0.0, 1.0, 10)
    assert len(g) == 10 and g[0] > 0 and g[-1] < 1


def _n_rho_n(n, t=0.29):
    spec = I.exact_spectrum((U, I.binary_symmetric_channel(0.11)), n)
    return n * I.rho_n_channel(t, I.epsilon_at(spec, t).epsilon, n), I.epsilon_at(spec, t).epsilon


@pytest.mark.parametrize("n", [4, 8, 16, 64])
def test_epsilon_matches_binomial_tail(n):
    from scipy.stats import binom
    a, b = math.log(0.89 / 0.5), math.log(0.11 / 0.5)
    kmin = min(k for k in range(n + 1) if (a * (n - k) + b * k) / n < 0.29)
    assert _n_rho_n(n)[1] == pytest.approx(binom.sf(kmin - 1, n, 0.11), rel=1e-12)


def test_n_rho_n_grows_eventually():
    # the binomial lattice makes small n non-monotone (see the acceptance suite)
    vals = [_n_rho_n(n)[0] for n in (64, 128, 256)]
    assert vals[0] < vals[1] < vals[2]


# ---------------------------------------------------------------- exponents

def test_channel_exponent_r0_and_large_r():
    bsc = I.binary_symmetric_channel(0.11)
    v, rho = I.channel_exponent(U, bsc, 3, 0.0)
    assert rho == 1.0 and v == pytest.approx(I.gallager_e0(U, bsc, 3, 1.0), abs=1e-14)
    v, rho = I.channel_exponent(U, bsc, 3, 10.0)
    assert rho == 0.0 and v == 0.0


def test_channel_exponent_dense_grid():
    grid = np.linspace(0, 1, 10001)
    ref = np.max(e0_np([0.5, 0.5], O.bsc(0.11), grid) - grid * 0.2)
    v, _ = I.channel_exponent(U, I.binary_symmetric_channel(0.11), 7, 0.2)
    assert v == pytest.approx(ref, abs=1e-8)
    assert v >= ref - 1e-15


def test_source_exponent_limits():
    j = I.doubly_symmetric_source(0.11)
    v, rho = I.source_exponent(j, 3, 0.0)
    assert rho == 0.0 and v == 0.0
    v, rho = I.source_exponent(j, 3, 0.8)
    assert rho == 1.0 and v == pytest.approx(0.8 - I.source_j0(j, 3, 1.0), abs=1e-14)


def test_source_exponent_dense_grid():
    grid = np.linspace(0, 1, 10001)
    ref = np.max(grid * 0.45 - j0_np(O.dsbs(0.11), grid))
    v, _ = I.source_exponent(I.doubly_symmetric_source(0.11), 5, 0.45)
    assert v == pytest.approx(ref, abs=1e-8)


def test_optimize_iid_input_symmetric_and_asymmetric():
    v, rho, p = E.optimize_iid_input(I.binary_symmetric_channel(0.11), 0.1)
    np.testing.assert_allclose(p, [0.5, 0.5], atol=1e-6)
    assert v == pytest.approx(I.channel_exponent(U, I.binary_symmetric_channel(0.11), 1, 0.1)[0], abs=1e-10)
    Z = ChannelModel.memoryless([[1.0, 0.0], [0.4, 0.6]])
    v, rho, p = E.optimize_iid_input(Z, 0.05)
    grid = np.linspace(0, 1, 2001)
    best = max(np.max(e0_np([a, 1 - a], Z.matrices[0], grid) - 0.05 * grid)
               for a in np.linspace(0.001, 0.999, 999))
    assert v >= best - 1e-7


def test_optimize_rejects_time_varying():
    with pytest.raises(InputError):
        E.optimize_iid_input(ChannelModel.memoryless([O.bsc(0.1), O.bsc(0.2)]), 0.1)


# ---------------------------------------------------------------- tilted law

def test_tilted_rho0_is_base():
    j = I.doubly_symmetric_source(0.11)
    tj = I.tilted_joint(j, 3, 0.0)
    from infospec.enumeration import joint_table
    np.testing.assert_allclose(tj.table(), joint_table(j, 3), atol=1e-12)


def test_tilted_four_cell():
    P = np.array(O.dsbs(0.11))
    rho = 1.0
    w = P ** 0.5 * (P ** 0.5).sum(axis=0)[None, :] ** rho
    w /= w.sum()
    tj = I.tilted_joint(I.doubly_symmetric_source(0.11), 1, rho)
    np.testing.assert_allclose(np.exp(tj.table()), w, atol=1e-15)


@pytest.mark.parametrize("j", [dsbs_mixture(), I.doubly_symmetric_source(0.25),
                               I.induce_joint(markov_source(), I.binary_symmetric_channel(0.2))])
@pytest.mark.parametrize("rho", [0.1, 0.5, 0.9])
def test_tilted_normalization(j, rho):
    tj = I.tilted_joint(j, 4, rho)
    assert tj.total_mass() == pytest.approx(1.0, abs=1e-10)
    assert tj.log_normalizer == pytest.approx(4 * I.source_j0(j, 4, rho), abs=1e-10)


def test_derivative_examples():
    from infospec.enumeration import joint_table
    j = I.doubly_symmetric_source(0.11)
    assert I.j0_derivative(j, 3, 0.0) == pytest.approx(hb(0.11), abs=1e-12)
    for rho in (0.0, 0.4, 1.0):
        assert I.j0_derivative(I.independent_uniform_pair(), 3, rho) == pytest.approx(LN2, abs=1e-12)


@pytest.mark.parametrize("j", [I.doubly_symmetric_source(0.11), dsbs_mixture(),
                               I.induce_joint(markov_source(), I.binary_symmetric_channel(0.2))])
@pytest.mark.parametrize("rho", [0.1, 0.5, 0.9])
def test_derivative_finite_difference(j, rho):
    h = 1e-5
    fd = (I.source_j0(j, 4, rho + h) - I.source_j0(j, 4, rho - h)) / (2 * h)
    assert I.j0_derivative(j, 4, rho) == pytest.approx(fd, rel=1e-4)


def test_solve_rho0_roundtrip():
    j = I.doubly_symmetric_source(0.11)
    lo, hi = I.j0_derivative(j, 3, 0.0), I.j0_derivative(j, 3, 1.0)
    for R in np.linspace(lo, hi, 7)[1:-1]:
        rho0 = I.solve_rho0(j, 3, R)
        assert I.j0_derivative(j, 3, rho0) == pytest.approx(R, abs=1e-9)
        assert rho0 * R - I.source_j0(j, 3, rho0) == pytest.approx(I.source_exponent(j, 3, R)[0], abs=1e-8)
    assert I.solve_rho0(j, 3, lo + 1e-9) < 1e-3
    assert I.solve_rho0(j, 3, hi - 1e-9) > 1 - 1e-3


def test_solve_rho0_domain_errors():
    with pytest.raises(DomainError, match="strictly inside"):
        I.solve_rho0(I.doubly_symmetric_source(0.11), 2, 0.1)
    with pytest.raises(DomainError):
        I.solve_rho0(I.perfectly_correlated_pair(), 2, 0.1)


# ---------------------------------------------------------------- curves

def test_curve_csv_and_validation():
    c = E.e0_curve(U, I.identity_channel(), 2, [0.0, 0.5, 1.0])
    lines = c.to_csv("bits").splitlines()
    assert lines[0] == "rho,exponent_bits" and lines[-1] == "1,1"
    with pytest.raises(InputError):
        E.ExponentCurve("x", 1, "rho", ((0.5, 0.1), (0.5, 0.2)))


@settings(max_examples=30, deadline=None)
@given(p=st.floats(0.01, 0.99), q=st.floats(0.0, 0.5), rho=st.floats(0.0, 1.0), n=st.integers(1, 4))
def test_e0_property_vs_numpy_formula(p, q, rho, n):
    src = SourceModel.memoryless([p, 1 - p])
    ch = I.binary_symmetric_channel(q)
    ref = e0_np([p, 1 - p], O.bsc(q), [rho])[0]
    assert I.gallager_e0(src, ch, n, rho) == pytest.approx(ref, abs=1e-12)
    assert I.gallager_e0(src, ch, n, rho, method="enumerate") == pytest.approx(ref, abs=1e-11)
