"""Time the numba kernels against their numpy twins on identical inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

Outputs are also compared, so a run doubles as a bit-identity check.
"""
import argparse
import time

import numpy as np

import infospec as I
from infospec import sampling
from infospec._kernels import numba_impl as NB, numpy_impl as NP
from infospec.codingsim import bin_index
from infospec.rng import derive_keys


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    rng = np.random.default_rng(0)
    n = 16
    keys = derive_keys(1, np.arange(200_000, dtype=np.uint64))
    yield "uniforms (200k x 17)", lambda K: K.uniforms(keys, n + 1)

    src = I.SourceModel.markov([0.5, 0.5], [[0.9, 0.1], [0.2, 0.8]])
    comp_cum, init_cum, trans_cum = sampling.chain_tables(src, n)
    u = NP.uniforms(keys, n)
    comp = np.zeros(len(u), dtype=np.int64)
    yield "sample_chain (200k x 16)", lambda K: K.sample_chain(u, comp, init_cum, trans_cum)

    ch = I.binary_symmetric_channel(0.11)
    _, cum, logW, logv = sampling.channel_tables(ch, n)
    B, M, T = 20, 64, 500
    books = rng.integers(0, 2, (B, M, n))
    book = np.repeat(np.arange(B), T)
    sent = rng.integers(0, M, B * T)
    ys = np.where(rng.random((B * T, n)) < 0.11, 1 - books[book, sent], books[book, sent])
    tie = rng.random(B * T)
    yield "ml_decode (10k words x 64 codewords)", \
        lambda K: K.ml_decode(books, book, ys, sent, tie, logW, logv, 1e-9, False)

    j = I.doubly_symmetric_source(0.11)
    n2, bins = 14, 2 ** 8
    ranks = np.arange(2 ** n2)
    bin_of = bin_index(ranks, 0, bins)
    members = ranks[np.argsort(bin_of, kind="stable")]
    ptr = np.concatenate(([0], np.cumsum(np.bincount(bin_of, minlength=bins))))
    logP, logw = sampling.joint_log_tables(j, n2)
    xr = rng.integers(0, 2 ** n2, 5000)
    y2 = rng.integers(0, 2, (5000, n2))
    t2 = rng.random(5000)
    yield "map_decode (5k trials x 64-member bins)", \
        lambda K: K.map_decode(ptr, members, bin_of, xr, y2, t2, logP, logw, 2, 1e-9, False)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':42s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}  identical")
    for name, fn in cases():
        fn(NB)  # compile outside the timed region
        t_np, a = best_of(lambda: fn(NP), args.repeat)
        t_nb, b = best_of(lambda: fn(NB), args.repeat)
        print(f"{name:42s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}  {np.array_equal(a, b)}")


if __name__ == "__main__":
    main()
