#!/usr/bin/env python3
"""Compare the numba kernel backend against the pure-numpy fallback.

Times the three layers that matter: the Hermitian eigensolver, single
objective evaluations of the block distance, and a full minimize_delta run.
Run after installing the package:

    python3 benchmarks/bench_backends.py [--seed 0]
"""

import argparse
import time

import numpy as np

from qmc import backend, markov, optimize
from qmc.entropy import _entropy_matrix
from qmc.families import psi_x, random_tripartite
from qmc.linalg import rng_from


def timeit(fn, min_time=0.3, min_reps=5):
    fn()  # warm-up (and jit compile on the numba path)
    reps = 0
    t0 = time.perf_counter()
    while True:
        fn()
        reps += 1
        dt = time.perf_counter() - t0
        if dt >= min_time and reps >= min_reps:
            return dt / reps


def bench_eigh(seed):
    rows = []
    rng = rng_from(seed)
    for side in (4, 8, 16, 36, 81):
        g = rng.standard_normal((side, side)) + 1j * rng.standard_normal((side, side))
        h = g + g.conj().T
        per = {}
        for name in backend.BACKENDS:
            backend.set_backend(name)
            per[name] = timeit(lambda: backend.eigh(h))
        rows.append((f"eigh side={side}", per))
    return rows


def bench_objective(seed):
    rows = []
    st = random_tripartite((2, 2, 2), 6, seed)
    rho6 = st.matrix.reshape(2, 2, 2, 2, 2, 2)
    s_rho = _entropy_matrix(st.matrix)
    rng = rng_from(seed, (1,))
    for shape in (((1, 1), (1, 1)), ((2, 2),), ((2, 1), (1, 1))):
        dec = markov.random_decomposition(2, rng, shape=shape)
        w = dec.isometry
        per = {}
        for name in backend.BACKENDS:
            backend.set_backend(name)
            per[name] = timeit(lambda: markov.relent_core(rho6, shape, w, s_rho))
        rows.append((f"objective shape={shape}", per))
    return rows


def bench_minimize(seed):
    st = psi_x(0.5).tripartite()
    cfg = optimize.OptConfig(restarts=2, max_iters=600, seed=seed)
    per = {}
    for name in backend.BACKENDS:
        backend.set_backend(name)
        per[name] = timeit(lambda: optimize.minimize_delta(st, cfg), min_time=0.0, min_reps=1)
    return [("minimize_delta psi(0.5)", per)]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rows = []
    rows += bench_eigh(args.seed)
    rows += bench_objective(args.seed)
    rows += bench_minimize(args.seed)

    width = max(len(name) for name, _ in rows)
    print(f"{'case':<{width}}  {'numba':>12}  {'numpy':>12}  {'speedup':>8}")
    for name, per in rows:
        ratio = per["numpy"] / per["numba"]
        print(f"{name:<{width}}  {per['numba'] * 1e6:>10.1f}us  {per['numpy'] * 1e6:>10.1f}us  {ratio:>7.2f}x")
    backend.set_backend("numba")


if __name__ == "__main__":
    main()
