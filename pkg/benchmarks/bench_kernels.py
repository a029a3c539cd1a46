#!/usr/bin/env python3
"""Benchmark the compiled residual/Jacobian kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--sizes 201,801,3201] [--repeats 200]
"""

import argparse
import time

import numpy as np

from etsim.kernels import available_backends


def make_inputs(rng, N):
    u = np.empty(3 * N)
    u[0::3] = rng.uniform(0.3, 1.7, N)
    u[1::3] = rng.normal(0.0, 5.0, N)
    u[2::3] = rng.uniform(0.5, 1.5, N)
    u_prev = u + rng.normal(0.0, 0.01, 3 * N)
    C = rng.uniform(0.4, 1.0, N)
    thL = rng.uniform(0.5, 1.6, N)
    f = np.zeros(N)
    bc = np.array([C[0], C[-1], 0.0, 38.7, thL[0], thL[-1]])
    res_args = (u, u_prev, C, thL, f, f, f, 1.0 / (N - 1), 1.25e-4,
                3e-3, 3.126, 4.88e-2, 0.5, 0.5, 0.5, 0.5, bc, False, C)
    jac_args = (u, C, thL, 1.0 / (N - 1), 1.25e-4, 3e-3, 3.126, 4.88e-2,
                0.5, 0.5, False)
    return res_args, jac_args


def best_of(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="201,801,3201")
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = available_backends()
    rng = np.random.default_rng(0)
    print(f"backends: {', '.join(backends)}   (best of {args.repeats} calls, microseconds)")
    header = f"{'kernel':<10}{'N':>6}" + "".join(f"{name:>12}" for name in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for N in sizes:
        res_args, jac_args = make_inputs(rng, N)
        for kernel, call_args in (("residual", res_args), ("jacobian", jac_args)):
            times = {}
            for name, mod in backends.items():
                fn = mod.residual if kernel == "residual" else mod.jacobian_banded
                times[name] = best_of(fn, call_args, args.repeats)
            row = f"{kernel:<10}{N:>6}" + "".join(f"{times[n] * 1e6:>12.1f}" for n in backends)
            if "cython" in times and "python" in times:
                row += f"{times['python'] / times['cython']:>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
