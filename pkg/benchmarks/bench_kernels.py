#!/usr/bin/env python3
"""Benchmark the jitted kernels against their pure-Python originals.

The pure versions are self-contained (no jitted callees), so timing both
in one process is a fair comparison. Run after `pip install -e .`:

    python benchmarks/bench_kernels.py
"""

import math
import time

import numpy as np

from expgi import _kernels as K
from expgi.oracle import OracleConfig, _depth_arrays
from expgi.table import load_bundled_table, lookup_v


def time_fn(fn, repeats=3):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_trials(trials=2000, n_total=100):
    table = load_bundled_table()
    vtab = np.full(n_total + 3, np.nan)
    for n in range(2, n_total + 3):
        vtab[n] = lookup_v(table, n, 0.99)
    means = np.array([0.5, 0.9])
    rng = np.random.default_rng(0)
    us = rng.random((trials, 2 * n_total))

    def run(fn):
        def inner():
            for i in range(trials):
                fn(n_total, means, 1, 5, 0.5, vtab, us[i, :n_total], us[i, n_total:])

        return inner

    K.simulate_trial(n_total, means, 1, 5, 0.5, vtab, us[0, :n_total], us[0, n_total:])
    return (
        f"trial loop ({trials} GI trials of {n_total})",
        time_fn(run(K.simulate_trial)),
        time_fn(run(K._simulate_trial_py), repeats=1),
    )


def bench_betainc(evals=20000):
    rng = np.random.default_rng(1)
    xs = rng.uniform(0.001, 0.999, evals)
    shapes = rng.uniform(0.5, 150.0, (evals, 2))

    def run(fn):
        def inner():
            for x, (a, b) in zip(xs, shapes):
                fn(x, a, b)

        return inner

    K.reg_inc_beta(0.5, 3.0, 4.0)
    return (
        f"incomplete beta ({evals} evaluations)",
        time_fn(run(K.reg_inc_beta)),
        time_fn(run(K._reg_inc_beta_py), repeats=1),
    )


def bench_oracle_dp(evals=3):
    cfg = OracleConfig.for_discount(0.9)
    zbar, shifts = _depth_arrays(2, cfg)
    span = 3.0 * math.log((2 + cfg.horizon) / 2) + 3.0 * float(shifts[0].max()) + 2.0
    dx = span / cfg.grid_points
    pad = int(float(shifts.max()) / dx) + 2

    def run(fn):
        def inner():
            for lam in np.linspace(2.0, 5.0, evals):
                fn(lam, cfg.d, 2.0, math.log(2.0), dx, cfg.grid_points, pad, zbar, shifts)

        return inner

    K.oracle_continuation(3.0, cfg.d, 2.0, math.log(2.0), dx, cfg.grid_points, pad, zbar, shifts)
    return (
        f"index DP sweep ({evals} evaluations, d=0.9)",
        time_fn(run(K.oracle_continuation)),
        time_fn(run(K._oracle_continuation_py), repeats=1),
    )


def main():
    mode = "numba @njit" if K.NUMBA_ENABLED else "pure python (numba disabled)"
    print(f"active fast path: {mode}")
    print(f"{'kernel':<42} {'fast':>10} {'pure py':>10} {'speedup':>8}")
    for name, fast, slow in (bench_trials(), bench_betainc(), bench_oracle_dp()):
        print(f"{name:<42} {fast:>9.3f}s {slow:>9.3f}s {slow / fast:>7.1f}x")


if __name__ == "__main__":
    main()
