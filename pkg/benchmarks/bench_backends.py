#!/usr/bin/env python3
"""Benchmark the compiled estimator kernel against the numpy fallback.

Times pooled_mpl_curve on workload shapes matching the efficiency study
(small samples, many evaluation times) and the variance validation (large
samples, one evaluation time), then an end-to-end simulate_re through
whichever backend is active.

Run:  python benchmarks/bench_backends.py [--reps 20000]
"""

import argparse
import time

import numpy as np

from rssmpl import _mpl_kernel_py
from rssmpl._backend import BACKEND

try:
    from rssmpl import _mpl_kernel
except ImportError:
    _mpl_kernel = None


def _time(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernel():
    rng = np.random.default_rng(0)
    shapes = [
        ("efficiency study", (20_000, 15), 19),
        ("variance check", (5_000, 600), 1),
        ("wide grid", (2_000, 90), 40),
    ]
    print(f"{'workload':<18} {'shape':<14} {'numpy':>10} {'cython':>10} {'speedup':>8}")
    for name, shape, n_t in shapes:
        values = rng.exponential(size=shape)
        ts = np.linspace(0.05, 3.0, n_t)
        t_py = _time(_mpl_kernel_py.pooled_mpl_curve, values, ts)
        if _mpl_kernel is None:
            print(f"{name:<18} {str(shape):<14} {t_py * 1e3:9.1f}ms {'n/a':>10} {'':>8}")
            continue
        t_cy = _time(_mpl_kernel.pooled_mpl_curve, values, ts)
        est_py, cnt_py = _mpl_kernel_py.pooled_mpl_curve(values, ts)
        est_cy, cnt_cy = _mpl_kernel.pooled_mpl_curve(values, ts)
        assert np.array_equal(cnt_py, cnt_cy)
        assert np.allclose(est_py, est_cy, rtol=1e-12, atol=1e-12)
        print(
            f"{name:<18} {str(shape):<14} {t_py * 1e3:9.1f}ms {t_cy * 1e3:9.1f}ms "
            f"{t_py / t_cy:7.1f}x"
        )


def bench_end_to_end(reps):
    from rssmpl import ExperimentConfig, Exponential, Perfect, simulate_re

    config = ExperimentConfig(
        dist=Exponential(1.0), model=Perfect(), n=15, k=3, replications=reps, seed=0
    )
    start = time.perf_counter()
    simulate_re(config)
    elapsed = time.perf_counter() - start
    print(f"\nsimulate_re ({reps} reps, backend={BACKEND}): {elapsed:.2f}s")
    print("re-run with RSSMPL_BACKEND=python to compare the fallback end to end")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=20_000)
    args = parser.parse_args()
    print(f"active backend: {BACKEND}\n")
    bench_kernel()
    bench_end_to_end(args.reps)


if __name__ == "__main__":
    main()
