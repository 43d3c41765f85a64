#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the three mod-p kernels and the norm-form box scan on synthetic
workloads sized like the acceptance suite, prints a timing table, and exits
nonzero if results ever disagree between backends.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from k0lat._kernels import load_backend


def time_call(fn, *args, repeat=5):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    name_nb, numba_impl = load_backend("numba")
    name_np, numpy_impl = load_backend("numpy")
    if name_nb != "numba":
        raise SystemExit("numba backend unavailable; nothing to compare")

    rng = np.random.default_rng(0)
    p = 5
    workloads = {
        "rref 400x2400": ("rref", (rng.integers(0, p, size=(2400, 400)).astype(np.int64), p)),
        "rref 64x64": ("rref", (rng.integers(0, p, size=(64, 64)).astype(np.int64), p)),
        "matmul 200^3": (
            "matmul",
            (
                rng.integers(0, p, size=(200, 200)).astype(np.int64),
                rng.integers(0, p, size=(200, 200)).astype(np.int64),
                p,
            ),
        ),
        "charpoly 60x60": ("charpoly", (rng.integers(0, p, size=(60, 60)).astype(np.int64), p)),
        "norm scan 600": ("norm_box_scan", (15, 0, 30, 600, 600)),
    }

    # one warmup pass so jit compilation stays out of the timings
    for label, (kernel, call_args) in workloads.items():
        numba_impl[kernel](*call_args)

    print(f"{'workload':<18} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    mismatches = 0
    for label, (kernel, call_args) in workloads.items():
        t_nb, out_nb = time_call(numba_impl[kernel], *call_args, repeat=args.repeat)
        t_np, out_np = time_call(numpy_impl[kernel], *call_args, repeat=args.repeat)
        same = all(
            np.array_equal(np.asarray(a), np.asarray(b))
            for a, b in zip(
                out_nb if isinstance(out_nb, tuple) else (out_nb,),
                out_np if isinstance(out_np, tuple) else (out_np,),
            )
        )
        if not same:
            mismatches += 1
        flag = "" if same else "  MISMATCH"
        print(f"{label:<18} {t_nb * 1e3:>8.2f}ms {t_np * 1e3:>8.2f}ms {t_np / t_nb:>7.1f}x{flag}")
    if mismatches:
        raise SystemExit(f"{mismatches} kernel results disagreed between backends")


if __name__ == "__main__":
    main()
