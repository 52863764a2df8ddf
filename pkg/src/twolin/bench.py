"""Benchmark the compiled generation loop against the pure-Python fallback.

Usage: python -m twolin.bench [--n 1000] [--chi 4.0] [--budget 200000]
                              [--repeats 3]

Runs the same kernel source through numba (when enabled) and as plain
Python, reports ns/generation for both, and checks that the two paths
produce identical results for the same seed.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import _kernels


def _time_chain(fn, seed, n, chi, budget, repeats):
    left = n // 2
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        with np.errstate(over="ignore"):
            out = fn(np.uint64(seed), left // 2, (n - left) // 2, left,
                     n - left, chi, 0.5, budget)
        dt = time.perf_counter() - t0
        best = min(best, dt)
        result = out
    return best, result


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--chi", type=float, default=4.0)
    ap.add_argument("--budget", type=int, default=200_000)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    jit_fn = _kernels.ea_chain_hit_only
    py_fn = jit_fn.py_func if _kernels.NUMBA_ENABLED else jit_fn

    if _kernels.NUMBA_ENABLED:
        _time_chain(jit_fn, args.seed, args.n, args.chi, 1000, 1)  # warm up

    t_py, r_py = _time_chain(py_fn, args.seed, args.n, args.chi,
                             args.budget, args.repeats)
    gens_py = max(1, r_py[1])
    print(f"python   : {t_py:8.3f} s  {1e9 * t_py / gens_py:10.1f} ns/gen "
          f"({gens_py} generations)")

    if _kernels.NUMBA_ENABLED:
        t_jit, r_jit = _time_chain(jit_fn, args.seed, args.n, args.chi,
                                   args.budget, args.repeats)
        gens_jit = max(1, r_jit[1])
        print(f"numba    : {t_jit:8.3f} s  {1e9 * t_jit / gens_jit:10.1f} ns/gen "
              f"({gens_jit} generations)")
        print(f"speedup  : {t_py / t_jit:8.1f} x")
        same = r_py == r_jit
        print(f"identical results across paths: {same}")
        return 0 if same else 1
    print("numba disabled (TWOLIN_NO_NUMBA set or numba missing); "
          "fallback path only")
    return 0


if __name__ == "__main__":
    sys.exit(main())
