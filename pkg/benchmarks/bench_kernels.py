#!/usr/bin/env python3
"""Compare the JIT-compiled kernels against the plain-Python fallback.

Run:  python benchmarks/bench_kernels.py [--pairs 2000] [--points 60]

The same functions back both paths (see symrec._kernels), so this only
measures the compilation win, not semantic differences; the test suite
asserts exact agreement separately.
"""

import argparse
import time

import numpy as np

from symrec import _kernels


def bench(label, func, args_list, repeats=3):
    func(*args_list[0])  # warm up (JIT compilation, caches)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for args in args_list:
            func(*args)
        best = min(best, time.perf_counter() - start)
    print(f"  {label:<22} {best * 1000:9.2f} ms")
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--pairs", type=int, default=2000)
    parser.add_argument("--points", type=int, default=60)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"numba available and active: {_kernels.USING_NUMBA}")
    if not _kernels.USING_NUMBA:
        print("(set SYMREC_NO_NUMBA=0 / unset NUMBA_DISABLE_JIT to benchmark the JIT path)")

    seqs = [rng.uniform(0, 1, size=(args.points, 2)) for _ in range(args.pairs * 2)]
    pair_args = [(seqs[2 * i], seqs[2 * i + 1]) for i in range(args.pairs)]

    print(f"\ngreedy warping distance ({args.pairs} pairs x {args.points} points):")
    jit_t = bench("jit kernel", _kernels.gtw_distance_kernel, pair_args)
    plain_t = bench("plain fallback", _kernels._gtw_distance_impl, pair_args)
    print(f"  speedup: {plain_t / jit_t:.1f}x")

    cross_args = [(a, b, False) for a, b in pair_args[: args.pairs // 4]]
    print(f"\nsegment crossing counts ({len(cross_args)} polyline pairs):")
    jit_t = bench("jit kernel", _kernels.count_crossings_kernel, cross_args)
    plain_t = bench("plain fallback", _kernels._count_crossings_impl, cross_args)
    print(f"  speedup: {plain_t / jit_t:.1f}x")

    raster_args = []
    for i in range(args.pairs // 4):
        pts = seqs[i] * 32.0
        raster_args.append((np.zeros((32, 32)), pts[:, 0].copy(), pts[:, 1].copy()))
    print(f"\nbitmap rasterization ({len(raster_args)} polylines on a 32x32 grid):")
    jit_t = bench("jit kernel", _kernels.rasterize_polyline_kernel, raster_args)
    plain_t = bench("plain fallback", _kernels._rasterize_polyline_impl, raster_args)
    print(f"  speedup: {plain_t / jit_t:.1f}x")


if __name__ == "__main__":
    main()
