"""Throughput comparison of the jit kernels against the numpy fallbacks.

Run directly:

    python3 bench/bench_kernels.py

The fallback path is what you get with CUSPLAB_DISABLE_NUMBA=1; this script
times both implementations in one process (the public wrappers plus the
private pure-python/numpy bodies) on workloads shaped like the X-ray suite.
"""

import time

import numpy as np

from cusplab import _kernels
from cusplab.surface import punctured_torus


def timeit(fn, *args, repeat=3):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_reduce(n_points=20000):
    surface = punctured_torus()
    moves = np.stack([m.mat for m in surface.reduction_moves()])
    rng = np.random.default_rng(0)
    zs = rng.uniform(-2, 2, n_points) + 1j * np.exp(
        rng.uniform(np.log(0.05), np.log(3.0), n_points)
    )
    t_fast, a = timeit(_kernels.reduce_points, zs, moves, 10000)
    t_py, b = timeit(_kernels._reduce_points_py, zs, moves, 10000)
    assert np.allclose(a[0], b[0])
    return "dirichlet reduction", n_points, t_fast, t_py


def bench_interp(n_points=200000):
    rng = np.random.default_rng(1)
    grid = rng.normal(size=(3, 769, 384))
    pts_r = rng.uniform(0.05, 0.95, n_points)
    pts_t = rng.uniform(0.0, 1.0, n_points)
    dr = 1.0 / 768
    t_fast, a = timeit(_kernels.interp2d, grid, 0.0, dr, pts_r, pts_t)
    t_py, b = timeit(_kernels._interp2d_py, grid, 0.0, dr, 769, 384, pts_r, pts_t)
    assert np.allclose(a, b)
    return "tensor interpolation", n_points, t_fast, t_py


def bench_holder(n=8192, cap=256):
    rng = np.random.default_rng(2)
    u = rng.normal(size=n)
    t_fast, a = timeit(_kernels.holder_seminorm, u, 0.01, 0.5, cap)
    t_py, b = timeit(_kernels._holder_py, u, 0.01, 0.5, cap)
    assert abs(a - b) < 1e-12 * max(1.0, a)
    return "hoelder pair sup", n * cap, t_fast, t_py


def main():
    print(f"numba kernels active: {_kernels.using_numba()}")
    print(f"{'kernel':24s} {'work':>10s} {'active [s]':>12s} {'fallback [s]':>13s} {'speedup':>8s}")
    for bench in (bench_reduce, bench_interp, bench_holder):
        name, work, t_fast, t_py = bench()
        print(f"{name:24s} {work:10d} {t_fast:12.4f} {t_py:13.4f} {t_py / t_fast:8.1f}x")


if __name__ == "__main__":
    main()
