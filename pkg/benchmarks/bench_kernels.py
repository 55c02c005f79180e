"""Benchmark the compiled trajectory kernels against the numpy fallback.

Both code paths always exist in curvedflow._kernels; this script times them
side by side on the same workloads (the env flag CURVEDFLOW_NUMBA only
switches which one the library dispatches to).

    python benchmarks/bench_kernels.py [--grid 120x60] [--t-end 1.0]
"""

import argparse
import time

import numpy as np

from curvedflow import _kernels as K
from curvedflow._accel import USE_NUMBA
from curvedflow.interp import spline_coeffs


def timed(fn, *args, repeat=3):
    best = np.inf
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", default="120x60")
    parser.add_argument("--t-end", type=float, default=1.0)
    parser.add_argument("--dt", type=float, default=2e-3)
    args = parser.parse_args()
    n_lam, n_mu = (int(tok) for tok in args.grid.split("x"))

    lams = (np.arange(n_lam) + 0.5) * 2 * np.pi / n_lam
    mus = -1.0 + (np.arange(n_mu) + 0.5) * 2.0 / n_mu
    big_l, big_m = np.meshgrid(lams, mus, indexing="ij")
    seeds = (big_l.ravel(), big_m.ravel())
    flow = (K.QUADRUPOLE, 0.0, 0.0)

    print(f"numba available and enabled: {USE_NUMBA}")
    print(f"seeds: {n_lam * n_mu}, T = {args.t_end}, dt = {args.dt}\n")

    # warm the JIT so compile time is not billed to the benchmark
    K.ftle_map_numba(*flow, seeds[0][:4], seeds[1][:4], 0.01, args.dt)
    K.hyptime_map_numba(*flow, seeds[0][:4], seeds[1][:4], 0.01, args.dt, 0.0)

    t_nb, f_nb = timed(K.ftle_map_numba, *flow, *seeds, args.t_end, args.dt, repeat=2)
    t_np, f_np = timed(K.ftle_map_numpy, *flow, *seeds, args.t_end, args.dt, repeat=2)
    print(f"ftle_map      numba {t_nb:8.3f} s   numpy {t_np:8.3f} s   speedup {t_np / t_nb:5.1f}x")
    print(f"              max |difference| = {np.max(np.abs(f_nb - f_np)):.2e}")

    t_nb, h_nb = timed(K.hyptime_map_numba, *flow, *seeds, args.t_end, args.dt, 0.0, repeat=1)
    t_np, h_np = timed(K.hyptime_map_numpy, *flow, *seeds, args.t_end, args.dt, 0.0, repeat=1)
    print(f"hyptime_map   numba {t_nb:8.3f} s   numpy {t_np:8.3f} s   speedup {t_np / t_nb:5.1f}x")
    print(f"              max |difference| = {np.max(np.abs(h_nb - h_np)):.2e}")

    rng = np.random.default_rng(1)
    field_u = rng.normal(size=(256, 256))
    field_v = rng.normal(size=(256, 256))
    cu, cv = spline_coeffs(field_u), spline_coeffs(field_v)
    xs = rng.uniform(0, 2 * np.pi, 101)
    ys = rng.uniform(0, 2 * np.pi, 101)

    def run_line(step):
        x, y = xs.copy(), ys.copy()
        for _ in range(400):
            step(x, y, cu, cv, cu, cv, 1e-3)
        return x

    K.line_rk4_step_numba(xs.copy(), ys.copy(), cu, cv, cu, cv, 1e-3)  # warm
    t_nb, x_nb = timed(run_line, K.line_rk4_step_numba, repeat=2)
    t_np, x_np = timed(run_line, K.line_rk4_step_numpy, repeat=2)
    print(f"line_rk4x400  numba {t_nb:8.3f} s   numpy {t_np:8.3f} s   speedup {t_np / t_nb:5.1f}x")
    print(f"              max |difference| = {np.max(np.abs(x_nb - x_np)):.2e}")


if __name__ == "__main__":
    main()
