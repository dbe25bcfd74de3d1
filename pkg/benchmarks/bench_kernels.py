"""Timing comparison of the compiled kernels against the NumPy fallback.

Run with ``python benchmarks/bench_kernels.py``. Workloads mirror the hot
paths: the 2D reaction-diffusion right-hand side evaluated inside the
adaptive stepper, the periodic stencils evaluated inside every front-model
right-hand side, and the batched tanh front fit that dominates extraction.
"""

import time

import numpy as np

from phasefront import _kernels_py
from phasefront.numerics import Rng

try:
    from phasefront import _kernels
except ImportError:
    _kernels = None


def timeit(fn, *args, repeat=5, min_time=0.2):
    fn(*args)  # warm up
    best = np.inf
    for _ in range(repeat):
        n, t0 = 0, time.perf_counter()
        while time.perf_counter() - t0 < min_time:
            fn(*args)
            n += 1
        best = min(best, (time.perf_counter() - t0) / n)
    return best


def workloads():
    rng = Rng(0)
    phi = np.tanh(rng.uniform(400 * 400, -2.0, 2.0)).reshape(400, 400)
    front = rng.uniform(400, 10.0, 20.0)
    y = np.linspace(0.0, 90.0, 400)
    width = np.sqrt(0.2)
    cols = np.tanh((front[None, :] - y[:, None]) / width)
    c0 = np.full(400, -1.0 / width)
    d0 = c0 * front

    yield "ac_rhs 400x400", lambda k: k.allen_cahn_rhs_core(phi, -0.1, 0.1, 0.225, 0.2256)
    yield "fd1 row 400", lambda k: k.fd1_periodic(front, 0.225)
    yield "fd2 matrix 500x400", lambda k: k.fd2_periodic(np.tile(front, (500, 1)), 0.225)
    yield "tanh fit 400 cols", lambda k: k.tanh_fit_batch(y, cols, c0, d0, 100, 1e-10)


def main():
    if _kernels is None:
        print("compiled extension not available; showing NumPy backend only")
    header = f"{'kernel':24s} {'numpy':>12s} {'compiled':>12s} {'speedup':>9s}"
    print(header)
    print("-" * len(header))
    for name, call in workloads():
        t_py = timeit(call, _kernels_py)
        if _kernels is not None:
            t_cy = timeit(call, _kernels)
            print(f"{name:24s} {t_py * 1e6:10.1f}us {t_cy * 1e6:10.1f}us {t_py / t_cy:8.2f}x")
        else:
            print(f"{name:24s} {t_py * 1e6:10.1f}us {'-':>12s} {'-':>9s}")


if __name__ == "__main__":
    main()
