"""Timing of the compiled RK4 chart kernels against the numpy fallback.

Run with ``python benchmarks/bench_kernels.py``.  Prints one line per
(kernel, batch size) with the best-of-3 wall time of each backend.
"""

import argparse
import time

import numpy as np

from lielcs import _pykernels

try:
    from lielcs import _ckernels
except ImportError:
    _ckernels = None


def _best(fn, repeat=3):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def exp_case(B, d=3, steps=1000, seed=0):
    rng = np.random.default_rng(seed)
    C = np.zeros((d, d, d))
    C[0, 1, 2], C[1, 0, 2] = 1.0, -1.0  # Heisenberg
    coeffs = np.array([1.0, -0.5])
    Y = rng.uniform(-1, 1, (B, d))
    U = rng.uniform(-1, 1, (B, d))
    D = np.diag([-1.0, -1.0, -2.0])

    def run(mod):
        y = Y.copy()
        mod.rk4_exp_coords(y, U, D, C, coeffs, 1e-3, steps)
        return y
    return run


def semidirect_case(B, steps=1000, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, (B, 3))
    Z, W = rng.uniform(-1, 1, (B, 2)), rng.uniform(-1, 1, (B, 1))
    Dv = np.diag([-1.0, -1.0])
    A = np.array([[[0.0, -1.0], [1.0, 0.0]]])

    def run(mod):
        x = X.copy()
        mod.rk4_semidirect(x, Z, W, Dv, A, 1e-3, steps)
        return x
    return run


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--batch", type=int, nargs="+", default=[1, 16, 256])
    p.add_argument("--steps", type=int, default=1000)
    args = p.parse_args(argv)
    print(f"{'kernel':<12} {'batch':>6} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, make in (("exp_coords", exp_case), ("semidirect", semidirect_case)):
        for B in args.batch:
            run = make(B, steps=args.steps)
            tp = _best(lambda: run(_pykernels))
            if _ckernels is None:
                print(f"{name:<12} {B:>6} {tp:>10.4f} {'n/a':>10} {'n/a':>8}")
                continue
            assert np.allclose(run(_pykernels), run(_ckernels), atol=1e-11)
            tc = _best(lambda: run(_ckernels))
            print(f"{name:<12} {B:>6} {tp:>10.4f} {tc:>10.4f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
