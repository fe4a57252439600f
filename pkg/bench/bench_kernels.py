#!/usr/bin/env python3
"""Compare the compiled kernels against the numpy fallback.

Times the three pointwise kernels on their own and a full stepper
advance with each backend selected, printing a small table. Run from
the repository root:

    python3 bench/bench_kernels.py [--n 256] [--repeat 20]
"""

import argparse
import time

import numpy as np

from dendrix import kernels
from dendrix.model import ModelParams
from dendrix.spectral import Grid, RealField
from dendrix.stepping import Stepper


def timeit(fn, repeat):
    fn()  # warm up
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_pointwise(n, repeat):
    rng = np.random.default_rng(0)
    phi = rng.standard_normal((n, n))
    px, py = rng.standard_normal((2, n, n))
    pz = rng.standard_normal((n, n))
    rows = []
    for name in kernels.available_backends():
        kernels.use_backend(name)
        rows.append((
            name,
            timeit(lambda: kernels.double_well(phi, 0.05), repeat),
            timeit(lambda: kernels.aniso_2d(px, py, 0.05, 4, True, 1e-12),
                   repeat),
            timeit(lambda: kernels.aniso_3d(px, py, pz, 0.05, 1e-12), repeat),
        ))
    return rows


def bench_advance(n, repeat):
    params = ModelParams(
        tau=100.0, eps=0.15, lam=1.0, latent_heat=1.0, diffusivity=0.225,
        sigma=0.05, folds=4, s1=4.0, s2=4.0, aniso_form="quartic",
    )
    grid = Grid((n, n))
    x, y = grid.coords()
    r = np.sqrt((x - np.pi) ** 2 + (y - np.pi) ** 2)
    phi0 = RealField(grid, np.tanh((1.5 - r) / 0.2))
    u0 = RealField(grid, np.full(grid.shape, -0.55))

    rows = []
    for name in kernels.available_backends():
        kernels.use_backend(name)

        def one_step():
            stepper = Stepper(grid, params, 0.05, 2)
            stepper.start(phi0, u0)
            stepper.advance()

        rows.append((name, timeit(one_step, repeat)))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=256, help="grid points per side")
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    default = kernels.BACKEND
    try:
        print(f"grid {args.n} x {args.n}, best of {args.repeat}\n")
        print(f"{'backend':>8}  {'double_well':>12}  {'aniso_2d':>12}  "
              f"{'aniso_3d':>12}")
        for name, tw, t2, t3 in bench_pointwise(args.n, args.repeat):
            print(f"{name:>8}  {tw * 1e3:>10.2f}ms  {t2 * 1e3:>10.2f}ms  "
                  f"{t3 * 1e3:>10.2f}ms")

        print(f"\n{'backend':>8}  {'full advance':>14}")
        for name, t in bench_advance(args.n, args.repeat):
            print(f"{name:>8}  {t * 1e3:>12.2f}ms")
    finally:
        kernels.use_backend(default)


if __name__ == "__main__":
    main()
