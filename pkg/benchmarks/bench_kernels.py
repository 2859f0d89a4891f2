"""Time the numba and numpy variants of the hot kernels side by side.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The numba column reads ``n/a`` when numba is missing or disabled with
``OIALAB_DISABLE_NUMBA=1``. Each timing is the best of ``--repeat`` runs
after one warm-up call (which also triggers JIT compilation).
"""

import argparse
import time

import numpy as np

from oialab import kernels


def _waterfill_case(rng, batch, width):
    levels = np.sort(rng.exponential(size=(batch, width)), axis=1)
    budgets = rng.uniform(0.1, 100.0, size=batch)
    return levels, budgets


def _stieltjes_case(rng, npts, natoms):
    z = -np.geomspace(1e-3, 1e3, npts)
    p1, w1 = rng.uniform(0.1, 5.0, natoms), rng.dirichlet(np.ones(natoms))
    p2, w2 = rng.uniform(0.1, 5.0, natoms), rng.dirichlet(np.ones(natoms))
    return (z, p1, w1, 0.75, p2, w2, 1.25)


def best_of(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    cases = [
        ("waterfill 1e5 x 8", kernels.waterfill_levels_numpy, kernels.waterfill_levels_numba,
         _waterfill_case(rng, 100_000, 8)),
        ("waterfill 1e4 x 64", kernels.waterfill_levels_numpy, kernels.waterfill_levels_numba,
         _waterfill_case(rng, 10_000, 64)),
        ("stieltjes 256 z, 64 atoms", kernels.stieltjes_fixed_point_numpy,
         kernels.stieltjes_fixed_point_numba, _stieltjes_case(rng, 256, 64)),
        ("stieltjes 4096 z, 8 atoms", kernels.stieltjes_fixed_point_numpy,
         kernels.stieltjes_fixed_point_numba, _stieltjes_case(rng, 4096, 8)),
    ]
    print(f"backend: {kernels.BACKEND}")
    print(f"{'kernel':<28}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, f_np, f_nb, case in cases:
        t_np = best_of(f_np, case, args.repeat)
        if kernels.BACKEND == "numba":
            t_nb = best_of(f_nb, case, args.repeat)
            nb, sp = f"{1e3 * t_nb:12.2f}", f"{t_np / t_nb:9.1f}x"
        else:
            nb, sp = f"{'n/a':>12}", f"{'':>10}"
        print(f"{name:<28}{1e3 * t_np:12.2f}{nb}{sp}")


if __name__ == "__main__":
    main()
