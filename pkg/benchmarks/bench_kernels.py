"""Time the numba kernels against their numpy fallbacks.

Run from the repository root::

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sizes 8 32 128 --repeat 20

Both backends are imported directly, so ``QWPERTURB_DISABLE_NUMBA`` has no
effect here. The first numba call of each kernel is a warm-up and is excluded.
"""

import argparse
import time

import numpy as np

from qwperturb._kernels import _numba, _numpy
from qwperturb.sweep import random_symmetric_chain


def _cases(rng, n):
    p = random_symmetric_chain(rng, n)
    d = rng.standard_normal((n, n))
    d = d - d.mean(axis=1, keepdims=True)
    x0 = np.full(n, 1.0 / n)
    g = rng.random((n, n)) + 0.01
    g /= g.sum(axis=1, keepdims=True)
    return {
        "eigvalsh": lambda m: m.jacobi_eigvalsh(p, 1e-14, 60),
        "top_singular_value": lambda m: m.top_singular_value(d, 1e-12, 100_000),
        "tau1": lambda m: m.tau1(g),
        "stationary_power": lambda m: m.stationary_power(g, x0, 1e-14, 10_000),
    }


def _best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 32, 64])
    ap.add_argument("--repeat", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<20}{'n':>5}{'numba [ms]':>14}{'numpy [ms]':>14}{'speedup':>10}")
    for n in args.sizes:
        for name, call in _cases(rng, n).items():
            call(_numba)
            t_nb = _best_of(lambda: call(_numba), args.repeat)
            t_np = _best_of(lambda: call(_numpy), args.repeat)
            print(f"{name:<20}{n:>5}{1e3 * t_nb:>14.3f}{1e3 * t_np:>14.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
