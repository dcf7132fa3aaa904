"""Time the compiled kernels against the pure-Python fallback.

Usage::

    python benchmarks/bench_kernels.py [--sizes 201,801,3201] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from mswso import _kernels_py

try:
    from mswso import _kernels as _compiled
except ImportError:
    _compiled = None


def _cases(n, rng):
    sup = np.where(np.arange(n - 1) < n // 2, 1.0, 2.0).astype(complex)
    x0 = (1 + 0.1 * rng.standard_normal(n)).astype(complex)
    mul = (0.75 + 0.01 * rng.standard_normal(n)).astype(complex)
    add = rng.standard_normal(n).astype(complex)
    return {
        # sigma_min on the outer circle of the step (1 -> 2) section
        "inverse_iteration": lambda impl: impl.inverse_iteration(-2.0 + 0j, sup, x0, 1e-10, 10_000),
        "affine_recurrence": lambda impl: impl.affine_recurrence(mul, add, 0j),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="201,801,3201")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled extension not built; run `pip install -e .` first")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':<20}{'n':>7}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for n in (int(s) for s in args.sizes.split(",")):
        for name, fn in _cases(n, rng).items():
            py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat))
            cy = min(timeit.repeat(lambda: fn(_compiled), number=1, repeat=args.repeat))
            print(f"{name:<20}{n:>7}{py * 1e3:>14.3f}{cy * 1e3:>14.3f}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
