"""Compare the compiled and numpy marching-squares kernels.

Usage: python benchmarks/bench_kernels.py [--sizes 200,800,1600] [--repeat 5]

Both backends run on the same ARW sample grid; the script prints the best
wall time of each, the speedup and the largest relative disagreement.
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from arithwave import kernels
from arithwave.nodal.fields import sample_arw


def best_time(fn, repeat: int) -> tuple[float, tuple[float, float]]:
    best = math.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="200,800,1600")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=32045)
    args = ap.parse_args()

    field = sample_arw(args.n, seed=0)
    print(f"compiled backend available: {kernels.BACKEND == 'cython'}")
    print(f"{'grid':>6} {'compiled s':>11} {'numpy s':>9} {'speedup':>8} {'rel diff':>9}")
    for size in (int(s) for s in args.sizes.split(",")):
        h = 0.5 / size
        xs = np.arange(size + 1) * h
        values = field.grid(xs, xs)
        args_ = (values, 0.0, 0.0, h, 0.25, 0.25, 0.2)
        tc, lc = best_time(lambda: kernels.contour_lengths(*args_), args.repeat)
        tp, lp = best_time(lambda: kernels.python_contour_lengths(*args_), args.repeat)
        diff = max(abs(a - b) / max(abs(b), 1e-300) for a, b in zip(lc, lp))
        print(f"{size:>6} {tc:>11.4f} {tp:>9.4f} {tp / tc:>8.1f} {diff:>9.1e}")


if __name__ == "__main__":
    main()
