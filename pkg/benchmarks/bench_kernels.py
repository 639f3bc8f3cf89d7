#!/usr/bin/env python3
"""Benchmark the compiled orbit kernels against the numpy fallback.

Times the three kernel entry points on representative workloads and prints
a side-by-side table.  Run from the repository root:

    python benchmarks/bench_kernels.py [--res 256] [--max-iter 600]
"""

import argparse
import math
import time

import numpy as np

from tanatlas import kernels
from tanatlas.core import FamilyParams
from tanatlas.orbits import trap_radius


def _grid(n, half):
    xs = np.linspace(-half + half / n, half - half / n, n)
    return (xs[None, :] + 1j * xs[:, None]).ravel()


def _time(fn, repeats=3):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--res", type=int, default=256)
    ap.add_argument("--max-iter", type=int, default=600)
    args = ap.parse_args()

    compiled = kernels.compiled_backend()
    fallback = kernels.fallback_backend()
    if compiled is None:
        print("compiled kernels not built; timing the fallback only")
    backends = [("python", fallback)] + ([("compiled", compiled)] if compiled else [])

    lam_shell = 2 * complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
    fp = FamilyParams(lam_shell, 3, 2)
    r_trap = trap_radius(fp)
    zs = _grid(args.res, 2.0)
    lams = _grid(args.res, 2.0)
    lam_center = math.sqrt(math.pi)
    fpc = FamilyParams(lam_center, 2, 2)
    rc = trap_radius(fpc)

    jobs = [
        ("classify_dynamic (shell, p=3 q=2)",
         lambda be: be.classify_dynamic(lam_shell, 3, 2, zs, args.max_iter, r_trap)),
        ("classify_param  (p=3 q=2)",
         lambda be: be.classify_param(3, 2, lams, args.max_iter)),
        ("basin_dem       (center, p=2 q=2)",
         lambda be: be.basin_dem(lam_center, 2, 2, zs, args.max_iter, rc)),
    ]

    cells = zs.size
    print(f"grid {args.res}x{args.res} ({cells} cells), max_iter {args.max_iter}")
    header = f"{'kernel':<36}" + "".join(f"{name:>14}" for name, _ in backends)
    if compiled:
        header += f"{'speedup':>10}"
    print(header)
    for label, job in jobs:
        times = [_time(lambda be=be: job(be)) for _, be in backends]
        row = f"{label:<36}" + "".join(f"{t:>13.3f}s" for t in times)
        if compiled:
            row += f"{times[0] / times[-1]:>9.1f}x"
        print(row)
    # agreement spot check
    if compiled:
        t1 = fallback.classify_param(3, 2, lams, args.max_iter)
        t2 = compiled.classify_param(3, 2, lams, args.max_iter)
        agree = (t1[0] == t2[0]).mean()
        print(f"tag agreement python vs compiled: {agree:.6f}")


if __name__ == "__main__":
    main()
