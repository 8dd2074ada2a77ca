"""Time the compiled mode kernel against the NumPy fallback.

Usage::

    python3 bench/bench_kernels.py --n 2000 --points 513 --substeps 8 --repeat 3

Uses J != U so every momentum mode is propagated separately. Reports the
best wall time per backend, the speedup, and the largest difference in
ln F between the two backends.
"""
import argparse
import sys
import time

import numpy as np

from adiabound import _backend
from adiabound.evolution import evolve_fixed
from adiabound.model import DriveProtocol, ModelParams


def best_time(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000, help="unit cells")
    ap.add_argument("--points", type=int, default=513, help="lambda grid points on [0, 1.5]")
    ap.add_argument("--substeps", type=int, default=8, help="integrator substeps per interval")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if "cython" not in _backend.available():
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`",
              file=sys.stderr)
        return 1

    p = ModelParams(J=0.5, U=0.3, N=args.n)
    protocol = DriveProtocol.uniform(1.5, args.points)
    results = {}
    for name in ("cython", "python"):
        results[name] = best_time(
            lambda: evolve_fixed(p, protocol, args.substeps, backend=name), args.repeat)

    steps = args.n * (args.points - 1) * args.substeps
    for name, (t, _) in results.items():
        print(f"{name:7s} {t:8.3f} s  {steps / t / 1e6:8.2f} Msteps/s")
    tc, rc = results["cython"]
    tp, rp = results["python"]
    diff = float(np.max(np.abs(rc.log_fidelity - rp.log_fidelity)))
    print(f"speedup {tp / tc:.1f}x, max |ln F difference| {diff:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
