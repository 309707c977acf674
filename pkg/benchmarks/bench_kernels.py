"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--m 20] [--repeat 3]
"""
import argparse
import time

import numpy as np

from groth_lhv import kernels
from groth_lhv.constants import SEESAW_GAIN_TOL, SEESAW_MAX_ITER, ZERO_RESULTANT
from groth_lhv.core import sample_sphere


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=20)
    ap.add_argument("--seesaw-m", type=int, default=40)
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    g = np.random.default_rng(1)
    M = g.standard_normal((args.m, args.m))
    S = g.standard_normal((args.seesaw_m, args.seesaw_m))
    A0 = sample_sphere(g, args.dim, args.seesaw_m)
    B0 = sample_sphere(g, args.dim, args.seesaw_m)

    backends = kernels.backends()
    print(f"{'kernel':<14}{'backend':<10}{'seconds':>10}  result")
    rows = {}
    for name, mod in backends.items():
        t, (val, _) = best_of(lambda: mod.local_bound_signs(M), args.repeat)
        rows[("local_bound", name)] = t
        print(f"{'local_bound':<14}{name:<10}{t:>10.4f}  {val:.12f}")

        def run():
            A, B = A0.copy(), B0.copy()
            hist, _ = mod.seesaw_run(S, A, B, SEESAW_GAIN_TOL, SEESAW_MAX_ITER, ZERO_RESULTANT)
            return hist
        t, hist = best_of(run, args.repeat)
        rows[("seesaw", name)] = t
        print(f"{'seesaw':<14}{name:<10}{t:>10.4f}  {hist[-1]:.12f} ({len(hist) - 1} iters)")

    if len(backends) == 2:
        for k in ("local_bound", "seesaw"):
            print(f"speedup {k}: {rows[(k, 'python')] / rows[(k, 'compiled')]:.1f}x")


if __name__ == "__main__":
    main()
