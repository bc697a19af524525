"""Time the two exact quantile-regression kernels against each other.

Both lanes scan the same candidate-line set, so they return identical
coefficients; this script times them side by side across sample sizes and
checks the results agree before reporting anything.

Usage: python3 benchmarks/bench_pinball.py [--sizes 200 500 1000] [--repeats 3]
"""
import argparse
import time

import numpy as np

from syspredict.qr import HAVE_COMPILED, fit_lqr


def time_engine(pairs, tau, engine, repeats):
    best = float("inf")
    fit = None
    for _ in range(repeats):
        start = time.perf_counter()
        fit = fit_lqr(pairs, tau, engine=engine)
        best = min(best, time.perf_counter() - start)
    return fit, best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 500, 1000, 2000])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--tau", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not HAVE_COMPILED:
        print("compiled kernel unavailable; timing the numpy lane only")

    rng = np.random.default_rng(args.seed)
    print(f"{'n':>6}  {'numpy (s)':>10}  {'compiled (s)':>12}  {'speedup':>8}")
    for n in args.sizes:
        x = rng.uniform(0.0, 3.0, n)
        y = x + rng.exponential(1.0, n)
        pairs = np.column_stack([x, y])
        fit_np, t_np = time_engine(pairs, args.tau, "numpy", args.repeats)
        if HAVE_COMPILED:
            fit_c, t_c = time_engine(pairs, args.tau, "compiled", args.repeats)
            if (fit_c.intercept, fit_c.slope) != (fit_np.intercept, fit_np.slope):
                raise SystemExit(f"engines disagree at n={n}: {fit_c} vs {fit_np}")
            print(f"{n:>6}  {t_np:>10.4f}  {t_c:>12.4f}  {t_np / t_c:>7.2f}x")
        else:
            print(f"{n:>6}  {t_np:>10.4f}  {'-':>12}  {'-':>8}")


if __name__ == "__main__":
    main()
