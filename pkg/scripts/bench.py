#!/usr/bin/env python3
"""Time dense vs plan matrix-vector products and fit the log-log slope.

    python3 scripts/bench.py [--model dft] [--n 1024] [--reps 20]
"""

import argparse
import time

import numpy as np

from asptk.cli import bench_sizes, make_plan
from asptk.fastfactor import nnz_ratio, verify_plan
from asptk.models import build_model, fourier_dense


def best_ns(fn, v, reps):
    fn(v)
    best = float("inf")
    for _ in range(reps):
        t = time.perf_counter_ns()
        fn(v)
        best = min(best, time.perf_counter_ns() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--model", default="dft", choices=["dft", "a2", "c2"])
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    xs, ts, nz = [], [], []
    print(f"{'n':>6} {'points':>7} {'dense ns':>10} {'plan ns':>10} {'nnz':>8} {'nnz/NlogN':>10} {'error':>9}")
    for n in bench_sizes(args.model, args.n):
        m = build_model(args.model, n)
        F = fourier_dense(m)
        plan = make_plan(m, "recursive")
        err = verify_plan(plan, F).rel_error
        v = rng.standard_normal(m.size) + 1j * rng.standard_normal(m.size)
        td = best_ns(lambda x: F @ x, v, args.reps)
        tp = best_ns(plan.apply, v, args.reps)
        print(f"{n:>6} {m.size:>7} {td:>10.0f} {tp:>10.0f} {plan.nnz:>8} {nnz_ratio(plan):>10.3f} {err:>9.1e}")
        if m.size > 1:
            xs.append(m.size)
            ts.append(tp)
            nz.append(plan.nnz)
    if len(xs) > 1:
        slope = np.polyfit(np.log(xs), np.log(ts), 1)[0]
        print(f"log-log slope of plan apply time vs points: {slope:.2f}")
        # operation count; interpreter overhead flattens the timing slope at these sizes
        print(f"log-log slope of plan nnz vs points: {np.polyfit(np.log(xs), np.log(nz), 1)[0]:.2f}")


if __name__ == "__main__":
    main()
