#!/usr/bin/env python3
"""Empirical-versus-analytic convergence of the distance from synchronization.

For each rewiring probability and trajectory length, simulates the exact
continuous dynamics, compares the empirical distance from synchronization
with the analytic value and reports the mean relative error.  The error
should shrink like 1/sqrt(L); the fitted log-log slope is printed per p.
"""

import argparse
import math
import sys

import numpy as np

from linsync import DynamicsParams
from linsync.cli import run_converge


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--d", type=int, default=4)
    ap.add_argument("--c", type=float, default=0.5)
    ap.add_argument("--p-values", type=float, nargs="+", default=[0.0, 0.1, 1.0])
    ap.add_argument("--lengths", type=int, nargs="+", default=[100, 1000, 10000])
    ap.add_argument("--realizations", type=int, default=100)
    ap.add_argument("--seed", type=int, default=20250824)
    ap.add_argument("--dt", type=float, default=1.0)
    ap.add_argument("--out", default="convergence.csv")
    ap.add_argument("--threads", type=int, default=1)
    return ap.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    rows = run_converge(
        n=args.n,
        d=args.d,
        c=args.c,
        p_values=tuple(args.p_values),
        lengths=tuple(args.lengths),
        realizations=args.realizations,
        seed=args.seed,
        dynamics=DynamicsParams.continuous(),
        dt=args.dt,
        threads=args.threads,
    )
    header = ["p", "L", "count", "discarded", "mean_rel_abs_err", "sd_log10_rel_err"]
    with open(args.out, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("" if row[k] is None else f"{row[k]:.17g}" if isinstance(row[k], float) else str(row[k]) for k in header) + "\n")

    print(f"{'p':>8} {'L':>8} {'mean rel err':>13}")
    for row in rows:
        err = "n/a" if row["mean_rel_abs_err"] is None else f"{row['mean_rel_abs_err']:.4g}"
        print(f"{row['p']:>8g} {row['L']:>8} {err:>13}")
    for p in args.p_values:
        pts = [
            (math.log10(r["L"]), math.log10(r["mean_rel_abs_err"]))
            for r in rows
            if r["p"] == p and r["mean_rel_abs_err"]
        ]
        if len(pts) >= 2:
            slope = np.polyfit(*zip(*pts), 1)[0]
            print(f"p={p:g}: log-log error slope {slope:.3f} (expected about -0.5)")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
