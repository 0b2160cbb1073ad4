#!/usr/bin/env python3
"""Run the minimization benchmark sweep.

Sweeps ASK and the gradient baselines over the standard test functions,
100 random starts per (function, method) pair by default, and writes
per-trial records plus an aggregate summary. Step sizes for the
baselines are set per function so the widest admissible starts do not
blow up; ASK runs its defaults except where a function needs a finer
surrogate (level 3) or a wide trust box.

Usage:
    python3 scripts/run_benchmarks.py --out results/minimize.csv
    python3 scripts/run_benchmarks.py --trials 20 --methods ask gd
"""

from __future__ import annotations

import argparse
import math
import time
from pathlib import Path

import numpy as np

from askopt import problems
from askopt.bench import (
    BenchReport,
    SuiteSpec,
    run_suite,
    summary_path_for,
    write_report,
)

FUNCTION_OVERRIDES = {
    "rotated_hyper_ellipsoid": {"radius": 130.0},
    "bohachevsky2": {"level": 3},
    "rosenbrock": {"level": 3, "alpha": 1e-3},
    "camel3": {"alpha": 1e-4},
    "camel6": {"alpha": 1e-3},
    "dixon_price": {"alpha": 1e-4},
    "least_squares": {"alpha": 1e-3},
}


def problem_list() -> tuple:
    return (
        problems.rotated_hyper_ellipsoid(),
        problems.sum_of_different_powers(),
        problems.bohachevsky2(),
        problems.camel3(),
        problems.camel6(),
        problems.dixon_price(2),
        problems.rosenbrock(),
        problems.dixon_price(10),
        problems.make_least_squares(50, 1e3, seed=0),
    )


def print_table(report: BenchReport) -> None:
    print(f"{'function':28s} {'dim':>4s} {'method':>6s} {'rate':>6s} {'mean_grad':>12s} {'mean_ms':>10s}")
    for a in report.aggregates:
        grad = "-" if math.isnan(a.mean_grad_norm) else f"{a.mean_grad_norm:.4e}"
        ms = "-" if math.isnan(a.mean_time_ms) else f"{a.mean_time_ms:.3f}"
        print(f"{a.function:28s} {a.dim:4d} {a.method:>6s} {a.success_rate:6.2f} {grad:>12s} {ms:>10s}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--methods", nargs="+", default=["ask", "gd", "nag", "hb"])
    parser.add_argument("--out", type=Path, default=None, help="write records here (csv or json)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    args = parser.parse_args()

    spec = SuiteSpec(
        problems=problem_list(),
        methods=tuple(args.methods),
        trials=args.trials,
        seed=args.seed,
        function_overrides=FUNCTION_OVERRIDES,
    )
    t0 = time.perf_counter()
    # diverging baseline trials overflow before they are caught; keep quiet
    with np.errstate(over="ignore", invalid="ignore"):
        report, records = run_suite(spec)
    elapsed = time.perf_counter() - t0

    print_table(report)
    print(f"{len(records)} trials in {elapsed:.1f}s")
    if args.out is not None:
        write_report(report, records, fmt=args.format, path=args.out)
        print(f"wrote {args.out}")
        if args.format == "csv":
            print(f"wrote {summary_path_for(args.out)}")


if __name__ == "__main__":
    main()
