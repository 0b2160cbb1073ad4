#!/usr/bin/env python3
"""Run the saddle-point benchmark sweep.

Compares ASK against GDA, OGDA, NAG, and HB on the min-max test
problems. The bilinear problem is the interesting stress case: the
gradient field there is a pure rotation, so methods that follow it
circle the saddle instead of approaching it, and ASK spends its full
iteration budget on every start. Expect several seconds per bilinear
ASK trial; the default 20 trials keep the sweep to a few minutes.

The 100-dimensional Dixon-Price min-max variant is much slower still
and is only included with --include-highdim.

Usage:
    python3 scripts/run_minmax.py --out results/minmax.csv
    python3 scripts/run_minmax.py --trials 100 --methods ask gda
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


def problem_list(include_highdim: bool) -> tuple:
    probs = (
        problems.minmax_bilinear(),
        problems.minmax_case2(),
        problems.minmax_case2_alt(),
        problems.camel3_minmax(),
    )
    if include_highdim:
        probs = probs + (problems.dixon_price_minmax(100),)
    return probs


def print_table(report: BenchReport) -> None:
    print(f"{'function':24s} {'dim':>4s} {'method':>6s} {'rate':>6s} {'mean_grad':>12s} {'mean_ms':>10s}")
    for a in report.aggregates:
        grad = "-" if math.isnan(a.mean_grad_norm) else f"{a.mean_grad_norm:.4e}"
        ms = "-" if math.isnan(a.mean_time_ms) else f"{a.mean_time_ms:.3f}"
        print(f"{a.function:24s} {a.dim:4d} {a.method:>6s} {a.success_rate:6.2f} {grad:>12s} {ms:>10s}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--methods", nargs="+", default=["ask", "gda", "ogda", "nag", "hb"])
    parser.add_argument("--include-highdim", action="store_true")
    parser.add_argument("--out", type=Path, default=None, help="write records here (csv or json)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    args = parser.parse_args()

    spec = SuiteSpec(
        problems=problem_list(args.include_highdim),
        methods=tuple(args.methods),
        trials=args.trials,
        seed=args.seed,
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
