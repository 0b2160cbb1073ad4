"""Seeded multi-trial benchmark runner and report writer.

Trial seeding: trial i of a suite with master seed s draws its start
point from ``numpy.random.default_rng`` seeded with the first state word
of ``SeedSequence((s, i))``.  The scheme is portable across platforms,
makes trials independent of each other and of execution order, and the
derived integer is recorded alongside each trial so any single trial can
be reproduced in isolation.

Report layout: the CSV has one row per trial with columns
``method,function,dim,trial,seed,grad_norm,iterations,time_ms,success``;
a companion ``*.summary.csv`` holds the per-method aggregates.  The JSON
format mirrors records and aggregates in one file with a schema_version
field.  Success means the final gradient norm reached the configured
tolerance; grad_norm and time aggregates average over successful trials
only, while success_rate counts all trials.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .ask import AskConfig, AskStatus, ask_optimize
from .baselines import METHODS as BASELINE_METHODS
from .baselines import BaselineConfig, run_baseline
from .koopman import NonFiniteDynamics, SpectralError
from .problems import MinMax, Problem

__all__ = [
    "ALL_METHODS",
    "DEFAULT_FUNCTION_OVERRIDES",
    "TrialRecord",
    "MethodAggregate",
    "BenchReport",
    "SuiteSpec",
    "trial_seed",
    "sample_inits",
    "run_trial",
    "run_suite",
    "aggregate_records",
    "write_report",
    "read_records_csv",
]

ALL_METHODS = ("ask",) + BASELINE_METHODS

# Functions whose default spectral resolution is raised one notch because
# a single level under-resolves their oscillation or curvature.
DEFAULT_FUNCTION_OVERRIDES: Mapping[str, Mapping[str, float]] = {
    "bohachevsky2": {"level": 3},
    "rosenbrock": {"level": 3},
}

CSV_COLUMNS = (
    "method",
    "function",
    "dim",
    "trial",
    "seed",
    "grad_norm",
    "iterations",
    "time_ms",
    "success",
)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class TrialRecord:
    method: str
    function: str
    dim: int
    trial: int
    seed: int
    grad_norm: float
    iterations: int
    time_ms: float
    success: bool
    init: np.ndarray | None = None
    status: str = ""


@dataclass(frozen=True)
class MethodAggregate:
    function: str
    dim: int
    method: str
    trials: int
    success_rate: float
    mean_grad_norm: float  # over successful trials; NaN when none
    mean_time_ms: float  # over successful trials; NaN when none


@dataclass(frozen=True)
class BenchReport:
    aggregates: tuple[MethodAggregate, ...]
    config: dict


@dataclass(frozen=True)
class SuiteSpec:
    """What to run and with which parameters.

    ``function_overrides`` maps a function name to parameter overrides
    (radius, level, horizon, alpha, beta); ``method_overrides`` does the
    same per method name.  A function-specific value beats a
    method-specific one, which beats the global field.
    """

    problems: tuple[Problem, ...]
    methods: tuple[str, ...] = ("ask",)
    trials: int = 100
    seed: int = 0
    tol: float = 1e-6
    max_iters: int = 50_000
    radius: float = 0.1
    level: int = 1
    horizon: float = 100.0
    alpha: float = 1e-2
    beta: float = 0.9
    function_overrides: Mapping[str, Mapping[str, float]] = field(
        default_factory=lambda: DEFAULT_FUNCTION_OVERRIDES
    )
    method_overrides: Mapping[str, Mapping[str, float]] = field(
        default_factory=dict
    )

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        for m in self.methods:
            if m not in ALL_METHODS:
                raise ValueError(
                    f"unknown method {m!r}, expected one of {ALL_METHODS}"
                )


def trial_seed(master_seed: int, trial: int) -> int:
    """Derived seed for one trial: first state word of the keyed sequence."""
    return int(np.random.SeedSequence((master_seed, trial)).generate_state(1)[0])


def sample_inits(
    problem: Problem, n_trials: int, seed: int
) -> list[np.ndarray]:
    """Uniform start points in the problem's init box, one per trial."""
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    box = problem.init_box
    span = box.upper - box.lower
    inits = []
    for i in range(n_trials):
        rng = np.random.default_rng(trial_seed(seed, i))
        inits.append(box.lower + span * rng.random(problem.dim))
    return inits


def method_applicable(method: str, problem: Problem) -> bool:
    is_minmax = isinstance(problem.kind, MinMax)
    if method == "gd":
        return not is_minmax
    if method in ("gda", "ogda"):
        return is_minmax
    return True  # ask, hb, nag run on either kind


def _lookup(
    spec: SuiteSpec, problem: Problem, method: str, key: str, default: float
) -> float:
    fo = spec.function_overrides.get(problem.name, {})
    if key in fo:
        return fo[key]
    mo = spec.method_overrides.get(method, {})
    if key in mo:
        return mo[key]
    return default


def _ask_config(spec: SuiteSpec, problem: Problem) -> AskConfig:
    return AskConfig(
        radius=_lookup(spec, problem, "ask", "radius", spec.radius),
        level=int(_lookup(spec, problem, "ask", "level", spec.level)),
        horizon=_lookup(spec, problem, "ask", "horizon", spec.horizon),
        max_iters=spec.max_iters,
        tol=spec.tol,
    )


def _baseline_config(
    spec: SuiteSpec, problem: Problem, method: str
) -> BaselineConfig:
    return BaselineConfig(
        method=method,
        alpha=_lookup(spec, problem, method, "alpha", spec.alpha),
        beta=_lookup(spec, problem, method, "beta", spec.beta),
        max_iters=spec.max_iters,
        tol=spec.tol,
    )


def run_trial(
    problem: Problem,
    method: str,
    trial: int,
    init: np.ndarray,
    seed: int,
    spec: SuiteSpec,
) -> TrialRecord:
    """One optimizer run; the timer wraps only the optimizer call.

    Numerical breakdowns inside the optimizer (non-finite dynamics,
    spectral failures, overflow) yield a failed record instead of an
    exception, so one bad trial never aborts a suite.
    """
    start = time.perf_counter()
    try:
        if method == "ask":
            r = ask_optimize(problem, init, _ask_config(spec, problem))
            grad_norm, iters, status = r.grad_norm, r.outer_iters, r.status
        else:
            r = run_baseline(problem, init, _baseline_config(spec, problem, method))
            grad_norm, iters, status = r.grad_norm, r.iterations, r.status
    except (NonFiniteDynamics, SpectralError, FloatingPointError) as exc:
        elapsed_ms = (time.perf_counter() - start) * 1e3
        del exc
        return TrialRecord(
            method=method,
            function=problem.name,
            dim=problem.dim,
            trial=trial,
            seed=seed,
            grad_norm=math.nan,
            iterations=0,
            time_ms=elapsed_ms,
            success=False,
            init=init,
            status=AskStatus.FAILED.value,
        )
    elapsed_ms = (time.perf_counter() - start) * 1e3
    return TrialRecord(
        method=method,
        function=problem.name,
        dim=problem.dim,
        trial=trial,
        seed=seed,
        grad_norm=grad_norm,
        iterations=iters,
        time_ms=elapsed_ms,
        success=status is AskStatus.CONVERGED,
        init=init,
        status=status.value,
    )


def run_suite(spec: SuiteSpec) -> tuple[BenchReport, list[TrialRecord]]:
    """Run every applicable (function, method) pair over seeded trials.

    Raises ValueError when an explicitly requested pair cannot run (a
    minimization-only method on a min-max problem or vice versa).
    """
    for problem in spec.problems:
        for method in spec.methods:
            if not method_applicable(method, problem):
                raise ValueError(
                    f"method {method!r} does not apply to "
                    f"{problem.name} ({problem.kind.__class__.__name__})"
                )

    records: list[TrialRecord] = []
    for problem in spec.problems:
        inits = sample_inits(problem, spec.trials, spec.seed)
        for method in spec.methods:
            for trial, init in enumerate(inits):
                records.append(
                    run_trial(
                        problem,
                        method,
                        trial,
                        init,
                        trial_seed(spec.seed, trial),
                        spec,
                    )
                )
    records.sort(key=lambda r: (r.function, r.dim, r.method, r.trial))
    report = BenchReport(
        aggregates=aggregate_records(records),
        config=_config_echo(spec),
    )
    return report, records


def aggregate_records(
    records: Sequence[TrialRecord],
) -> tuple[MethodAggregate, ...]:
    groups: dict[tuple[str, int, str], list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.function, r.dim, r.method), []).append(r)
    aggregates = []
    for (function, dim, method), rows in sorted(groups.items()):
        wins = [r for r in rows if r.success]
        aggregates.append(
            MethodAggregate(
                function=function,
                dim=dim,
                method=method,
                trials=len(rows),
                success_rate=len(wins) / len(rows),
                mean_grad_norm=(
                    float(np.mean([r.grad_norm for r in wins]))
                    if wins
                    else math.nan
                ),
                mean_time_ms=(
                    float(np.mean([r.time_ms for r in wins]))
                    if wins
                    else math.nan
                ),
            )
        )
    return tuple(aggregates)


def _config_echo(spec: SuiteSpec) -> dict:
    return {
        "functions": [[p.name, p.dim] for p in spec.problems],
        "methods": list(spec.methods),
        "trials": spec.trials,
        "seed": spec.seed,
        "tol": spec.tol,
        "max_iters": spec.max_iters,
        "radius": spec.radius,
        "level": spec.level,
        "horizon": spec.horizon,
        "alpha": spec.alpha,
        "beta": spec.beta,
        "function_overrides": {
            k: dict(v) for k, v in spec.function_overrides.items()
        },
        "method_overrides": {
            k: dict(v) for k, v in spec.method_overrides.items()
        },
    }


def _json_float(value: float) -> float | None:
    # strict JSON has no NaN token
    return None if math.isnan(value) else value


def _record_row(r: TrialRecord) -> list[str]:
    return [
        r.method,
        r.function,
        str(r.dim),
        str(r.trial),
        str(r.seed),
        repr(r.grad_norm),
        str(r.iterations),
        repr(r.time_ms),
        "true" if r.success else "false",
    ]


def summary_path_for(path: Path) -> Path:
    return path.with_name(path.stem + ".summary" + (path.suffix or ".csv"))


def write_report(
    report: BenchReport,
    records: Sequence[TrialRecord],
    fmt: str,
    path: str | Path,
) -> None:
    """Write trial rows plus aggregates; cleans up partial files on failure."""
    path = Path(path)
    written: list[Path] = []
    try:
        if fmt == "csv":
            written.append(path)
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(CSV_COLUMNS)
                for r in records:
                    writer.writerow(_record_row(r))
            summary = summary_path_for(path)
            written.append(summary)
            with open(summary, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(
                    [
                        "function",
                        "dim",
                        "method",
                        "trials",
                        "success_rate",
                        "mean_grad_norm",
                        "mean_time_ms",
                    ]
                )
                for a in report.aggregates:
                    writer.writerow(
                        [
                            a.function,
                            str(a.dim),
                            a.method,
                            str(a.trials),
                            repr(a.success_rate),
                            repr(a.mean_grad_norm),
                            repr(a.mean_time_ms),
                        ]
                    )
        elif fmt == "json":
            written.append(path)
            payload = {
                "schema_version": SCHEMA_VERSION,
                "config": report.config,
                "aggregates": [
                    {
                        "function": a.function,
                        "dim": a.dim,
                        "method": a.method,
                        "trials": a.trials,
                        "success_rate": a.success_rate,
                        "mean_grad_norm": _json_float(a.mean_grad_norm),
                        "mean_time_ms": _json_float(a.mean_time_ms),
                    }
                    for a in report.aggregates
                ],
                "records": [
                    {
                        "method": r.method,
                        "function": r.function,
                        "dim": r.dim,
                        "trial": r.trial,
                        "seed": r.seed,
                        "grad_norm": _json_float(r.grad_norm),
                        "iterations": r.iterations,
                        "time_ms": r.time_ms,
                        "success": r.success,
                        "status": r.status,
                        "init": None if r.init is None else list(map(float, r.init)),
                    }
                    for r in records
                ],
            }
            with open(path, "w") as fh:
                json.dump(payload, fh, indent=2, allow_nan=False)
                fh.write("\n")
        else:
            raise ValueError(f"unknown report format {fmt!r}")
    except OSError as exc:
        for p in written:
            try:
                p.unlink(missing_ok=True)
            except OSError:
                pass
        raise OSError(f"failed writing report to {path}: {exc}") from exc


def read_records_csv(path: str | Path) -> list[TrialRecord]:
    """Parse a trial CSV back into records (fields the CSV carries)."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header!r} in {path}")
        for row in reader:
            records.append(
                TrialRecord(
                    method=row[0],
                    function=row[1],
                    dim=int(row[2]),
                    trial=int(row[3]),
                    seed=int(row[4]),
                    grad_norm=float(row[5]),
                    iterations=int(row[6]),
                    time_ms=float(row[7]),
                    success=row[8] == "true",
                )
            )
    return records
