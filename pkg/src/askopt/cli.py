"""Command-line driver for the benchmark suite.

    askopt run --function camel6 --method ask --method gd --trials 100
    askopt run --config suite.cfg --out results.csv
    askopt list
    askopt check

Settings resolve in three layers: built-in defaults, then the config
file, then explicit flags.  The config file is plain ``key = value``
lines (# comments allowed); list-valued keys take comma-separated
values.  Dotted keys override one parameter for one function or method,
e.g. ``rosenbrock.level = 3`` or ``hb.alpha = 0.05``.

Exit codes: 0 on success, 1 on a usage problem (unknown names, bad
combinations, malformed config), 2 on a runtime failure (unwritable
output, failed self-check).
"""

from __future__ import annotations

import argparse
import sys
import tempfile
from pathlib import Path

import numpy as np

from .bench import (
    ALL_METHODS,
    DEFAULT_FUNCTION_OVERRIDES,
    SuiteSpec,
    aggregate_records,
    method_applicable,
    read_records_csv,
    run_suite,
    sample_inits,
    summary_path_for,
    write_report,
)
from .problems import MinMax, Problem, dixon_price_minmax, registry

__all__ = ["main"]

_OVERRIDE_PARAMS = ("radius", "level", "horizon", "alpha", "beta")

_SCALAR_KEYS = {
    "dim": int,
    "trials": int,
    "seed": int,
    "radius": float,
    "level": int,
    "horizon": float,
    "tol": float,
    "max_iters": int,
    "alpha": float,
    "beta": float,
    "minmax_split": int,
    "out": str,
    "format": str,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse hook
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="askopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a benchmark suite")
    run.add_argument("--config", help="key = value settings file")
    run.add_argument(
        "--function",
        action="append",
        help="function name (repeatable or comma-separated); default: all",
    )
    run.add_argument(
        "--method",
        action="append",
        help=f"one of {'|'.join(ALL_METHODS)} (repeatable); default: ask",
    )
    run.add_argument("--dim", type=int, help="select the variant with this dimension")
    run.add_argument("--trials", type=int, help="trials per pair (default 100)")
    run.add_argument("--seed", type=int, help="master seed (default 0)")
    run.add_argument("--radius", type=float, help="box half-width (default 0.1)")
    run.add_argument(
        "--level",
        type=int,
        help="grid level (default 1; setting this clears built-in per-function levels)",
    )
    run.add_argument("--horizon", type=float, help="evolution horizon (default 100)")
    run.add_argument("--tol", type=float, help="success tolerance (default 1e-6)")
    run.add_argument("--max-iters", type=int, help="iteration cap (default 50000)")
    run.add_argument("--alpha", type=float, help="baseline step size (default 0.01)")
    run.add_argument("--beta", type=float, help="heavy-ball momentum (default 0.9)")
    run.add_argument(
        "--minmax-split",
        type=int,
        help="coordinate split for dixon_price_minmax",
    )
    run.add_argument("--out", help="report path; omit to print the summary only")
    run.add_argument("--format", choices=("csv", "json"), help="report format")

    sub.add_parser("list", help="list functions and methods")
    sub.add_parser("check", help="run the harness self-test")
    return parser


def _parse_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _UsageError(f"cannot read config file {path}: {exc}") from exc
    settings: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise _UsageError(f"{path}:{lineno}: empty key or value")
        settings[key] = value
    return settings


def _split_list(values: list[str] | None) -> list[str] | None:
    if values is None:
        return None
    items = []
    for value in values:
        items.extend(part.strip() for part in value.split(",") if part.strip())
    return items


def _convert(key: str, text: str):
    kind = _SCALAR_KEYS[key]
    try:
        return kind(text)
    except ValueError as exc:
        raise _UsageError(f"config key {key!r}: bad value {text!r}") from exc


def _known_function_names() -> set[str]:
    return {p.name for p in registry()}


def _parse_overrides(
    config: dict[str, str],
) -> tuple[dict[str, dict[str, float]], dict[str, dict[str, float]]]:
    function_overrides: dict[str, dict[str, float]] = {}
    method_overrides: dict[str, dict[str, float]] = {}
    names = _known_function_names()
    for key, value in config.items():
        if "." not in key:
            continue
        head, param = key.split(".", 1)
        if param not in _OVERRIDE_PARAMS:
            raise _UsageError(
                f"config key {key!r}: parameter must be one of {_OVERRIDE_PARAMS}"
            )
        try:
            parsed = int(value) if param == "level" else float(value)
        except ValueError as exc:
            raise _UsageError(f"config key {key!r}: bad value {value!r}") from exc
        if head in names:
            function_overrides.setdefault(head, {})[param] = parsed
        elif head in ALL_METHODS:
            method_overrides.setdefault(head, {})[param] = parsed
        else:
            raise _UsageError(
                f"config key {key!r}: {head!r} is neither a function nor a method"
            )
    return function_overrides, method_overrides


def _resolve_problems(
    names: list[str] | None, dim: int | None, minmax_split: int | None
) -> tuple[Problem, ...]:
    reg = registry()
    if names is None:
        return tuple(reg)
    problems = []
    for name in names:
        if name == "dixon_price_minmax" and (
            dim is not None or minmax_split is not None
        ):
            try:
                problems.append(dixon_price_minmax(dim or 100, minmax_split))
            except ValueError as exc:
                raise _UsageError(str(exc)) from exc
            continue
        matches = [
            p
            for p in reg
            if p.name == name and (dim is None or p.dim == dim)
        ]
        if not matches:
            available = sorted({p.name for p in reg})
            raise _UsageError(
                f"unknown function {name!r}"
                + (f" with dim {dim}" if dim is not None else "")
                + f"; available: {', '.join(available)}"
            )
        if len(matches) > 1:
            dims = sorted(p.dim for p in matches)
            raise _UsageError(
                f"function {name!r} exists for dims {dims}; pass --dim"
            )
        problems.append(matches[0])
    return tuple(problems)


def _setting(key: str, cli_value, config: dict[str, str], default):
    if cli_value is not None:
        return cli_value
    if key in config:
        return _convert(key, config[key])
    return default


def _cmd_run(args) -> int:
    config = _parse_config_file(args.config) if args.config else {}
    function_overrides, method_overrides = _parse_overrides(config)

    functions = _split_list(args.function)
    if functions is None and "function" in config:
        functions = _split_list([config["function"]])
    methods = _split_list(args.method)
    if methods is None and "method" in config:
        methods = _split_list([config["method"]])
    if methods is None:
        methods = ["ask"]
    for m in methods:
        if m not in ALL_METHODS:
            raise _UsageError(
                f"unknown method {m!r}; available: {', '.join(ALL_METHODS)}"
            )

    dim = _setting("dim", args.dim, config, None)
    minmax_split = _setting("minmax_split", args.minmax_split, config, None)
    problems = _resolve_problems(functions, dim, minmax_split)

    # an explicit global level replaces the built-in per-function levels
    level_explicit = args.level is not None or "level" in config
    base_overrides = {} if level_explicit else dict(DEFAULT_FUNCTION_OVERRIDES)
    for name, params in function_overrides.items():
        merged = dict(base_overrides.get(name, {}))
        merged.update(params)
        base_overrides[name] = merged

    try:
        spec = SuiteSpec(
            problems=problems,
            methods=tuple(methods),
            trials=_setting("trials", args.trials, config, 100),
            seed=_setting("seed", args.seed, config, 0),
            tol=_setting("tol", args.tol, config, 1e-6),
            max_iters=_setting("max_iters", args.max_iters, config, 50_000),
            radius=_setting("radius", args.radius, config, 0.1),
            level=_setting("level", args.level, config, 1),
            horizon=_setting("horizon", args.horizon, config, 100.0),
            alpha=_setting("alpha", args.alpha, config, 1e-2),
            beta=_setting("beta", args.beta, config, 0.9),
            function_overrides=base_overrides,
            method_overrides=method_overrides,
        )
        report, records = run_suite(spec)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc

    out = _setting("out", args.out, config, None)
    fmt = _setting("format", args.format, config, "csv")
    if out is not None:
        write_report(report, records, fmt, out)
        print(f"wrote {out}")
        if fmt == "csv":
            print(f"wrote {summary_path_for(Path(out))}")
    _print_summary(report)
    return 0


def _print_summary(report) -> None:
    header = f"{'function':<24} {'dim':>4} {'method':<6} {'trials':>6} {'rate':>6} {'mean_grad':>12} {'mean_ms':>10}"
    print(header)
    print("-" * len(header))
    for a in report.aggregates:
        print(
            f"{a.function:<24} {a.dim:>4} {a.method:<6} {a.trials:>6} "
            f"{a.success_rate:>6.2f} {a.mean_grad_norm:>12.4e} {a.mean_time_ms:>10.2f}"
        )


def _cmd_list() -> int:
    print("functions:")
    for p in registry():
        if isinstance(p.kind, MinMax):
            kind = f"minmax(split={p.kind.split})"
        else:
            kind = "minimize"
        print(f"  {p.name:<24} dim={p.dim:<4} {kind}")
    print("methods:")
    print("  ask (any kind)")
    print("  gd hb nag (minimize; hb/nag also run on min-max fields)")
    print("  gda ogda (min-max only)")
    return 0


def _cmd_check() -> int:
    from .problems import rotated_hyper_ellipsoid

    problem = rotated_hyper_ellipsoid()

    inits_a = sample_inits(problem, 100, seed=7)
    inits_b = sample_inits(problem, 100, seed=7)
    for a, b in zip(inits_a, inits_b):
        if not np.array_equal(a, b):
            print("check failed: init sampling is not deterministic")
            return 2
        if not problem.init_box.contains(a):
            print("check failed: init sample left the box")
            return 2
    print("ok: init sampling deterministic and in-box (100 draws)")

    spec = SuiteSpec(
        problems=(problem,),
        methods=("ask", "gd"),
        trials=3,
        seed=1,
        radius=130.0,
        function_overrides={},
    )
    report, records = run_suite(spec)
    if aggregate_records(records) != report.aggregates:
        print("check failed: aggregate recomputation mismatch")
        return 2
    ask_rows = [r for r in records if r.method == "ask"]
    if not all(r.success for r in ask_rows):
        print("check failed: wide-radius quadratic trials did not converge")
        return 2
    print("ok: 2-method smoke suite ran and aggregates match")

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "check.csv"
        write_report(report, records, "csv", path)
        parsed = read_records_csv(path)
    fields = ("method", "function", "dim", "trial", "seed", "grad_norm",
              "iterations", "time_ms", "success")
    for before, after in zip(records, parsed):
        for name in fields:
            if getattr(before, name) != getattr(after, name):
                print(f"check failed: CSV round-trip changed {name}")
                return 2
    print("ok: CSV round-trip exact")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            return _cmd_list()
        if args.command == "check":
            return _cmd_check()
        raise _UsageError(f"unknown command {args.command!r}")
    except _UsageError as exc:
        print(f"askopt: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"askopt: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
