"""Command-line interface.

    dualdcc run --scenario cold300 --algo dual --duration 40 --out run.csv
    dualdcc table3
    dualdcc table4 --signal raw
    dualdcc fig1 --out fig1.csv
    dualdcc analyze 300 --set alpha=0.1

Exit status: 0 on success, 1 on I/O errors, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import warnings
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import analysis, engine, scenarios, tables
from .core import ConfigError, DccParams, DomainError, DualAlphaParams

EXIT_OK, EXIT_IO, EXIT_USAGE = 0, 1, 2


def parse_overrides(items: Sequence[str]) -> dict[str, float]:
    out: dict[str, float] = {}
    for item in items:
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"--set expects name=value, got {item!r}")
        if key not in scenarios.DCC_FIELDS and key not in scenarios.DUAL_FIELDS:
            raise ConfigError(f"unknown parameter {key!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise ConfigError(f"--set {key}: not a number: {value!r}") from None
    return out


def build_params(overrides: dict[str, float]) -> tuple[DccParams, DualAlphaParams]:
    dcc = {k: v for k, v in overrides.items() if k in scenarios.DCC_FIELDS}
    dual = {k: v for k, v in overrides.items() if k in scenarios.DUAL_FIELDS}
    return replace(DccParams(), **dcc), replace(DualAlphaParams(), **dual)


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def load_scenario(source: str) -> scenarios.ScenarioSpec:
    if scenarios.is_builtin(source):
        return scenarios.builtin(source)
    return scenarios.load(source)


def cmd_run(args: argparse.Namespace) -> int:
    spec = load_scenario(args.scenario)
    overrides = {**spec.params, **parse_overrides(args.set)}
    spec = replace(spec, params=overrides)
    if args.algo:
        spec = spec.with_algorithm(args.algo)
    if args.duration is not None:
        spec = replace(spec, duration=args.duration)
    if args.noise < 0:
        raise ConfigError("--noise must be >= 0")
    series = engine.run(spec, noise=args.noise, seed=args.seed)
    _write(series.to_csv() if args.format == "csv" else series.to_json(), args.out)
    return EXIT_OK


def cmd_table3(args: argparse.Namespace) -> int:
    params, dual = build_params(parse_overrides(args.set))
    rows = tables.table3(params=params, dual=dual, signal=args.signal)
    print(f"Cold start: seconds until the first {args.signal} CBR below {params.cbr_target}")
    print(tables.format_table3(rows))
    return EXIT_OK


def cmd_table4(args: argparse.Namespace) -> int:
    params, dual = build_params(parse_overrides(args.set))
    rows = tables.table4(params=params, dual=dual, signal=args.signal)
    print(f"Merge of {tables.SMALL_GROUP} + K stations ({args.signal} CBR for <68)")
    print(tables.format_table4(rows))
    return EXIT_OK


def cmd_fig1(args: argparse.Namespace) -> int:
    params, _ = build_params(parse_overrides(args.set))
    if args.kmax < 1:
        raise ConfigError("--kmax must be >= 1")
    alphas = (params.alpha, 0.1) if params.alpha != 0.1 else (0.1,)
    rows = tables.fig1_rows(range(1, args.kmax + 1), alphas, params)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["K", *(f"cbr_alpha_{a!r}" for a in alphas)])
    for k, *vals in rows:
        w.writerow([k, *("" if v is None else repr(v) for v in vals)])
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    params, _ = build_params(parse_overrides(args.set))
    res = analysis.classify_convergence(args.k, params)
    print(f"K                   {args.k:g}")
    print(f"conv_value          {analysis.conv_value(args.k, params):.6g}")
    print(f"classification      {res.kind.value}")
    print(f"delta_conv          {'n/a' if res.delta_conv is None else format(res.delta_conv, '.6g')}")
    print(f"predicted_cbr       {'n/a' if res.predicted_cbr is None else format(res.predicted_cbr, '.6g')}")
    print(f"capacity_threshold  {analysis.capacity_threshold(params):.6g}")
    print(f"overload_threshold  {analysis.overload_threshold(params):.6g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dualdcc", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_set(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--set", action="append", default=[], metavar="NAME=VALUE",
            help="override a DCC or Dual-alpha constant (repeatable)",
        )

    p = sub.add_parser("run", help="simulate one scenario and write its time series")
    p.add_argument("--scenario", required=True, help="scenario JSON file or built-in name (cold<K>, merge<A>x<B>)")
    p.add_argument("--algo", choices=scenarios.ALGORITHMS, help="override the scenario's algorithm")
    p.add_argument("--duration", type=float, help="seconds to simulate")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--noise", type=float, default=0.0, help="uniform measurement noise amplitude")
    p.add_argument("--seed", type=int, default=0)
    add_set(p)
    p.set_defaults(func=cmd_run)

    for name, func, text in (
        ("table3", cmd_table3, "cold-start convergence times against the reference table"),
        ("table4", cmd_table4, "merge fairness metrics against the reference table"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--signal", choices=("smoothed", "raw"), default="smoothed",
                       help="CBR signal used for the time-below-target columns")
        add_set(p)
        p.set_defaults(func=func)

    p = sub.add_parser("fig1", help="predicted CBR at convergence versus K for two alphas")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--kmax", type=int, default=1400)
    add_set(p)
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("analyze", help="closed-form convergence analysis for K stations")
    p.add_argument("k", type=float, metavar="K")
    add_set(p)
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"dualdcc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"dualdcc: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
