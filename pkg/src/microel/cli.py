"""Command-line interface.

Subcommands:

* ``run <scenario> [--trace out.csv] [--plot col ...]`` - simulate, print
  the run summary, optionally persist the trace and plot columns.
* ``sweep <scenario> --vary key=a,b,c`` - re-run the scenario once per
  value of one key, one summary line each.
* ``print-config <scenario>`` - canonical echo of a validated scenario.
* ``conformance`` - exhaustive link-protocol suite (all 256 codes plus
  seeded-random codes).

Exit codes: 0 success, 1 validation error, 2 invariant violation during a
run.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import link, report
from .runner import run
from .scenario import ScenarioError, build_scenario, load_scenario, parse_entries, _KEYS
from .trace import TraceInvariantError, validate_trace

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INVARIANT = 2


def _load_file(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(str(exc)) from None
    return text


def _cmd_run(args) -> int:
    sc = load_scenario(_load_file(args.scenario))
    result = run(sc, engine=args.engine)
    validate_trace(result.trace)
    if args.trace:
        result.trace.write_csv(args.trace)
    sys.stdout.write(report.summary_text(result.summary))
    if args.plot:
        written = report.plot_columns(result, args.plot, Path(args.plot_dir))
        for path in written:
            print(f"wrote {path}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if "=" not in args.vary:
        raise ScenarioError("--vary expects key=value1,value2,...")
    key, _, values_text = args.vary.partition("=")
    key = key.strip()
    if key not in _KEYS:
        raise ScenarioError("unknown key", key=key)
    values = [v.strip() for v in values_text.split(",") if v.strip()]
    if not values:
        raise ScenarioError("no values to sweep", key=key)

    base = parse_entries(_load_file(args.scenario))
    stem = Path(args.scenario).stem
    for value in values:
        entries = dict(base)
        entries[key] = (value, None)
        sc = build_scenario(entries)
        result = run(sc, engine=args.engine)
        validate_trace(result.trace)
        s = result.summary
        print(
            f"{key}={value}: delivered={s.delivered_samples} "
            f"dropped={s.dropped_samples} violations={s.violations} "
            f"max_gap={s.max_gap:.9g} final_gap={s.final_gap:.9g} "
            f"pulses={s.pulses_emitted}"
        )
        if args.trace_dir:
            out = Path(args.trace_dir)
            out.mkdir(parents=True, exist_ok=True)
            result.trace.write_csv(out / f"{stem}__{key}={value}.csv")
    return EXIT_OK


def _cmd_print_config(args) -> int:
    from .scenario import canonical_text

    sc = load_scenario(_load_file(args.scenario))
    sys.stdout.write(canonical_text(sc))
    return EXIT_OK


def _cmd_conformance(args) -> int:
    rng = random.Random(args.seed)
    suites = [
        ("exhaustive 0..255", list(range(256))),
        (f"{args.codes} random codes", [rng.randrange(256) for _ in range(args.codes)]),
    ]
    failed = False
    for label, codes in suites:
        rep = link.run_conformance(codes)
        checks = [
            ("in-order exactly-once delivery", rep.received_codes == rep.sent),
            ("zero drops", rep.dropped == 0),
            ("zero violations", rep.violations == 0),
            ("ACK pulses = 2x deliveries", rep.ack_pulses == 2 * len(rep.sent)),
            ("P.END pulses = deliveries", rep.p_end_pulses == len(rep.sent)),
            (
                "BUSY ticks = conversions x latency",
                rep.busy_ticks == len(rep.sent) * rep.conversion_ticks,
            ),
            ("data stable under ACK", rep.data_stable_under_ack),
        ]
        for name, ok in checks:
            print(f"{label}: {name}: {'PASS' if ok else 'FAIL'}")
            failed |= not ok
    return EXIT_INVARIANT if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="microel",
        description="Discrete-time simulator of the MICROEL 01 acquisition "
        "interface and its knife-wear compensation rig.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a scenario file")
    p_run.add_argument("scenario")
    p_run.add_argument("--trace", help="write the per-tick trace CSV here")
    p_run.add_argument(
        "--plot", action="append", default=[], metavar="COLUMN",
        help="emit <column>.svg (repeatable)",
    )
    p_run.add_argument("--plot-dir", default=".", help="directory for plot files")
    p_run.add_argument("--engine", choices=["auto", "python", "compiled"], default="auto")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a scenario once per value of one key")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--vary", required=True, metavar="KEY=V1,V2,...")
    p_sweep.add_argument("--trace-dir", help="write one trace CSV per variant")
    p_sweep.add_argument("--engine", choices=["auto", "python", "compiled"], default="auto")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_cfg = sub.add_parser("print-config", help="echo a scenario in canonical form")
    p_cfg.add_argument("scenario")
    p_cfg.set_defaults(func=_cmd_print_config)

    p_conf = sub.add_parser("conformance", help="run the link protocol suite")
    p_conf.add_argument("--codes", type=int, default=10000)
    p_conf.add_argument("--seed", type=int, default=20260811)
    p_conf.set_defaults(func=_cmd_conformance)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except TraceInvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
