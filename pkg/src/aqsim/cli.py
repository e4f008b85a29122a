"""Command-line front end: run scenario files, tabulate analytical bounds,
and sweep the brute-force scheduling oracle.

Exit codes: 0 success, 2 validation/domain error, 3 broken runtime invariant
(a bound the engine must never exceed)."""

from __future__ import annotations

import argparse
import csv
import os
import sys
from typing import Optional, Sequence

import yaml

from . import analysis
from .adversary import AdversaryError
from .interval_strategy import PhaseRecord, run_interval, write_phases_csv
from .network import NetworkError
from .scenario import Scenario, ScenarioError, load_scenario, make_adversary
from .sim_engine import EngineInvariantError, run, write_packets_csv, write_trace_csv
from .static_routing import run_sweep, sweep_summary, write_sweep_csv

FORMULAS = ("line", "tree", "nonforward", "theorem-time", "theorem-packets")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aqsim",
        description="Adversarial queueing simulator and worst-case bound toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario file, write CSV traces")
    run_p.add_argument("scenario", help="path to a scenario YAML file")
    run_p.add_argument("--max-steps", type=int, default=None, help="override run.max_steps")
    run_p.add_argument("--strategy", default=None, help="override the discipline name")
    run_p.add_argument(
        "--improvement", choices=["on", "off"], default=None,
        help="override the pass-through improvement (interval strategy only)",
    )
    run_p.add_argument("--out", default=".", help="directory for the CSV outputs")

    bounds_p = sub.add_parser("bounds", help="tabulate an analytical bound as CSV")
    bounds_p.add_argument("formula", choices=FORMULAS)
    bounds_p.add_argument("--r", type=float, default=0.5)
    bounds_p.add_argument("--b", type=float, default=4)
    bounds_p.add_argument("--d", type=float, default=4)
    bounds_p.add_argument("--c1", type=float, default=1.0)
    bounds_p.add_argument("--c2", type=float, default=1.0)
    bounds_p.add_argument("--c3", type=float, default=0.0)
    bounds_p.add_argument("--i-max", type=int, default=20, dest="i_max")
    bounds_p.add_argument("--log-base", type=float, default=2.0, dest="log_base")

    sweep_p = sub.add_parser(
        "sweep", help="brute-force optimum vs greedy FIFO over small instances"
    )
    sweep_p.add_argument("--max-packets", type=int, default=3, dest="max_packets")
    sweep_p.add_argument("--max-edges", type=int, default=3, dest="max_edges")
    sweep_p.add_argument(
        "--shapes", default="line,tree", help="comma-separated subset of: line, tree"
    )
    return parser


# ---- run -------------------------------------------------------------------


def cmd_run(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return 2
    except yaml.YAMLError as exc:
        print(f"error: scenario is not valid YAML: {exc}", file=sys.stderr)
        return 2
    except ScenarioError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return 2

    max_steps = scenario.max_steps if args.max_steps is None else args.max_steps
    discipline = scenario.discipline if args.strategy is None else args.strategy.upper()
    improvement = scenario.improvement
    if args.improvement is not None:
        if scenario.strategy_kind != "interval":
            print(
                "error: strategy.improvement: only valid for the interval strategy",
                file=sys.stderr,
            )
            return 2
        improvement = args.improvement == "on"
    if max_steps < 1:
        print(f"error: run.max_steps: must be >= 1, got {max_steps}", file=sys.stderr)
        return 2

    try:
        adversary = make_adversary(scenario)
    except AdversaryError as exc:
        print(f"error: adversary: {exc}", file=sys.stderr)
        return 2

    records: Optional[list[PhaseRecord]] = None
    try:
        if scenario.strategy_kind == "interval":
            trace, records = run_interval(
                scenario.network, discipline, adversary, max_steps, improvement
            )
        else:
            trace = run(scenario.network, discipline, adversary, max_steps)
    except ValueError as exc:  # unknown discipline override and similar
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EngineInvariantError as exc:
        print(f"fatal: runtime invariant broken: {exc}", file=sys.stderr)
        return 3

    os.makedirs(args.out, exist_ok=True)
    mode = (
        f"interval({discipline}) improvement={'on' if improvement else 'off'}"
        if scenario.strategy_kind == "interval"
        else f"plain({discipline})"
    )
    header = (
        f"scenario={scenario.name} adversary={scenario.adversary_kind}"
        f" r={scenario.r if scenario.r is not None else '-'} b={scenario.b}"
        f" strategy={mode} max_steps={max_steps}"
    )
    written = []
    trace_path = os.path.join(args.out, f"{scenario.name}_trace.csv")
    write_trace_csv(trace, trace_path, header)
    written.append(trace_path)
    packets_path = os.path.join(args.out, f"{scenario.name}_packets.csv")
    write_packets_csv(trace, packets_path, header)
    written.append(packets_path)
    if records is not None:
        phases_path = os.path.join(args.out, f"{scenario.name}_phases.csv")
        write_phases_csv(records, phases_path, header)
        written.append(phases_path)

    print(f"scenario {scenario.name}: {header[len(f'scenario={scenario.name} '):]}")
    print(
        f"steps run: {trace.last_step}{' (truncated)' if trace.truncated else ''}"
        f"  injected: {len(trace.packets)}  delivered: {trace.delivered_count}"
    )
    max_sys = trace.max_system_time
    print(
        f"max queue length: {trace.max_queue_len}"
        f"  max system time: {max_sys if max_sys is not None else '-'}"
    )
    if records is not None:
        print(f"phases completed: {len(records)} (startup + {max(len(records) - 1, 0)})")
        durations = [rec.duration_steps for rec in records if rec.phase_index >= 1]
        if len(durations) >= 10:
            label = analysis.classify_growth(durations)
            print(f"phase duration growth: {label.label} (mean ratio {label.ratio:.3f})")
        else:
            print("phase duration growth: n/a (needs at least 10 completed phases)")
    for path in written:
        print(f"wrote {path}")
    return 0


# ---- bounds ----------------------------------------------------------------


def _bound_series(args: argparse.Namespace) -> tuple[list[float], Optional[float]]:
    """Series for i = 1..i_max plus the limit (None when undefined/infinite)."""
    r, b, d = args.r, args.b, args.d
    c1, c2, c3 = args.c1, args.c2, args.c3
    if args.formula == "line":
        series = [analysis.line_phase_time_bound(i, r, b, d) for i in range(1, args.i_max + 1)]
        return series, analysis.line_phase_time_limit(r, d)
    if args.formula == "tree":
        series = [analysis.tree_phase_time_bound(i, r, b, d) for i in range(1, args.i_max + 1)]
        limit = analysis.tree_phase_time_limit(r, b, d)
        return series, (limit if limit != float("inf") else None)
    if args.formula == "nonforward":
        return analysis.nonforward_k_series(args.i_max, r, b, d, args.log_base), None
    if args.formula == "theorem-time":
        series = [
            analysis.theorem_phase_time_bound(i, r, b, d, c1, c2, c3)
            for i in range(1, args.i_max + 1)
        ]
        return series, analysis.theorem_phase_time_limit(r, d, c1, c2, c3)
    series = [
        analysis.theorem_phase_packet_bound(i, r, b, d, c1, c2, c3)
        for i in range(1, args.i_max + 1)
    ]
    return series, analysis.theorem_phase_packet_limit(r, d, c1, c2, c3)


def cmd_bounds(args: argparse.Namespace) -> int:
    if args.i_max < 1:
        print(f"error: --i-max must be >= 1, got {args.i_max}", file=sys.stderr)
        return 2
    try:
        series, limit = _bound_series(args)
    except ValueError as exc:  # includes RecurrenceDomainError
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"# formula={args.formula} r={args.r} b={args.b} d={args.d}"
        f" c1={args.c1} c2={args.c2} c3={args.c3} log_base={args.log_base}"
    )
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["i", "value"])
    for i, value in enumerate(series, start=1):
        writer.writerow([i, value])
    if limit is not None:
        writer.writerow(["limit", limit])
    if len(series) >= 10:
        writer.writerow(["growth", analysis.classify_growth(series).label])
    return 0


# ---- sweep -----------------------------------------------------------------


def cmd_sweep(args: argparse.Namespace) -> int:
    shapes = tuple(s.strip() for s in args.shapes.split(",") if s.strip())
    try:
        if args.max_packets < 1 or args.max_edges < 1:
            raise ValueError("--max-packets and --max-edges must be >= 1")
        rows = run_sweep(args.max_packets, args.max_edges, shapes)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"# sweep max_packets={args.max_packets} max_edges={args.max_edges}"
        f" shapes={','.join(shapes)}"
    )
    write_sweep_csv(rows, sys.stdout)
    print(f"# {sweep_summary(rows)}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "bounds":
        return cmd_bounds(args)
    return cmd_sweep(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
