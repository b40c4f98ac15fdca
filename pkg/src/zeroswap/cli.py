"""Command-line entry point: ``zeroswap compile`` and ``zeroswap summarize``."""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import STRATEGIES, ConfigError, build_config
from .hardware import MACHINES
from .layout import ContinuousPlacement
from .pipeline import FootprintError, compile_circuit
from .qasm import QasmError, parse_qasm
from .report import build_report, dumps, summarize
from .scheduler import CompileError
from .svg import render_trace

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING = 3
EXIT_QASM = 4
EXIT_FOOTPRINT = 5
EXIT_COMPILE = 6
EXIT_CONFIG = 7


class CliFailure(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def build_parser():
    parser = argparse.ArgumentParser(prog="zeroswap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="compile OpenQASM input(s) into JSON report(s)")
    c.add_argument("--input", required=True, nargs="+", metavar="QASM")
    c.add_argument("--machine", choices=sorted(MACHINES))
    c.add_argument("--aod-count", type=int)
    c.add_argument("--strategy", choices=STRATEGIES)
    c.add_argument("--seed", type=int)
    c.add_argument("--shots", type=int)
    c.add_argument("--no-homing", action="store_true", help="leave moved atoms where they are")
    c.add_argument("--placement-cache", metavar="PATH",
                   help="load the continuous placement from PATH, or write it there if absent")
    c.add_argument("--trace-svg", metavar="PATH", help="write the movement trace as SVG")
    c.add_argument("--out", metavar="PATH",
                   help="report file (a directory when several inputs are given); default stdout")
    c.add_argument("--config", metavar="PATH", help="TOML or JSON file overriding the defaults")
    c.add_argument("--timing", action="store_true", help="include wall-clock compile time")
    c.add_argument("--jobs", type=int, default=1, help="parallel workers for several inputs")

    s = sub.add_parser("summarize", help="comparison table across JSON reports")
    s.add_argument("reports", nargs="+", metavar="REPORT")
    return parser


def _read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CliFailure(EXIT_MISSING, f"no such file: {path}") from None
    except OSError as exc:
        raise CliFailure(EXIT_MISSING, f"cannot read {path}: {exc}") from None


def _load_placement(path, n):
    p = Path(path)
    if not p.exists():
        return None
    try:
        placement = ContinuousPlacement.from_json(json.loads(p.read_text(encoding="utf-8")))
    except (ValueError, KeyError, TypeError) as exc:
        raise CliFailure(EXIT_CONFIG, f"bad placement cache {path}: {exc}") from None
    if len(placement.coords) != n:
        raise CliFailure(EXIT_CONFIG, f"placement cache {path} has {len(placement.coords)} "
                                      f"qubits, circuit has {n}")
    return placement


def compile_one(path, args):
    """Compile one file; returns (report dict, compile result)."""
    text = _read_text(path)
    try:
        circuit = parse_qasm(text)
    except QasmError as exc:
        raise CliFailure(EXIT_QASM, f"{path}: {exc}") from None
    try:
        config = build_config(
            args.config, machine=args.machine, aod_count=args.aod_count, strategy=args.strategy,
            seed=args.seed, shots=args.shots, homing=False if args.no_homing else None)
    except ConfigError as exc:
        raise CliFailure(EXIT_CONFIG, str(exc)) from None
    placement = _load_placement(args.placement_cache, circuit.num_qubits) if args.placement_cache else None
    try:
        result = compile_circuit(circuit, config, name=Path(path).stem, placement=placement)
    except FootprintError as exc:
        raise CliFailure(EXIT_FOOTPRINT, f"{path}: {exc}") from None
    except CompileError as exc:
        raise CliFailure(EXIT_COMPILE, f"{path}: {exc}") from None
    if args.placement_cache and placement is None:
        Path(args.placement_cache).write_text(json.dumps(result.placement.to_json()) + "\n",
                                              encoding="utf-8")
    return build_report(result, include_timing=args.timing)


def _worker(path, args):
    try:
        return path, compile_one(path, args), None
    except CliFailure as exc:
        return path, None, (exc.code, str(exc))


def _write(path, text):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliFailure(EXIT_MISSING, f"cannot write {path}: {exc}") from None


def cmd_compile(args):
    inputs = args.input
    if len(inputs) > 1 and args.trace_svg:
        raise CliFailure(EXIT_USAGE, "--trace-svg needs a single --input")
    if len(inputs) > 1 and args.placement_cache:
        raise CliFailure(EXIT_USAGE, "--placement-cache needs a single --input")
    if args.jobs > 1 and len(inputs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_worker, inputs, [args] * len(inputs)))
    else:
        outcomes = [_worker(p, args) for p in inputs]
    code = EXIT_OK
    for path, report, err in outcomes:
        if err is not None:
            print(f"zeroswap: {err[1]}", file=sys.stderr)
            code = code or err[0]
            continue
        text = dumps(report)
        if args.out is None:
            sys.stdout.write(text)
        elif len(inputs) > 1:
            out_dir = Path(args.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            _write(out_dir / f"{Path(path).stem}.json", text)
        else:
            _write(args.out, text)
        if args.trace_svg:
            _write(args.trace_svg, render_trace(report["movement_trace"], report["topology"],
                                                title=f"{report['circuit_name']} movement"))
        print(f"{report['circuit_name']}: cz={report['cz_count']} swaps={report['swap_count']} "
              f"runtime={report['circuit_runtime_us']:.1f}us "
              f"p={report['fidelity']['p_success']:.4f} copies={report['parallel']['copies']}",
              file=sys.stderr)
    return code


def cmd_summarize(args):
    reports = []
    for path in args.reports:
        try:
            reports.append(json.loads(_read_text(path)))
        except json.JSONDecodeError as exc:
            raise CliFailure(EXIT_CONFIG, f"{path} is not a JSON report: {exc}") from None
    try:
        sys.stdout.write(summarize(reports))
    except KeyError as exc:
        raise CliFailure(EXIT_CONFIG, f"report is missing field {exc}") from None
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "compile":
            return cmd_compile(args)
        return cmd_summarize(args)
    except CliFailure as exc:
        print(f"zeroswap: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
