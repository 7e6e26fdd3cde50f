"""quidd-sim command-line front end.

Exit codes: 0 success, 1 usage error, 2 input/parse/config error,
3 resource-limit abort. Diagnostics go to stderr; stdout carries only
reports, tables and CSV.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import IO, NoReturn, Sequence

import numpy as np

from . import __version__
from .circuits.dense import dense_simulate, random_circuit
from .circuits.engine import run
from .circuits.ir import Circuit, Gate
from .circuits.parser import parse_circuit
from .circuits.qft import qft_growth
from .config import AppConfig, load_config
from .core.dot import to_dot
from .core.manager import Manager
from .errors import BudgetExceededError, PersistenceParseError, QuiddError, WidthLimitError
from .grover import (
    OraclePattern,
    dense_grover_trace,
    growth_table,
    oracle_pattern_n_minus,
    run_grover,
)
from .linalg import QuiddVector, to_dense_vector
from .log import setup_logging
from .persistence import classify, oracle_persistent, parse_set
from .reports import (
    RunReport,
    approx_bytes,
    dense_bytes,
    format_table,
    grover_summary,
    growth_table_text,
    precision_header,
    trace_csv,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_LIMIT = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quidd-sim", description="QuIDD quantum circuit simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="YAML config file")
    parser.add_argument("--precision-bits", type=int, help="terminal mantissa bits (53 = native double)")
    parser.add_argument("--epsilon", type=float, help="terminal merge tolerance (0 = exact)")
    parser.add_argument("--comparison-mode", choices=["relative", "absolute"])
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized workloads")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="simulate a circuit file")
    p.add_argument("file", type=Path)
    p.add_argument("--check-dense", action="store_true", help="compare against the dense simulator")
    p.add_argument("--dot", type=Path, help="write the final state as a DOT graph")
    p.add_argument("--steps", action="store_true", help="report node totals after every gate")

    p = sub.add_parser("grover", help="run Grover's search")
    p.add_argument("--qubits", type=int, required=True, help="data qubits (the oracle qubit is extra)")
    p.add_argument("--pattern", help="oracle pattern over {0,1,d}; default all ones")
    p.add_argument("--iterations", type=int, help="iterations to run; default R")
    p.add_argument("--trace", help="write the per-iteration CSV here ('-' for stdout)")

    p = sub.add_parser("qft", help="inverse QFT node-count growth")
    p.add_argument("--max-qubits", type=int, default=8)
    p.add_argument("--min-qubits", type=int, default=2)

    p = sub.add_parser("persist", help="classify finite complex sets, one per line")
    p.add_argument("file", nargs="?", default="-", help="input file ('-' or omitted for stdin)")
    p.add_argument("--verify", action="store_true", help="cross-check with the brute-force product test")

    p = sub.add_parser("bench", help="QuIDD against dense simulation")
    p.add_argument("--workload", choices=["grover", "random"], default="grover")
    p.add_argument("--min-qubits", type=int, default=4)
    p.add_argument("--max-qubits", type=int, default=12)
    p.add_argument("--depth", type=int, default=40, help="gates per random circuit")

    p = sub.add_parser("growth", help="Grover operator node totals")
    p.add_argument("--min-qubits", type=int, default=20)
    p.add_argument("--max-qubits", type=int, default=100)
    p.add_argument("--step", type=int, default=10)
    return parser


def _manager(cfg: AppConfig) -> Manager:
    return Manager(cfg.precision)


def _check_width(width: int, cfg: AppConfig) -> None:
    if width > cfg.limits.max_qubits:
        raise WidthLimitError(f"{width} qubits exceeds limits.max_qubits={cfg.limits.max_qubits}")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise UsageError(message)


def cmd_run(args: argparse.Namespace, cfg: AppConfig, out: IO[str]) -> int:
    try:
        text = args.file.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileNotFoundError(f"cannot read circuit file {args.file}: {exc.strerror or exc}") from None
    circuit = parse_circuit(text)
    _check_width(circuit.width, cfg)
    if args.check_dense and circuit.width > cfg.limits.dense_max_qubits:
        raise WidthLimitError(
            f"--check-dense is capped at {cfg.limits.dense_max_qubits} qubits, circuit has {circuit.width}"
        )
    manager = _manager(cfg)
    step_nodes: list[int] = []

    def observe(step: int, gate: Gate, state: QuiddVector) -> None:
        step_nodes.append(manager.node_stats(state.handle).total)

    start = time.perf_counter()
    state = run(circuit, manager, observe)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    report = RunReport.build(
        state,
        gates=len(circuit.gates),
        settings=cfg.report,
        peak_nodes=max(step_nodes, default=0),
        elapsed_ms=elapsed_ms,
        step_nodes=step_nodes if args.steps else None,
    )
    if args.check_dense:
        dense = dense_simulate(circuit, cfg.limits.dense_max_qubits)
        report.dense_deviation = float(np.max(np.abs(to_dense_vector(state) - dense.amplitudes)))
    if args.dot is not None:
        args.dot.write_text(to_dot(state.handle, digits=cfg.report.amplitude_digits), encoding="utf-8")
        logger.info("wrote %s", args.dot)
    out.write(report.render(cfg.report.amplitude_digits))
    return EXIT_OK


def cmd_grover(args: argparse.Namespace, cfg: AppConfig, out: IO[str]) -> int:
    _require(args.qubits >= 1, "--qubits must be >= 1")
    pattern = OraclePattern(args.pattern if args.pattern is not None else "1" * args.qubits)
    _require(
        pattern.data_qubits == args.qubits,
        f"pattern has {pattern.data_qubits} symbols, --qubits is {args.qubits}",
    )
    _require(args.iterations is None or args.iterations >= 0, "--iterations must be >= 0")
    trace = run_grover(
        pattern,
        _manager(cfg),
        iterations=args.iterations,
        budget_secs=cfg.limits.time_budget_secs,
        max_qubits=cfg.limits.max_qubits,
    )
    csv_text = trace_csv(trace, cfg.precision)
    if args.trace == "-":
        out.write(csv_text)
        return EXIT_OK
    if args.trace is not None:
        Path(args.trace).write_text(csv_text, encoding="utf-8", newline="\n")
    out.write(grover_summary(trace, cfg.precision))
    return EXIT_OK


def cmd_qft(args: argparse.Namespace, cfg: AppConfig, out: IO[str]) -> int:
    _require(1 <= args.min_qubits <= args.max_qubits, "need 1 <= --min-qubits <= --max-qubits")
    _check_width(args.max_qubits, cfg)
    rows = qft_growth(_manager(cfg), args.max_qubits, args.min_qubits)
    table = []
    previous = None
    for n, nodes in rows:
        ratio = "-" if previous is None else f"{nodes / previous:.3f}"
        table.append((n, nodes, ratio))
        previous = nodes
    out.write(precision_header(cfg.precision))
    out.write(format_table(("qubits", "nodes", "ratio"), table))
    return EXIT_OK


def cmd_persist(args: argparse.Namespace, cfg: AppConfig, out: IO[str]) -> int:
    if args.file == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(args.file).read_text(encoding="utf-8")
        except OSError as exc:
            raise FileNotFoundError(f"cannot read set file {args.file}: {exc.strerror or exc}") from None
    out.write(precision_header(cfg.precision))
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            g = parse_set(line)
        except PersistenceParseError as exc:
            raise PersistenceParseError(f"line {number}: {exc}") from None
        result = classify(g)
        text_out = result.describe()
        if args.verify:
            agrees = oracle_persistent(g) == result.persistent
            text_out += " (brute force agrees)" if agrees else " (brute force DISAGREES)"
        out.write(text_out + "\n")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, cfg: AppConfig, out: IO[str]) -> int:
    _require(1 <= args.min_qubits <= args.max_qubits, "need 1 <= --min-qubits <= --max-qubits")
    _require(args.depth >= 0, "--depth must be >= 0")
    low = max(args.min_qubits, 2) if args.workload == "grover" else args.min_qubits
    _check_width(args.max_qubits, cfg)
    rng = np.random.default_rng(args.seed)
    rows = []
    for n in range(low, args.max_qubits + 1):
        manager = _manager(cfg)
        circuit: Circuit | None = None
        start = time.perf_counter()
        if args.workload == "grover":
            pattern = oracle_pattern_n_minus(n - 1, 0)
            trace = run_grover(pattern, manager, budget_secs=cfg.limits.time_budget_secs)
            nodes = trace.peak_nodes
        else:
            circuit = random_circuit(n, args.depth, rng)
            peak = [0]

            def observe(step: int, gate: Gate, state: QuiddVector) -> None:
                peak[0] = max(peak[0], manager.node_stats(state.handle).total)

            run(circuit, manager, observe)
            nodes = peak[0]
        quidd_ms = (time.perf_counter() - start) * 1000.0
        dense_ms = "-"
        if n <= cfg.limits.dense_max_qubits:
            start = time.perf_counter()
            if circuit is None:
                dense_grover_trace(oracle_pattern_n_minus(n - 1, 0))
            else:
                dense_simulate(circuit, cfg.limits.dense_max_qubits)
            dense_ms = f"{(time.perf_counter() - start) * 1000.0:.1f}"
        rows.append((n, nodes, approx_bytes(manager, nodes), f"{quidd_ms:.1f}", dense_bytes(n), dense_ms))
    out.write(precision_header(cfg.precision))
    out.write(
        format_table(("qubits", "quidd_nodes", "quidd_bytes", "quidd_ms", "dense_bytes", "dense_ms"), rows)
    )
    return EXIT_OK


def cmd_growth(args: argparse.Namespace, cfg: AppConfig, out: IO[str]) -> int:
    _require(2 <= args.min_qubits <= args.max_qubits, "need 2 <= --min-qubits <= --max-qubits")
    _require(args.step >= 1, "--step must be >= 1")
    _check_width(args.max_qubits, cfg)
    rows = growth_table(range(args.min_qubits, args.max_qubits + 1, args.step), _manager(cfg))
    out.write(precision_header(cfg.precision))
    out.write(growth_table_text(rows))
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "grover": cmd_grover,
    "qft": cmd_qft,
    "persist": cmd_persist,
    "bench": cmd_bench,
    "growth": cmd_growth,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        setup_logging()
        cfg = load_config(args.config).with_overrides(args.precision_bits, args.epsilon, args.comparison_mode)
        return COMMANDS[args.command](args, cfg, sys.stdout)
    except UsageError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WidthLimitError, BudgetExceededError) as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (QuiddError, ValueError, OSError) as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
