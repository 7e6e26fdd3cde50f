"""Run reports, CSV writers and plain-text tables.

Reports go to stdout and must be byte-identical across runs apart from
timing fields.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from .config import ReportSettings
from .core.manager import Manager
from .grover import GroverRecord, GroverTrace, GrowthRow
from .linalg import QuiddVector, index_bits, top_amplitudes
from .numerics import PrecisionConfig, format_complex

# node id, level, two successor ids, unique-table entry
NODE_BYTES = 48
DENSE_AMPLITUDE_BYTES = 16
PROBABILITY_TOLERANCE = 1e-9

TRACE_COLUMNS = ("iteration", "success_probability", "state_nodes", "elapsed_ms")


@dataclass(frozen=True)
class AmplitudeRow:
    index: int
    bits: str
    amplitude: complex
    probability: float


@dataclass
class RunReport:
    """Summary of one circuit run."""

    qubits: int
    gates: int
    precision: PrecisionConfig
    amplitudes: list[AmplitudeRow]
    final_nodes: int
    peak_nodes: int
    elapsed_ms: float
    step_nodes: list[int] = field(default_factory=list)
    dense_deviation: float | None = None

    def __post_init__(self) -> None:
        weights = [row.probability for row in self.amplitudes]
        if weights != sorted(weights, reverse=True):
            raise ValueError("amplitude rows must be sorted by descending magnitude")
        if sum(weights) > 1 + PROBABILITY_TOLERANCE:
            raise ValueError(f"listed probabilities sum to {sum(weights)}, above 1")

    @classmethod
    def build(
        cls,
        state: QuiddVector,
        gates: int,
        settings: ReportSettings,
        peak_nodes: int,
        elapsed_ms: float,
        step_nodes: list[int] | None = None,
    ) -> "RunReport":
        manager = state.manager
        field_ = manager.field
        rows = []
        for index, value in top_amplitudes(state, settings.top_k):
            if field_.is_zero(value):
                continue
            bits = "".join(str(b) for b in index_bits(index, state.qubits))
            weight = float(field_.to_complex(field_.abs2(value)).real)
            rows.append(AmplitudeRow(index, bits, field_.to_complex(value), weight))
        final = manager.node_stats(state.handle).total
        return cls(
            qubits=state.qubits,
            gates=gates,
            precision=manager.precision,
            amplitudes=rows,
            final_nodes=final,
            peak_nodes=max(peak_nodes, final),
            elapsed_ms=elapsed_ms,
            step_nodes=list(step_nodes or []),
        )

    def render(self, digits: int = 6) -> str:
        lines = [
            precision_header(self.precision).rstrip("\n"),
            f"qubits: {self.qubits}",
            f"gates: {self.gates}",
            f"final nodes: {self.final_nodes}",
            f"peak nodes: {self.peak_nodes}",
            f"elapsed_ms: {self.elapsed_ms:.3f}",
        ]
        if self.dense_deviation is not None:
            lines.append(f"dense max deviation: {self.dense_deviation:.3e}")
        if self.step_nodes:
            lines.append("nodes per step: " + " ".join(str(n) for n in self.step_nodes))
        lines.append("amplitudes:")
        table = format_table(
            ("state", "amplitude", "probability"),
            [(f"|{row.bits}>", format_complex(row.amplitude, digits), f"{row.probability:.{digits}g}")
             for row in self.amplitudes],
        )
        lines.extend("  " + line for line in table.splitlines())
        return "\n".join(lines) + "\n"


def approx_bytes(manager: Manager, nodes: int) -> int:
    """Nodes at a fixed per-node size plus the terminal table."""
    return nodes * NODE_BYTES + len(manager.terminals) * terminal_bytes(manager.precision)


def terminal_bytes(precision: PrecisionConfig) -> int:
    if precision.native:
        return DENSE_AMPLITUDE_BYTES
    # two mantissas plus exponents
    return 2 * (-(-precision.mantissa_bits // 8) + 8)


def dense_bytes(qubits: int) -> int:
    return DENSE_AMPLITUDE_BYTES << qubits


def format_table(headers: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """Left-aligned text table; the first column is the row key."""
    body = [[str(cell) for cell in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in body:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    out = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    out.append("  ".join("-" * w for w in widths))
    out += ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in body]
    return "\n".join(out) + "\n"


def write_csv(stream: IO[str], headers: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)


def trace_rows(records: Iterable[GroverRecord]) -> list[tuple[object, ...]]:
    return [
        (r.iteration, f"{r.success_probability:.12f}", r.state_nodes, f"{r.elapsed_ms:.3f}") for r in records
    ]


def precision_header(precision: PrecisionConfig, prefix: str = "") -> str:
    """The `precision:` line every report opens with."""
    return f"{prefix}precision: {precision.describe()}\n"


def trace_csv(trace: GroverTrace, precision: PrecisionConfig | None = None) -> str:
    buffer = io.StringIO()
    if precision is not None:
        buffer.write(precision_header(precision, prefix="# "))
    write_csv(buffer, TRACE_COLUMNS, trace_rows(trace.records))
    return buffer.getvalue()


def grover_summary(trace: GroverTrace, precision: PrecisionConfig) -> str:
    p = trace.params
    lines = [
        precision_header(precision).rstrip("\n"),
        f"data qubits: {p.data_qubits}",
        f"pattern: {trace.pattern.pattern}",
        f"solutions: {p.solutions}",
        f"iterations (R): {p.iterations}",
        f"iterations run: {len(trace.records)}",
        f"peak iteration: {trace.peak_iteration}",
        f"peak probability: {trace.peak_probability:.12f}",
        f"peak state nodes: {trace.peak_nodes}",
    ]
    return "\n".join(lines) + "\n"


def growth_table_text(rows: Sequence[GrowthRow]) -> str:
    headers = ("qubits", "initial_h", "repeated_h", "phase_shift", "oracle_1", "oracle_2")
    return format_table(
        headers,
        [
            (
                r.qubits, r.initial_hadamard, r.repeated_hadamard, r.phase_shift, r.oracle_all_ones,
                "-" if r.oracle_mod_1024 is None else r.oracle_mod_1024,
            )
            for r in rows
        ],
    )
