"""Grover search driver.

Layout: data qubits 0..n-1, oracle qubit n. The state starts in
|0...0>|1>, every qubit gets a Hadamard, and each iteration applies

    oracle; H on data; conditional phase shift on data; H on data

The phase shift is applied as an element-wise product with its
diagonal. After the last iteration the oracle qubit gets a Hadamard.
All operators are built once before iterating.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .circuits.dense import dense_apply, dense_initial
from .circuits.ir import Circuit, Gate, GateKind
from .circuits.operators import gate_diagonal, gate_operator, hadamard_wall
from .core.manager import Manager
from .core.ops import ABS2
from .errors import BudgetExceededError, DimensionError, WidthLimitError
from .linalg import (
    QuiddMatrix,
    QuiddVector,
    basis_state,
    elementwise_mul,
    matmul,
    pattern_indicator,
    sum_entries,
)
from .numerics import TerminalTable

logger = logging.getLogger(__name__)

# Oracle 2 of the growth table fixes the ten leading data qubits
MOD_1024_FIXED = 10


@dataclass(frozen=True)
class OraclePattern:
    """Data-qubit pattern over {0, 1, d}; d matches either bit."""

    pattern: str

    def __post_init__(self) -> None:
        if not self.pattern:
            raise ValueError("oracle pattern must cover at least one data qubit")
        bad = [s for s in self.pattern if s not in "01d"]
        if bad:
            raise ValueError(f"oracle pattern symbols are 0, 1 and d, got {bad[0]!r}")

    @property
    def data_qubits(self) -> int:
        return len(self.pattern)

    @property
    def solutions(self) -> int:
        return 1 << self.pattern.count("d")

    def matches(self, index: int) -> bool:
        """True when data index `index` (qubit 0 most significant) matches."""
        n = self.data_qubits
        for i, symbol in enumerate(self.pattern):
            bit = (index >> (n - 1 - i)) & 1
            if symbol != "d" and int(symbol) != bit:
                return False
        return True


@dataclass(frozen=True)
class GroverParams:
    data_qubits: int
    solutions: int
    database_size: int
    theta: float
    iterations: int

    @classmethod
    def of(cls, pattern: OraclePattern) -> "GroverParams":
        n, m = pattern.data_qubits, pattern.solutions
        size = 1 << n
        return cls(n, m, size, math.sqrt(m / size), iterations_for(n, m))


@dataclass(frozen=True)
class GroverRecord:
    iteration: int
    success_probability: float
    state_nodes: int
    terminal_count: int
    amplitude_classes: int
    recursion_steps: int
    elapsed_ms: float


@dataclass
class GroverTrace:
    params: GroverParams
    pattern: OraclePattern
    records: list[GroverRecord] = field(default_factory=list)
    initial_nodes: int = 0
    final_state: QuiddVector | None = None

    @property
    def peak_nodes(self) -> int:
        return max([self.initial_nodes] + [r.state_nodes for r in self.records])

    @property
    def peak_iteration(self) -> int:
        """Iteration with the highest success probability (first on ties)."""
        if not self.records:
            return 0
        best = max(r.success_probability for r in self.records)
        return next(r.iteration for r in self.records if r.success_probability == best)

    @property
    def peak_probability(self) -> float:
        return max((r.success_probability for r in self.records), default=0.0)


def iterations_for(n: int, m: int) -> int:
    """floor((pi / 4) * sqrt(2**n / m))."""
    if n < 1:
        raise ValueError(f"data qubit count must be >= 1, got {n}")
    if not 1 <= m <= 1 << n:
        raise ValueError(f"solution count must be in [1, {1 << n}], got {m}")
    return math.floor(math.pi / 4 * math.sqrt((1 << n) / m))


def oracle_pattern_n_minus(n: int, k: int) -> OraclePattern:
    """Pattern with the last k data qubits free: 2**k solutions."""
    if not 0 <= k <= n:
        raise ValueError(f"k must be in [0, {n}], got {k}")
    return OraclePattern("1" * (n - k) + "d" * k)


def mod_1024_pattern(n: int) -> OraclePattern:
    """Ten leading ones, the remaining data qubits free."""
    if n < MOD_1024_FIXED:
        raise ValueError(f"mod-1024 oracle needs at least {MOD_1024_FIXED} data qubits, got {n}")
    return OraclePattern("1" * MOD_1024_FIXED + "d" * (n - MOD_1024_FIXED))


def build_oracle(manager: Manager, pattern: OraclePattern) -> QuiddMatrix:
    """(n+1)-qubit oracle: flips qubit n on matching data states."""
    return gate_operator(manager, Gate.oracle(pattern.pattern), pattern.data_qubits + 1)


@dataclass
class GroverOperators:
    """Every operator a run needs, built once."""

    initial_hadamard: QuiddMatrix
    data_hadamard: QuiddMatrix
    phase_shift: QuiddVector
    oracle: QuiddMatrix
    oracle_hadamard: QuiddMatrix
    indicator: QuiddVector

    @classmethod
    def build(cls, manager: Manager, pattern: OraclePattern) -> "GroverOperators":
        n = pattern.data_qubits
        width = n + 1
        return cls(
            initial_hadamard=hadamard_wall(manager, width),
            data_hadamard=hadamard_wall(manager, width, range(n)),
            phase_shift=gate_diagonal(manager, Gate.cps(range(n)), width),
            oracle=build_oracle(manager, pattern),
            oracle_hadamard=hadamard_wall(manager, width, [n]),
            indicator=pattern_indicator(manager, pattern.pattern, width),
        )


def success_probability(state: QuiddVector, pattern: OraclePattern, indicator: QuiddVector | None = None) -> float:
    """Probability that measuring the data qubits yields a matching index."""
    if state.qubits != pattern.data_qubits + 1:
        raise DimensionError(f"state has {state.qubits} qubits, pattern needs {pattern.data_qubits + 1}")
    manager = state.manager
    if indicator is None:
        indicator = pattern_indicator(manager, pattern.pattern, state.qubits)
    weights = QuiddVector(manager.wrap(manager.map_nodes(ABS2, state.root)), state.qubits)
    total = sum_entries(elementwise_mul(indicator, weights))
    probability = float(manager.field.to_complex(total).real)
    return min(1.0, max(0.0, probability))


def amplitude_classes(state: QuiddVector) -> int:
    """Distinct nonzero amplitude magnitudes among the state's terminals."""
    manager = state.manager
    field_ = manager.field
    table = TerminalTable(manager.precision)
    return len(
        {table.intern(field_.abs2(v)) for v in manager.terminal_values(state.handle) if not field_.is_zero(v)}
    )


def run_grover(
    pattern: OraclePattern,
    manager: Manager | None = None,
    iterations: int | None = None,
    budget_secs: float | None = None,
    max_qubits: int | None = None,
    clear_caches: bool = True,
    observer: Callable[[GroverRecord], Any] | None = None,
) -> GroverTrace:
    """Run Grover's search and record every iteration.

    With `clear_caches`, memo tables are emptied before each iteration
    so recursion counts measure the full cost of one iteration.
    """
    manager = manager or Manager()
    params = GroverParams.of(pattern)
    width = pattern.data_qubits + 1
    if max_qubits is not None and width > max_qubits:
        raise WidthLimitError(f"Grover run needs {width} qubits, limit is {max_qubits}")
    rounds = params.iterations if iterations is None else iterations
    logger.info(
        "grover: %d data qubits, M=%d, R=%d, running %d iterations", params.data_qubits, params.solutions,
        params.iterations, rounds,
    )
    start = time.perf_counter()
    ops = GroverOperators.build(manager, pattern)
    state = basis_state(manager, "0" * pattern.data_qubits + "1")
    state = _vector(matmul(ops.initial_hadamard, state))
    trace = GroverTrace(params, pattern, initial_nodes=manager.node_stats(state.handle).total)
    for i in range(1, rounds + 1):
        if clear_caches:
            manager.clear_caches()
        before = manager.counters.total
        state = _vector(matmul(ops.oracle, state))
        state = _vector(matmul(ops.data_hadamard, state))
        state = _vector(elementwise_mul(ops.phase_shift, state))
        state = _vector(matmul(ops.data_hadamard, state))
        steps = manager.counters.total - before
        stats = manager.node_stats(state.handle)
        elapsed = time.perf_counter() - start
        record = GroverRecord(
            iteration=i,
            success_probability=success_probability(state, pattern, ops.indicator),
            state_nodes=stats.total,
            terminal_count=stats.terminal_count,
            amplitude_classes=amplitude_classes(state),
            recursion_steps=steps,
            elapsed_ms=elapsed * 1000.0,
        )
        trace.records.append(record)
        logger.debug("iteration %d: p=%.12f nodes=%d steps=%d", i, record.success_probability, stats.total, steps)
        if observer is not None:
            observer(record)
        if budget_secs is not None and elapsed > budget_secs:
            raise BudgetExceededError(
                f"Grover run exceeded its {budget_secs:g}s budget after {i} of {rounds} iterations"
            )
        manager.maybe_collect()
    trace.final_state = _vector(matmul(ops.oracle_hadamard, state))
    logger.info("grover: peak p=%.6f at iteration %d", trace.peak_probability, trace.peak_iteration)
    return trace


def _vector(x: Any) -> QuiddVector:
    assert isinstance(x, QuiddVector)
    return x


def grover_circuit(pattern: OraclePattern, iterations: int | None = None) -> Circuit:
    """The same run as a gate list, phase shift included as a cps gate."""
    n = pattern.data_qubits
    width = n + 1
    rounds = iterations_for(n, pattern.solutions) if iterations is None else iterations
    gates: list[Gate] = [Gate.single(GateKind.HADAMARD, q) for q in range(width)]
    data_h = [Gate.single(GateKind.HADAMARD, q) for q in range(n)]
    for _ in range(rounds):
        gates.append(Gate.oracle(pattern.pattern))
        gates += data_h
        gates.append(Gate.cps(range(n)))
        gates += data_h
    gates.append(Gate.single(GateKind.HADAMARD, n))
    return Circuit(width, "0" * n + "1", tuple(gates))


def dense_grover_trace(pattern: OraclePattern, iterations: int | None = None) -> list[float]:
    """Success probability after each iteration, from the dense simulator."""
    n = pattern.data_qubits
    width = n + 1
    rounds = iterations_for(n, pattern.solutions) if iterations is None else iterations
    matching = np.array([pattern.matches(index >> 1) for index in range(1 << width)])
    state = dense_initial("0" * n + "1")
    for q in range(width):
        state = dense_apply(state, Gate.single(GateKind.HADAMARD, q), width)
    iteration_gates = [Gate.oracle(pattern.pattern)]
    iteration_gates += [Gate.single(GateKind.HADAMARD, q) for q in range(n)]
    iteration_gates.append(Gate.cps(range(n)))
    iteration_gates += [Gate.single(GateKind.HADAMARD, q) for q in range(n)]
    trace = []
    for _ in range(rounds):
        for gate in iteration_gates:
            state = dense_apply(state, gate, width)
        trace.append(float(np.sum(np.abs(state[matching]) ** 2)))
    return trace


@dataclass(frozen=True)
class GrowthRow:
    qubits: int
    initial_hadamard: int
    repeated_hadamard: int
    phase_shift: int
    oracle_all_ones: int
    oracle_mod_1024: int | None


def growth_row(manager: Manager, qubits: int) -> GrowthRow:
    """Node totals of the Grover operators at `qubits` total qubits."""
    n = qubits - 1
    if n < 1:
        raise ValueError(f"need at least 2 total qubits, got {qubits}")
    total = manager.node_stats
    mod_1024 = None
    if n >= MOD_1024_FIXED:
        mod_1024 = total(build_oracle(manager, mod_1024_pattern(n)).handle).total
    return GrowthRow(
        qubits=qubits,
        initial_hadamard=total(hadamard_wall(manager, qubits).handle).total,
        repeated_hadamard=total(hadamard_wall(manager, qubits, range(n)).handle).total,
        phase_shift=total(gate_diagonal(manager, Gate.cps(range(n)), qubits).handle).total,
        oracle_all_ones=total(build_oracle(manager, OraclePattern("1" * n)).handle).total,
        oracle_mod_1024=mod_1024,
    )


def growth_table(sizes: list[int] | range, manager: Manager | None = None) -> list[GrowthRow]:
    manager = manager or Manager()
    rows = []
    for qubits in sizes:
        rows.append(growth_row(manager, qubits))
        manager.collect()
    return rows
