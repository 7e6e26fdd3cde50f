"""Gate application on QuIDD state vectors."""

from __future__ import annotations

import logging
from typing import Callable

from ..core.manager import Manager
from ..errors import DimensionError
from ..linalg import QuiddMatrix, QuiddVector, basis_state, elementwise_mul, matmul
from .ir import Circuit, Gate
from .operators import gate_diagonal, gate_operator, operator_cache

logger = logging.getLogger(__name__)

StepObserver = Callable[[int, Gate, QuiddVector], None]


def apply_gate(state: QuiddVector, gate: Gate, operator: QuiddMatrix | None = None) -> QuiddVector:
    """Diagonal gates multiply element-wise by their diagonal; others use matmul."""
    width = state.qubits
    if any(q >= width for q in gate.qubits):
        raise DimensionError(f"gate '{gate}' does not fit a {width}-qubit state")
    manager = state.manager
    if gate.is_diagonal:
        result = elementwise_mul(gate_diagonal(manager, gate, width), state)
    else:
        if operator is None:
            operator = gate_operator(manager, gate, width)
        result = matmul(operator, state)
    assert isinstance(result, QuiddVector)
    return result


def run(circuit: Circuit, manager: Manager | None = None, observer: StepObserver | None = None) -> QuiddVector:
    """Fold apply_gate over the circuit, starting from its initial basis state."""
    manager = manager or Manager()
    state = basis_state(manager, circuit.initial_state)
    operators = operator_cache(manager, circuit.width)
    for step, gate in enumerate(circuit.gates, start=1):
        operator = None if gate.is_diagonal else operators(gate)
        state = apply_gate(state, gate, operator)
        if observer is not None:
            observer(step, gate, state)
        manager.maybe_collect()
    logger.debug("ran %d gates on %d qubits, %d live nodes", len(circuit.gates), circuit.width, len(manager))
    return state
