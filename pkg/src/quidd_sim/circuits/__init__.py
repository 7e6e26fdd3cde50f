"""Gate-level circuits: IR, parser, operator builders, engine, dense oracle, QFT demo."""

from .dense import DENSE_MAX_QUBITS, dense_apply, dense_simulate, random_circuit
from .engine import apply_gate, run
from .ir import Circuit, Control, DenseState, Gate, GateKind
from .operators import (
    decompose_conditional_phase_shift,
    gate_diagonal,
    gate_operator,
    hadamard_wall,
)
from .parser import parse_circuit
from .qft import build_inverse_qft, qft_growth

__all__ = [
    "Circuit",
    "Control",
    "DENSE_MAX_QUBITS",
    "DenseState",
    "Gate",
    "GateKind",
    "apply_gate",
    "build_inverse_qft",
    "decompose_conditional_phase_shift",
    "dense_apply",
    "dense_simulate",
    "gate_diagonal",
    "gate_operator",
    "hadamard_wall",
    "parse_circuit",
    "qft_growth",
    "random_circuit",
    "run",
]
