"""Dense state-vector reference simulator.

The state is reshaped to one axis per qubit (axis q is qubit q) and
each gate touches only the axes it acts on. Runs in double precision.
"""

from __future__ import annotations

from fractions import Fraction
from math import sqrt

import numpy as np

from ..errors import WidthLimitError
from ..persistence import ExactValue
from .ir import Circuit, DenseState, Gate, GateKind

DENSE_MAX_QUBITS = 14

_SQRT2_INV = 1 / sqrt(2)
_GATE_1Q = {
    GateKind.HADAMARD: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    GateKind.PAULI_X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.PAULI_Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.PAULI_Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.IDENTITY: np.eye(2, dtype=complex),
}
_NOT = _GATE_1Q[GateKind.PAULI_X]


def _apply_matrix(state: np.ndarray, matrix: np.ndarray, axes: list[int]) -> np.ndarray:
    k = len(axes)
    tensor = matrix.reshape([2] * (2 * k))
    out = np.tensordot(tensor, state, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def dense_apply(state: np.ndarray, gate: Gate, width: int) -> np.ndarray:
    """Apply one gate to a flat amplitude array of length 2**width."""
    psi = state.reshape([2] * width)
    kind = gate.kind
    if kind in _GATE_1Q:
        psi = _apply_matrix(psi, _GATE_1Q[kind], list(gate.targets))
    elif kind is GateKind.CONDITIONAL_PHASE_SHIFT:
        psi = psi.copy()
        zeros: list[int | slice] = [slice(None)] * width
        for q in gate.targets:
            zeros[q] = 0
        psi[tuple(zeros)] *= -1
    elif kind is GateKind.CUSTOM:
        assert gate.matrix is not None
        matrix = np.array([[v.to_complex() for v in row] for row in gate.matrix], dtype=complex)
        psi = _apply_matrix(psi, matrix, list(gate.targets))
    else:
        # X on the target, restricted to the slice where every control matches
        psi = psi.copy()
        index: list[int | slice] = [slice(None)] * width
        for control in gate.controls:
            index[control.qubit] = control.polarity
        (target,) = gate.targets
        axis = target - sum(1 for c in gate.controls if c.qubit < target)
        block = psi[tuple(index)]
        psi[tuple(index)] = np.moveaxis(np.tensordot(_NOT, block, axes=([1], [axis])), 0, axis)
    return psi.reshape(-1)


def dense_initial(bits: str) -> np.ndarray:
    state = np.zeros(1 << len(bits), dtype=complex)
    state[int(bits, 2)] = 1.0
    return state


def dense_simulate(circuit: Circuit, max_qubits: int = DENSE_MAX_QUBITS) -> DenseState:
    if circuit.width > min(max_qubits, DENSE_MAX_QUBITS):
        raise WidthLimitError(
            f"dense simulation is capped at {min(max_qubits, DENSE_MAX_QUBITS)} qubits, circuit has {circuit.width}"
        )
    state = dense_initial(circuit.initial_state)
    for gate in circuit.gates:
        state = dense_apply(state, gate, circuit.width)
    return DenseState(state)


# exact unitaries used by random_circuit for custom gates
_ROTATION = [
    [ExactValue(Fraction(3, 5)), ExactValue(Fraction(4, 5))],
    [ExactValue(Fraction(-4, 5)), ExactValue(Fraction(3, 5))],
]
_PHASES = [ExactValue.root_of_unity(k, 8) for k in range(8)]


def _random_custom(rng: np.random.Generator, width: int) -> Gate:
    k = int(rng.integers(1, min(3, width) + 1))
    targets = [int(q) for q in rng.choice(width, size=k, replace=False)]
    size = 1 << k
    if k == 1 and rng.random() < 0.5:
        return Gate.custom(targets, _ROTATION)
    perm = rng.permutation(size)
    zero = ExactValue(Fraction(0))
    matrix = [[zero] * size for _ in range(size)]
    for r in range(size):
        matrix[r][int(perm[r])] = _PHASES[int(rng.integers(0, 8))]
    return Gate.custom(targets, matrix)


def random_circuit(width: int, depth: int, rng: np.random.Generator) -> Circuit:
    """A random circuit drawing from every gate kind the width allows."""
    choices = ["h", "x", "y", "z", "id", "cps", "custom"]
    if width >= 2:
        choices += ["cnot", "oracle"]
    if width >= 3:
        choices += ["ccnot", "mcnot"]
    gates: list[Gate] = []
    for _ in range(depth):
        name = choices[int(rng.integers(0, len(choices)))]
        if name in ("h", "x", "y", "z", "id"):
            kind = GateKind(name)
            gates.append(Gate.single(kind, int(rng.integers(0, width))))
        elif name == "cps":
            k = int(rng.integers(1, width + 1))
            gates.append(Gate.cps(sorted(int(q) for q in rng.choice(width, size=k, replace=False))))
        elif name == "custom":
            gates.append(_random_custom(rng, width))
        elif name == "cnot":
            c, t = (int(q) for q in rng.choice(width, size=2, replace=False))
            gates.append(Gate.cnot(c, t))
        elif name == "oracle":
            pattern = "".join("01d"[int(i)] for i in rng.integers(0, 3, size=width - 1))
            gates.append(Gate.oracle(pattern))
        else:
            k = 2 if name == "ccnot" else int(rng.integers(1, width))
            qubits = [int(q) for q in rng.choice(width, size=k + 1, replace=False)]
            gates.append(Gate.mcnot(qubits[:-1], qubits[-1]))
    initial = "".join(str(int(b)) for b in rng.integers(0, 2, size=width))
    return Circuit(width, initial, tuple(gates))
