"""Gate-level circuit IR.

Qubit 0 is the most significant bit of every state index. `Circuit` and
`Gate` are immutable and validated on construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..persistence import ExactValue

MAX_CUSTOM_QUBITS = 3


class GateKind(str, Enum):
    HADAMARD = "h"
    PAULI_X = "x"
    PAULI_Y = "y"
    PAULI_Z = "z"
    IDENTITY = "id"
    CNOT = "cnot"
    MULTI_CONTROLLED_NOT = "mcnot"
    CONDITIONAL_PHASE_SHIFT = "cps"
    ORACLE_FLIP = "oracle"
    CUSTOM = "custom"


SINGLE_QUBIT_KINDS = frozenset(
    {GateKind.HADAMARD, GateKind.PAULI_X, GateKind.PAULI_Y, GateKind.PAULI_Z, GateKind.IDENTITY}
)
DIAGONAL_KINDS = frozenset({GateKind.PAULI_Z, GateKind.IDENTITY, GateKind.CONDITIONAL_PHASE_SHIFT})
NOT_KINDS = frozenset({GateKind.CNOT, GateKind.MULTI_CONTROLLED_NOT, GateKind.ORACLE_FLIP})


@dataclass(frozen=True)
class Control:
    qubit: int
    polarity: int = 1


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[Control, ...] = ()
    pattern: str | None = None
    matrix: tuple[tuple[ExactValue, ...], ...] | None = None

    def __post_init__(self) -> None:
        qubits = list(self.targets) + [c.qubit for c in self.controls]
        if any(q < 0 for q in qubits):
            raise ValueError(f"qubit indices must be non-negative in {self.kind.value}")
        if len(set(qubits)) != len(qubits):
            duplicate = next(q for q in qubits if qubits.count(q) > 1)
            raise ValueError(f"duplicate qubit {duplicate} in {self.kind.value}")
        if any(c.polarity not in (0, 1) for c in self.controls):
            raise ValueError("control polarity must be 0 or 1")
        if self.kind in SINGLE_QUBIT_KINDS and (len(self.targets) != 1 or self.controls):
            raise ValueError(f"{self.kind.value} acts on exactly one qubit")
        if self.kind in NOT_KINDS and len(self.targets) != 1:
            raise ValueError(f"{self.kind.value} has exactly one target")
        if self.kind is GateKind.CUSTOM:
            self._check_custom()

    def _check_custom(self) -> None:
        k = len(self.targets)
        if not 1 <= k <= MAX_CUSTOM_QUBITS:
            raise ValueError(f"custom gates act on 1 to {MAX_CUSTOM_QUBITS} qubits, got {k}")
        if self.controls:
            raise ValueError("custom gates take no controls")
        size = 1 << k
        if self.matrix is None or len(self.matrix) != size or any(len(row) != size for row in self.matrix):
            raise ValueError(f"custom gate on {k} qubit(s) needs a {size}x{size} matrix")

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(c.qubit for c in self.controls) + self.targets

    @property
    def is_diagonal(self) -> bool:
        return self.kind in DIAGONAL_KINDS

    # -- constructors --

    @classmethod
    def single(cls, kind: GateKind, qubit: int) -> "Gate":
        return cls(kind, (qubit,))

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls(GateKind.CNOT, (target,), (Control(control),))

    @classmethod
    def mcnot(cls, controls: tuple[int, ...] | list[int], target: int) -> "Gate":
        return cls(GateKind.MULTI_CONTROLLED_NOT, (target,), tuple(Control(c) for c in controls))

    @classmethod
    def cps(cls, targets: tuple[int, ...] | list[int]) -> "Gate":
        return cls(GateKind.CONDITIONAL_PHASE_SHIFT, tuple(targets))

    @classmethod
    def oracle(cls, pattern: str) -> "Gate":
        """Flip qubit len(pattern) when qubits 0..len(pattern)-1 match `pattern`."""
        if any(symbol not in "01d" for symbol in pattern):
            raise ValueError(f"oracle pattern must use 0, 1 and d, got {pattern!r}")
        controls = tuple(Control(i, int(symbol)) for i, symbol in enumerate(pattern) if symbol != "d")
        return cls(GateKind.ORACLE_FLIP, (len(pattern),), controls, pattern=pattern)

    @classmethod
    def custom(cls, targets: tuple[int, ...] | list[int], matrix: list[list[ExactValue]]) -> "Gate":
        return cls(GateKind.CUSTOM, tuple(targets), matrix=tuple(tuple(row) for row in matrix))

    def __str__(self) -> str:
        if self.kind is GateKind.ORACLE_FLIP:
            return f"oracle {self.pattern}"
        if self.kind is GateKind.CUSTOM:
            assert self.matrix is not None
            rows = "; ".join(" ".join(str(v) for v in row) for row in self.matrix)
            return f"custom {' '.join(map(str, self.targets))} : {rows}"
        parts = [self.kind.value]
        parts += [str(c.qubit) for c in self.controls]
        parts += [str(t) for t in self.targets]
        return " ".join(parts)


@dataclass(frozen=True)
class Circuit:
    width: int
    initial_state: str
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError(f"circuit width must be >= 1, got {self.width}")
        if len(self.initial_state) != self.width or any(b not in "01" for b in self.initial_state):
            raise ValueError(f"initial state must be {self.width} bits of 0/1, got {self.initial_state!r}")
        for gate in self.gates:
            for q in gate.qubits:
                if q >= self.width:
                    raise ValueError(f"qubit index {q} out of range for {self.width} qubits")

    @classmethod
    def of(cls, width: int, gates: list[Gate] | tuple[Gate, ...] = (), initial_state: str | None = None) -> "Circuit":
        return cls(width, initial_state or "0" * width, tuple(gates))

    def to_text(self) -> str:
        lines = [f"qubits {self.width}", f"init {self.initial_state}"]
        lines += [str(g) for g in self.gates]
        return "\n".join(lines) + "\n"


@dataclass
class DenseState:
    """Full state vector in double precision; index bit n-1-q is qubit q."""

    amplitudes: np.ndarray

    @property
    def qubits(self) -> int:
        return int(self.amplitudes.size).bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2
