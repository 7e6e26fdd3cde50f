"""Inverse quantum Fourier transform as a QuIDD.

Used only to show that the node count grows exponentially with the
qubit count: the entries omega^(-jk) / sqrt(N) take N distinct values
arranged without repeated block structure.
"""

from __future__ import annotations

import logging
from fractions import Fraction

from ..core.manager import Manager
from ..linalg import QuiddMatrix, matrix_from_function

logger = logging.getLogger(__name__)


def build_inverse_qft(manager: Manager, qubits: int) -> QuiddMatrix:
    if qubits < 1:
        raise ValueError(f"inverse QFT needs at least one qubit, got {qubits}")
    field = manager.field
    size = 1 << qubits
    scale = field.sqrt(field.real(Fraction(1, size)))
    table = [field.mul(field.root_of_unity(-m, size), scale) for m in range(size)]
    matrix = matrix_from_function(manager, qubits, lambda j, k: table[(j * k) % size])
    logger.debug("inverse QFT on %d qubits: %d nodes", qubits, manager.node_stats(matrix.handle).total)
    return matrix


def qft_growth(manager: Manager, max_qubits: int, min_qubits: int = 2) -> list[tuple[int, int]]:
    """(qubits, node total) for each inverse QFT size in range."""
    rows = []
    for n in range(min_qubits, max_qubits + 1):
        rows.append((n, manager.node_stats(build_inverse_qft(manager, n).handle).total))
    return rows
