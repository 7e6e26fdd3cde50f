"""Row/column variable labels and their interleaved order.

Labels map onto integer levels so that comparisons are plain integer
comparisons: ``level = 2 * index + kind`` with Row = 0 and Col = 1. This
yields R0 < C0 < R1 < C1 < ... and terminals sit at `TERMINAL_LEVEL`,
after every variable.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from enum import IntEnum

TERMINAL_LEVEL = sys.maxsize


class Kind(IntEnum):
    ROW = 0
    COL = 1


@dataclass(frozen=True, order=True)
class VariableLabel:
    """A decision variable: bit `index` of the row or column index."""

    index: int
    kind: Kind

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"variable index must be non-negative, got {self.index}")

    @property
    def level(self) -> int:
        return 2 * self.index + int(self.kind)

    @classmethod
    def from_level(cls, level: int) -> "VariableLabel":
        return cls(level // 2, Kind(level & 1))

    def __str__(self) -> str:
        return f"{'R' if self.kind is Kind.ROW else 'C'}{self.index}"


def Row(index: int) -> VariableLabel:
    return VariableLabel(index, Kind.ROW)


def Col(index: int) -> VariableLabel:
    return VariableLabel(index, Kind.COL)


def row_level(index: int) -> int:
    return 2 * index


def col_level(index: int) -> int:
    return 2 * index + 1


def qubit_of(level: int) -> int:
    return level // 2


def is_row(level: int) -> bool:
    return level != TERMINAL_LEVEL and not level & 1
