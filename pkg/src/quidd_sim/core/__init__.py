"""Decision-diagram core: labels, node manager, terminal ops, DOT export."""

from .dot import to_dot
from .labels import TERMINAL_LEVEL, Col, Kind, Row, VariableLabel
from .manager import DiagramHandle, Manager, NodeStats, OpCounters
from .ops import ABS2, ADD, CONJ, MUL, NEG, SUB, TerminalOp, UnaryOp, binary_op, unary_op

__all__ = [
    "ABS2",
    "ADD",
    "CONJ",
    "Col",
    "DiagramHandle",
    "Kind",
    "MUL",
    "Manager",
    "NEG",
    "NodeStats",
    "OpCounters",
    "Row",
    "SUB",
    "TERMINAL_LEVEL",
    "TerminalOp",
    "UnaryOp",
    "VariableLabel",
    "binary_op",
    "to_dot",
    "unary_op",
]
