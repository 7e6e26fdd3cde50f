"""Exception hierarchy shared by every quidd-sim layer."""

from __future__ import annotations


class QuiddError(Exception):
    """Base class for all quidd-sim errors."""


class ManagerMismatchError(QuiddError, ValueError):
    """Raised when diagrams owned by different managers are combined."""


class OrderingError(QuiddError, ValueError):
    """Raised when a node would violate the interleaved variable order."""


class DimensionError(QuiddError, ValueError):
    """Raised when operand qubit counts do not line up."""


class ZeroProbabilityError(QuiddError, ArithmeticError):
    """Raised when a measurement outcome has probability zero."""


class WidthLimitError(QuiddError, RuntimeError):
    """Raised when a request exceeds a configured qubit-width cap."""


class BudgetExceededError(QuiddError, RuntimeError):
    """Raised when a long run exceeds its wall-clock budget."""


class ConfigError(QuiddError, ValueError):
    """Raised for invalid configuration files or values."""


class PersistenceParseError(QuiddError, ValueError):
    """Raised for malformed complex-set literals."""


class CircuitParseError(QuiddError, ValueError):
    """Raised for malformed circuit text, addressed by line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.reason = message
        self.line = line
        self.column = column
