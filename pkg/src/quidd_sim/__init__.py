"""QuIDD quantum circuit simulator."""

from .core import DiagramHandle, Manager, VariableLabel
from .errors import QuiddError
from .linalg import QuiddMatrix, QuiddVector
from .numerics import ComparisonMode, PrecisionConfig

__version__ = "0.1.0"

__all__ = [
    "ComparisonMode",
    "DiagramHandle",
    "Manager",
    "PrecisionConfig",
    "QuiddError",
    "QuiddMatrix",
    "QuiddVector",
    "VariableLabel",
    "__version__",
]
