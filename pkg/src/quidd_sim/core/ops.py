"""Terminal operations for Apply.

Every built-in operation carries a stable integer tag; the manager keys
its memo tables on that tag. Operations created with `binary_op` or
`unary_op` and no tag are evaluated with a per-call cache only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..numerics import ArithmeticField, Scalar

BinaryFn = Callable[[ArithmeticField, Scalar, Scalar], Scalar]
UnaryFn = Callable[[ArithmeticField, Scalar], Scalar]


@dataclass(frozen=True)
class TerminalOp:
    name: str
    fn: BinaryFn = field(compare=False)
    tag: int | None = None
    commutative: bool = False


@dataclass(frozen=True)
class UnaryOp:
    name: str
    fn: UnaryFn = field(compare=False)
    tag: int | None = None


ADD = TerminalOp("add", lambda f, a, b: f.add(a, b), tag=1, commutative=True)
MUL = TerminalOp("mul", lambda f, a, b: f.mul(a, b), tag=2, commutative=True)
SUB = TerminalOp("sub", lambda f, a, b: f.sub(a, b), tag=3)

CONJ = UnaryOp("conj", lambda f, a: f.conj(a), tag=101)
ABS2 = UnaryOp("abs2", lambda f, a: f.abs2(a), tag=102)
NEG = UnaryOp("neg", lambda f, a: f.neg(a), tag=103)


def binary_op(fn: BinaryFn, name: str = "custom", tag: int | None = None) -> TerminalOp:
    """Wrap a user function. Untagged ops are not memoized across calls."""
    if tag is not None and tag < 1000:
        raise ValueError("custom op tags must be >= 1000; lower tags are reserved")
    return TerminalOp(name, fn, tag=tag)


def unary_op(fn: UnaryFn, name: str = "custom", tag: int | None = None) -> UnaryOp:
    if tag is not None and tag < 1000:
        raise ValueError("custom op tags must be >= 1000; lower tags are reserved")
    return UnaryOp(name, fn, tag=tag)
