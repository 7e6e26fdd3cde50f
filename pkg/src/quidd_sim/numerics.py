"""Complex arithmetic at configurable precision and terminal deduplication.

Two arithmetic backends share one interface:

- `NativeField` uses Python `complex` and is selected for
  `mantissa_bits <= 53`.
- `MpField` uses an `mpmath` context at the configured precision.

`TerminalTable` is the shared array of terminal values owned by one
diagram manager. Values are compared with the dedup predicate

    |u - v| <= eps                      (absolute)
    |u - v| <= eps * max(|u|, |v|)      (relative)

and `eps == 0` means exact comparison. Dedup is not transitive for
`eps > 0`; lookups return the lowest matching index (first match wins
in insertion order).
"""

from __future__ import annotations

import cmath
import functools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Hashable, Iterator

import mpmath

from .errors import ConfigError

logger = logging.getLogger(__name__)

# complex | mpmath.mpc, depending on the field
Scalar = Any

NATIVE_MANTISSA_BITS = 53
MAX_RELATIVE_EPSILON = 1e-3


class ComparisonMode(str, Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"


@dataclass(frozen=True)
class PrecisionConfig:
    """Numeric precision and terminal merge policy."""

    mantissa_bits: int = 128
    merge_epsilon: float = 1e-30
    comparison_mode: ComparisonMode = ComparisonMode.RELATIVE

    def __post_init__(self) -> None:
        if isinstance(self.mantissa_bits, bool) or not isinstance(self.mantissa_bits, int):
            raise ConfigError(f"precision.mantissa_bits must be an integer, got {self.mantissa_bits!r}")
        if self.mantissa_bits < NATIVE_MANTISSA_BITS:
            raise ConfigError(f"precision.mantissa_bits must be >= {NATIVE_MANTISSA_BITS}, got {self.mantissa_bits}")
        if not isinstance(self.merge_epsilon, (int, float)) or isinstance(self.merge_epsilon, bool):
            raise ConfigError(f"precision.merge_epsilon must be a number, got {self.merge_epsilon!r}")
        if not math.isfinite(self.merge_epsilon) or self.merge_epsilon < 0:
            raise ConfigError(f"precision.merge_epsilon must be finite and >= 0, got {self.merge_epsilon}")
        mode = self.comparison_mode
        if not isinstance(mode, ComparisonMode):
            try:
                mode = ComparisonMode(mode)
            except ValueError:
                raise ConfigError(
                    f"precision.comparison_mode must be 'absolute' or 'relative', got {self.comparison_mode!r}"
                ) from None
            object.__setattr__(self, "comparison_mode", mode)
        if mode is ComparisonMode.RELATIVE and self.merge_epsilon > MAX_RELATIVE_EPSILON:
            raise ConfigError(
                f"precision.merge_epsilon must be <= {MAX_RELATIVE_EPSILON} in relative mode, got {self.merge_epsilon}"
            )

    @classmethod
    def double(cls, merge_epsilon: float = 1e-12) -> "PrecisionConfig":
        return cls(mantissa_bits=NATIVE_MANTISSA_BITS, merge_epsilon=merge_epsilon)

    @property
    def native(self) -> bool:
        return self.mantissa_bits <= NATIVE_MANTISSA_BITS

    def describe(self) -> str:
        return (
            f"mantissa_bits={self.mantissa_bits} merge_epsilon={self.merge_epsilon:g} "
            f"comparison_mode={self.comparison_mode.value}"
        )


class ArithmeticField:
    """Arithmetic on terminal values. Subclasses fix the representation."""

    zero: Scalar
    one: Scalar

    def convert(self, value: Any) -> Scalar:
        raise NotImplementedError

    def real(self, value: Any) -> Any:
        raise NotImplementedError

    def components(self, value: Scalar) -> tuple[Any, Any]:
        raise NotImplementedError

    def exact_key(self, value: Scalar) -> Hashable:
        raise NotImplementedError

    def binary_exponent(self, x: Any) -> int:
        """Return e with 2**e <= |x| < 2**(e + 1) for nonzero real x."""
        raise NotImplementedError

    def floor(self, x: Any) -> int:
        raise NotImplementedError

    def ldexp(self, x: Any, k: int) -> Any:
        """x * 2**k as a real of this field."""
        raise NotImplementedError

    def sqrt(self, x: Any) -> Scalar:
        raise NotImplementedError

    def root_of_unity(self, k: int, n: int) -> Scalar:
        raise NotImplementedError

    def to_complex(self, value: Scalar) -> complex:
        return complex(value)

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        return a + b

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        return a - b

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        return a * b

    def neg(self, a: Scalar) -> Scalar:
        return -a

    def conj(self, a: Scalar) -> Scalar:
        return a.conjugate()

    def abs(self, a: Scalar) -> Any:
        return abs(a)

    def abs2(self, a: Scalar) -> Scalar:
        re, im = self.components(a)
        return self.convert(re * re + im * im)

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        return a / b

    def div_real(self, a: Scalar, r: Any) -> Scalar:
        return a / self.real(r)

    def power_of_two(self, k: int) -> Scalar:
        return self.convert(Fraction(2) ** k)

    def is_zero(self, a: Scalar) -> bool:
        return bool(a == 0)


class NativeField(ArithmeticField):
    """Hardware double-precision complex arithmetic."""

    _QUARTER_TURNS = (1 + 0j, 1j, -1 + 0j, -1j)

    def __init__(self) -> None:
        self.zero = 0j
        self.one = 1 + 0j

    def convert(self, value: Any) -> Scalar:
        if isinstance(value, Fraction):
            return complex(float(value))
        return complex(value)

    def real(self, value: Any) -> float:
        if isinstance(value, complex):
            return value.real
        return float(value)

    def components(self, value: Scalar) -> tuple[float, float]:
        return value.real, value.imag

    def exact_key(self, value: Scalar) -> Hashable:
        # -0.0 and 0.0 compare equal and share a hash
        return value

    def binary_exponent(self, x: Any) -> int:
        _, exponent = math.frexp(x)
        return exponent - 1

    def floor(self, x: Any) -> int:
        return math.floor(x)

    def ldexp(self, x: Any, k: int) -> float:
        try:
            return math.ldexp(x, k)
        except OverflowError:
            return math.inf

    def sqrt(self, x: Any) -> Scalar:
        return complex(math.sqrt(self.real(x)))

    def root_of_unity(self, k: int, n: int) -> Scalar:
        turn = Fraction(k, n) % 1
        if (turn * 4).denominator == 1:
            return self._QUARTER_TURNS[int(turn * 4)]
        return cmath.exp(2j * math.pi * float(turn))


class MpField(ArithmeticField):
    """Software floating point through a private mpmath context."""

    def __init__(self, mantissa_bits: int):
        self.ctx = mpmath.MPContext()
        self.ctx.prec = mantissa_bits
        self.zero = self.ctx.mpc(0)
        self.one = self.ctx.mpc(1)

    def convert(self, value: Any) -> Scalar:
        ctx = self.ctx
        if isinstance(value, Fraction):
            return ctx.mpc(ctx.mpf(value.numerator) / value.denominator)
        if isinstance(value, complex):
            return ctx.mpc(value.real, value.imag)
        return ctx.mpc(value)

    def real(self, value: Any) -> Any:
        if isinstance(value, Fraction):
            return self.ctx.mpf(value.numerator) / value.denominator
        if isinstance(value, complex):
            return self.ctx.mpf(value.real)
        if hasattr(value, "imag"):
            return self.ctx.mpf(value.real)
        return self.ctx.mpf(value)

    def components(self, value: Scalar) -> tuple[Any, Any]:
        return value.real, value.imag

    def exact_key(self, value: Scalar) -> Hashable:
        return value.real._mpf_, value.imag._mpf_

    def binary_exponent(self, x: Any) -> int:
        _, exponent = self.ctx.frexp(x)
        return int(exponent) - 1

    def floor(self, x: Any) -> int:
        return int(self.ctx.floor(x))

    def ldexp(self, x: Any, k: int) -> Any:
        return self.ctx.ldexp(self.ctx.mpf(x), k)

    def sqrt(self, x: Any) -> Scalar:
        return self.ctx.mpc(self.ctx.sqrt(self.real(x)))

    def conj(self, a: Scalar) -> Scalar:
        return self.ctx.conj(a)

    def root_of_unity(self, k: int, n: int) -> Scalar:
        turn = Fraction(k, n) % 1
        ctx = self.ctx
        angle = ctx.mpf(2 * turn.numerator) / turn.denominator
        return ctx.mpc(ctx.cospi(angle), ctx.sinpi(angle))

    def to_complex(self, value: Scalar) -> complex:
        return complex(float(value.real), float(value.imag))


@functools.lru_cache(maxsize=None)
def field_for(precision: PrecisionConfig) -> ArithmeticField:
    """Return the shared arithmetic field for a precision config."""
    if precision.native:
        return NativeField()
    return MpField(precision.mantissa_bits)


def dedup_equal(a: Any, b: Any, cfg: PrecisionConfig) -> bool:
    """The terminal merge predicate. Symmetric and reflexive."""
    field = field_for(cfg)
    u, v = field.convert(a), field.convert(b)
    if cfg.merge_epsilon == 0:
        return bool(u == v)
    distance = field.abs(field.sub(u, v))
    eps = field.real(cfg.merge_epsilon)
    if cfg.comparison_mode is ComparisonMode.ABSOLUTE:
        return bool(distance <= eps)
    return bool(distance <= eps * max(field.abs(u), field.abs(v)))


class TerminalTable:
    """Append-only, deduplicated array of terminal values.

    Lookups go through an exact-key dict first, then through a grid of
    cells sized from epsilon. Any two values within epsilon of each
    other land in neighbouring cells, so only a 3x3 block of cells
    (times three binary scales in relative mode) has to be scanned.
    """

    def __init__(self, precision: PrecisionConfig | None = None):
        self.precision = precision or PrecisionConfig()
        self.field = field_for(self.precision)
        self._values: list[Scalar] = []
        self._exact: dict[Hashable, int] = {}
        self._cells: dict[tuple[int, ...], list[int]] = {}
        field = self.field
        eps = self.precision.merge_epsilon
        self._eps = field.real(eps)
        if self.precision.comparison_mode is ComparisonMode.RELATIVE:
            self._cell = field.real(8 * eps)
        else:
            self._cell = field.real(eps)
        self._min_cell = field.real(math.ulp(0.0))

    def __len__(self) -> int:
        return len(self._values)

    def __getitem__(self, index: int) -> Scalar:
        return self._values[index]

    def __iter__(self) -> Iterator[Scalar]:
        return iter(self._values)

    def intern(self, value: Any) -> int:
        """Return the index of `value`, appending it if no stored value matches."""
        v = self.field.convert(value)
        key = self.field.exact_key(v)
        index = self._exact.get(key)
        if index is not None:
            return index
        if self.precision.merge_epsilon > 0:
            index = self._nearest(v)
            if index is not None:
                self._exact[key] = index
                return index
        index = len(self._values)
        self._values.append(v)
        self._exact[key] = index
        if self.precision.merge_epsilon > 0:
            cell = self._home_cell(v)
            if cell is not None:
                self._cells.setdefault(cell, []).append(index)
        return index

    def lookup(self, value: Any) -> int | None:
        v = self.field.convert(value)
        index = self._exact.get(self.field.exact_key(v))
        if index is None and self.precision.merge_epsilon > 0:
            index = self._nearest(v)
        return index

    def _matches(self, u: Scalar, v: Scalar) -> bool:
        field = self.field
        distance = field.abs(field.sub(u, v))
        if self.precision.comparison_mode is ComparisonMode.ABSOLUTE:
            return bool(distance <= self._eps)
        return bool(distance <= self._eps * max(field.abs(u), field.abs(v)))

    def _scale(self, v: Scalar) -> int | None:
        re, im = self.field.components(v)
        magnitude = max(abs(re), abs(im))
        if magnitude == 0:
            return None
        return self.field.binary_exponent(magnitude)

    def _coords(self, v: Scalar, scale: int) -> tuple[int, int] | None:
        field = self.field
        re, im = field.components(v)
        size = self._cell
        if self.precision.comparison_mode is ComparisonMode.RELATIVE:
            size = field.ldexp(size, scale)
        if not size > 0:
            # 2**scale underflowed the double range
            size = self._min_cell
        try:
            return field.floor(re / size), field.floor(im / size)
        except OverflowError:
            return None

    def _home_cell(self, v: Scalar) -> tuple[int, ...] | None:
        if self.precision.comparison_mode is ComparisonMode.ABSOLUTE:
            return self._coords(v, 0)
        scale = self._scale(v)
        if scale is None:
            return None
        coords = self._coords(v, scale)
        return None if coords is None else (scale, *coords)

    def _candidate_cells(self, v: Scalar) -> Iterator[tuple[int, ...]]:
        if self.precision.comparison_mode is ComparisonMode.ABSOLUTE:
            scales: tuple[int | None, ...] = (None,)
        else:
            scale = self._scale(v)
            if scale is None:
                return
            scales = (scale - 1, scale, scale + 1)
        for s in scales:
            coords = self._coords(v, 0 if s is None else s)
            if coords is None:
                continue
            x, y = coords
            prefix = () if s is None else (s,)
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    yield (*prefix, x + dx, y + dy)

    def _nearest(self, v: Scalar) -> int | None:
        best: int | None = None
        for cell in self._candidate_cells(v):
            for index in self._cells.get(cell, ()):
                if (best is None or index < best) and self._matches(self._values[index], v):
                    best = index
        return best


def intern(table: TerminalTable, value: Any) -> int:
    """Intern `value` into `table` and return its stable index."""
    return table.intern(value)


def format_complex(value: complex, digits: int = 6) -> str:
    """Stable text form: `re`, `re+imi` or `imi`, `digits` significant digits."""
    re = 0.0 if abs(value.real) < 10.0 ** (-2 * digits) else value.real
    im = 0.0 if abs(value.imag) < 10.0 ** (-2 * digits) else value.imag
    if im == 0:
        return f"{re:.{digits}g}"
    if re == 0:
        return f"{im:.{digits}g}i"
    return f"{re:.{digits}g}{im:+.{digits}g}i"
