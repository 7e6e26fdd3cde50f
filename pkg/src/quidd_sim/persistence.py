"""Persistent sets of complex numbers.

A finite set G is persistent when the set of all n-element products
G^n has the same size for every n > 0. Such sets are exactly c*U_n and
{0} u c*U_n, where U_n are the n-th roots of unity. `classify` decides
persistence from that characterization; `oracle_persistent` checks the
definition directly for the first few n.

Exact elements are Gaussian rationals times a root of unity, kept in a
canonical form (g, t) with value g * exp(2*pi*i*t) and t in [0, 1/4).
Quarter turns are folded into g, which makes the form unique: the ratio
of two representations would be a root of unity inside Q(i) other than
+-1 and +-i.

Sets holding any plain `complex` value, including decimal literals read
by `parse_set`, are classified in floating point with tolerance 1e-12.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Union

from .errors import PersistenceParseError
from .numerics import format_complex

FLOAT_TOLERANCE = 1e-12

# 1, i, -1, -i
_UNITS = (
    (Fraction(1), Fraction(0)),
    (Fraction(0), Fraction(1)),
    (Fraction(-1), Fraction(0)),
    (Fraction(0), Fraction(-1)),
)


@dataclass(frozen=True)
class ExactValue:
    """(re + im*i) * exp(2*pi*i*turn), normalized on construction."""

    re: Fraction
    im: Fraction = Fraction(0)
    turn: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        re_, im_ = Fraction(self.re), Fraction(self.im)
        turn = Fraction(self.turn) % 1
        if re_ == 0 and im_ == 0:
            turn = Fraction(0)
        quarters = math.floor(turn * 4)
        turn -= Fraction(quarters, 4)
        for _ in range(quarters):
            re_, im_ = -im_, re_
        object.__setattr__(self, "re", re_)
        object.__setattr__(self, "im", im_)
        object.__setattr__(self, "turn", turn)

    @classmethod
    def root_of_unity(cls, k: int, n: int) -> "ExactValue":
        return cls(Fraction(1), Fraction(0), Fraction(k, n))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __mul__(self, other: "ExactValue") -> "ExactValue":
        return ExactValue(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
            self.turn + other.turn,
        )

    def __truediv__(self, other: "ExactValue") -> "ExactValue":
        norm = other.abs2()
        if norm == 0:
            raise ZeroDivisionError("division by exact zero")
        return ExactValue(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
            self.turn - other.turn,
        )

    def unit_order(self) -> int | None:
        """Order n if this value is a primitive n-th root of unity, else None."""
        try:
            quarter = _UNITS.index((self.re, self.im))
        except ValueError:
            return None
        total = (self.turn + Fraction(quarter, 4)) % 1
        return total.denominator

    def to_complex(self) -> complex:
        base = complex(float(self.re), float(self.im))
        if self.turn == 0:
            return base
        return base * cmath.exp(2j * math.pi * float(self.turn))

    def __str__(self) -> str:
        gauss = _format_gaussian(self.re, self.im)
        if self.turn == 0:
            return gauss
        zeta = f"zeta({self.turn.numerator}/{self.turn.denominator})"
        if (self.re, self.im) == (1, 0):
            return zeta
        if self.re != 0 and self.im != 0:
            gauss = f"({gauss})"
        return f"{gauss}*{zeta}"


def _format_gaussian(re_: Fraction, im_: Fraction) -> str:
    if im_ == 0:
        return str(re_)
    if abs(im_) == 1:
        imag = "i"
    else:
        imag = f"{abs(im_)}i"
    if re_ == 0:
        return imag if im_ > 0 else f"-{imag}"
    sign = "+" if im_ > 0 else "-"
    return f"{re_}{sign}{imag}"


Element = Union[ExactValue, complex]


def _close(a: complex, b: complex) -> bool:
    return abs(a - b) <= FLOAT_TOLERANCE * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class FiniteComplexSet:
    """Non-empty set of values in first-occurrence order.

    Exact sets compare elements exactly; a set holding any `complex`
    element is converted to floating point and deduplicated with
    tolerance.
    """

    elements: tuple[Element, ...]

    def __post_init__(self) -> None:
        values = list(self.elements)
        if not values:
            raise ValueError("a finite complex set must be non-empty")
        if all(isinstance(v, ExactValue) for v in values):
            unique: list[Element] = list(dict.fromkeys(values))
        else:
            unique = []
            for v in values:
                c = v.to_complex() if isinstance(v, ExactValue) else complex(v)
                if not any(_close(c, u) for u in unique):
                    unique.append(c)
        object.__setattr__(self, "elements", tuple(unique))

    @classmethod
    def of(cls, values: Iterable[Element | int | float]) -> "FiniteComplexSet":
        converted: list[Element] = []
        for v in values:
            if isinstance(v, (ExactValue, complex)):
                converted.append(v)
            elif isinstance(v, (int, Fraction)):
                converted.append(ExactValue(Fraction(v)))
            else:
                converted.append(complex(v))
        return cls(tuple(converted))

    @property
    def exact(self) -> bool:
        return all(isinstance(v, ExactValue) for v in self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __str__(self) -> str:
        return "{" + ", ".join(str(v) for v in self.elements) + "}"


@dataclass(frozen=True)
class PersistenceResult:
    persistent: bool
    includes_zero: bool
    scale_c: Element | None = None
    degree_n: int | None = None
    reason: str = field(default="", compare=False)

    def describe(self) -> str:
        if not self.persistent:
            return f"not persistent: {self.reason}"
        if self.scale_c is None:
            return "persistent: {0}"
        c = format_complex(self.scale_c, 12) if isinstance(self.scale_c, complex) else str(self.scale_c)
        text = f"persistent: c={c}, n={self.degree_n}"
        if self.includes_zero:
            text += ", with 0"
        return text


def all_pairs_product(a: FiniteComplexSet, b: FiniteComplexSet) -> FiniteComplexSet:
    products: list[Element] = []
    if a.exact and b.exact:
        for x in a:
            for y in b:
                products.append(x * y)  # type: ignore[operator]
    else:
        for x in a:
            for y in b:
                products.append(_as_complex(x) * _as_complex(y))
    return FiniteComplexSet(tuple(products))


def n_element_products(g: FiniteComplexSet, n: int) -> FiniteComplexSet:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    result = g
    for _ in range(n - 1):
        result = all_pairs_product(result, g)
    return result


def oracle_persistent(g: FiniteComplexSet, k_max: int = 6) -> bool:
    """True when |G^k| == |G| for k = 1..k_max."""
    size = len(g)
    power = g
    for _ in range(2, k_max + 1):
        power = all_pairs_product(power, g)
        if len(power) != size:
            return False
    return True


def _as_complex(v: Element) -> complex:
    return v.to_complex() if isinstance(v, ExactValue) else v


def classify(g: FiniteComplexSet) -> PersistenceResult:
    if g.exact:
        return _classify_exact([v for v in g if isinstance(v, ExactValue)])
    return _classify_float([_as_complex(v) for v in g])


def _classify_exact(values: list[ExactValue]) -> PersistenceResult:
    nonzero = [v for v in values if not v.is_zero()]
    includes_zero = len(nonzero) < len(values)
    if not nonzero:
        return PersistenceResult(True, True)
    magnitude = nonzero[0].abs2()
    if any(v.abs2() != magnitude for v in nonzero):
        return PersistenceResult(False, includes_zero, reason="nonzero magnitudes differ")
    z = nonzero[0]
    n = len(nonzero)
    for v in nonzero:
        order = (v / z).unit_order()
        if order is None or n % order:
            return PersistenceResult(False, includes_zero, reason=f"not a scaled set of {n}-th roots of unity")
    return PersistenceResult(True, includes_zero, scale_c=z, degree_n=n)


def _classify_float(values: list[complex]) -> PersistenceResult:
    nonzero = [v for v in values if abs(v) > FLOAT_TOLERANCE]
    includes_zero = len(nonzero) < len(values)
    if not nonzero:
        return PersistenceResult(True, True)
    magnitude = abs(nonzero[0])
    if any(abs(abs(v) - magnitude) > FLOAT_TOLERANCE * magnitude for v in nonzero):
        return PersistenceResult(False, includes_zero, reason="nonzero magnitudes differ")
    z = nonzero[0]
    n = len(nonzero)
    for v in nonzero:
        if abs((v / z) ** n - 1) > FLOAT_TOLERANCE * n:
            return PersistenceResult(False, includes_zero, reason=f"not a scaled set of {n}-th roots of unity")
    return PersistenceResult(True, includes_zero, scale_c=z, degree_n=n)


# -- literal parsing --

_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+/\d+|\d+(?:\.\d*)?|\.\d+)|(?P<zeta>zeta\(\s*(?P<k>-?\d+)\s*/\s*(?P<n>\d+)\s*\))"
    r"|(?P<op>[-+*()i]))"
)


def parse_value(text: str) -> ExactValue:
    """Parse one literal such as `1/2`, `-i`, `3+4i`, `zeta(1/8)` or `(1+i)*zeta(1/3)`.

    Decimals are read as the rationals they spell.
    """
    value, _ = _parse(text)
    return value


def parse_element(text: str) -> Element:
    """Like `parse_value`, but a literal with a decimal point becomes a `complex`."""
    value, inexact = _parse(text)
    return value.to_complex() if inexact else value


def _parse(text: str) -> tuple[ExactValue, bool]:
    tokens = _tokenize(text)
    parser = _ValueParser(text, tokens)
    value = parser.product()
    if parser.pos != len(tokens):
        parser.fail("unexpected trailing input")
    return value, parser.inexact


def parse_set(line: str) -> FiniteComplexSet:
    """Parse a comma-separated list of literals; any decimal makes the set inexact."""
    parts = line.split(",")
    if not line.strip():
        raise PersistenceParseError("empty set literal")
    values: list[Element] = []
    offset = 0
    for part in parts:
        if not part.strip():
            raise PersistenceParseError(f"empty element at column {offset + 1}")
        try:
            values.append(parse_element(part))
        except PersistenceParseError as exc:
            raise PersistenceParseError(f"{exc} (element at column {offset + 1})") from None
        offset += len(part) + 1
    return FiniteComplexSet(tuple(values))


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            raise PersistenceParseError(f"unexpected character {text[pos:].strip()[:1]!r} at column {pos + 1}")
        if match.group("number") is not None:
            tokens.append(("number", match.group("number"), match.start("number")))
        elif match.group("zeta") is not None:
            if int(match.group("n")) == 0:
                raise PersistenceParseError(f"zeta denominator must be positive at column {match.start('zeta') + 1}")
            tokens.append(("zeta", f"{match.group('k')}/{match.group('n')}", match.start("zeta")))
        else:
            tokens.append(("op", match.group("op"), match.start("op")))
        pos = match.end()
    if not tokens:
        raise PersistenceParseError("empty literal")
    return tokens


class _ValueParser:
    """product := factor ('*' factor)*; factor := zeta | '(' sum ')' | sum."""

    def __init__(self, text: str, tokens: list[tuple[str, str, int]]):
        self.text = text
        self.tokens = tokens
        self.pos = 0
        self.inexact = False

    def fail(self, message: str) -> None:
        column = self.tokens[self.pos][2] + 1 if self.pos < len(self.tokens) else len(self.text.rstrip()) + 1
        raise PersistenceParseError(f"{message} at column {column}")

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def accept(self, op: str) -> bool:
        token = self.peek()
        if token is not None and token[0] == "op" and token[1] == op:
            self.pos += 1
            return True
        return False

    def product(self) -> ExactValue:
        value = self.factor()
        while self.accept("*"):
            value = value * self.factor()
        return value

    def factor(self) -> ExactValue:
        token = self.peek()
        if token is None:
            self.fail("expected a value")
            raise AssertionError
        if token[0] == "zeta":
            self.pos += 1
            return ExactValue(Fraction(1), Fraction(0), Fraction(token[1]))
        if self.accept("("):
            value = self.sum()
            if not self.accept(")"):
                self.fail("expected ')'")
            return value
        return self.sum()

    def sum(self) -> ExactValue:
        re_, im_ = Fraction(0), Fraction(0)
        first = True
        while True:
            sign = 1
            if self.accept("-"):
                sign = -1
            elif not self.accept("+") and not first:
                break
            token = self.peek()
            coefficient = Fraction(1)
            has_number = False
            if token is not None and token[0] == "number":
                try:
                    coefficient = Fraction(token[1])
                except ZeroDivisionError:
                    self.fail("zero denominator")
                self.inexact = self.inexact or "." in token[1]
                has_number = True
                self.pos += 1
            if self.accept("i"):
                im_ += sign * coefficient
            elif has_number:
                re_ += sign * coefficient
            else:
                self.fail("expected a number or 'i'")
            first = False
            nxt = self.peek()
            if nxt is None or nxt[0] != "op" or nxt[1] not in "+-":
                break
        return ExactValue(re_, im_)
