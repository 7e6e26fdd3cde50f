"""Line-oriented circuit file parser.

See docs/circuit-format.md for the grammar. Errors carry 1-based line
and column numbers of the offending token.
"""

from __future__ import annotations

import re

from ..errors import CircuitParseError, PersistenceParseError
from ..persistence import ExactValue, parse_value
from .ir import MAX_CUSTOM_QUBITS, Circuit, Gate, GateKind

_WORD = re.compile(r"\S+")

_SINGLE = {
    "h": GateKind.HADAMARD,
    "x": GateKind.PAULI_X,
    "y": GateKind.PAULI_Y,
    "z": GateKind.PAULI_Z,
    "id": GateKind.IDENTITY,
}

Token = tuple[str, int]


class _Line:
    def __init__(self, number: int, text: str):
        self.number = number
        self.text = text
        self.tokens: list[Token] = [(m.group(), m.start() + 1) for m in _WORD.finditer(text)]

    def fail(self, message: str, column: int | None = None) -> CircuitParseError:
        return CircuitParseError(message, self.number, column if column is not None else 1)

    def end_column(self) -> int:
        return len(self.text.rstrip()) + 1


def parse_circuit(text: str) -> Circuit:
    width: int | None = None
    initial: str | None = None
    gates: list[Gate] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _Line(number, raw.split("#", 1)[0])
        if not line.tokens:
            continue
        keyword, column = line.tokens[0]
        keyword = keyword.lower()
        args = line.tokens[1:]
        if keyword == "qubits":
            if width is not None:
                raise line.fail("duplicate 'qubits' statement", column)
            if gates or initial is not None:
                raise line.fail("'qubits' must come first", column)
            width = _count(line, args, "qubits")
            continue
        if width is None:
            raise line.fail(f"expected 'qubits <n>' before '{keyword}'", column)
        if keyword == "init":
            if initial is not None:
                raise line.fail("duplicate 'init' statement", column)
            if gates:
                raise line.fail("'init' must come before gates", column)
            initial = _bits(line, args, width)
            continue
        gates.append(_gate(line, keyword, column, args, width))
    if width is None:
        raise CircuitParseError("missing 'qubits <n>' statement", max(1, len(text.splitlines())), 1)
    return Circuit(width, initial or "0" * width, tuple(gates))


def _count(line: _Line, args: list[Token], what: str) -> int:
    if len(args) != 1:
        raise line.fail(f"'{what}' takes exactly one argument", args[1][1] if len(args) > 1 else line.end_column())
    text, column = args[0]
    if not text.isdigit() or int(text) < 1:
        raise line.fail(f"expected a positive integer, got '{text}'", column)
    return int(text)


def _bits(line: _Line, args: list[Token], width: int) -> str:
    if len(args) != 1:
        raise line.fail("'init' takes one bit string", args[1][1] if len(args) > 1 else line.end_column())
    text, column = args[0]
    if any(ch not in "01" for ch in text):
        raise line.fail(f"initial state must be a 0/1 string, got '{text}'", column)
    if len(text) != width:
        raise line.fail(f"initial state has {len(text)} bits, circuit has {width} qubits", column)
    return text


def _qubits(line: _Line, args: list[Token], width: int) -> list[int]:
    seen: set[int] = set()
    result: list[int] = []
    for text, column in args:
        if not text.isdigit():
            raise line.fail(f"expected a qubit index, got '{text}'", column)
        q = int(text)
        if q >= width:
            raise line.fail(f"qubit index {q} out of range for {width} qubits", column)
        if q in seen:
            raise line.fail(f"duplicate qubit {q} in one gate", column)
        seen.add(q)
        result.append(q)
    return result


def _arity(line: _Line, keyword: str, args: list[Token], low: int, high: int | None) -> None:
    if len(args) < low:
        raise line.fail(f"'{keyword}' needs at least {low} qubit(s)", line.end_column())
    if high is not None and len(args) > high:
        raise line.fail(f"'{keyword}' takes at most {high} qubit(s)", args[high][1])


def _gate(line: _Line, keyword: str, column: int, args: list[Token], width: int) -> Gate:
    if keyword in _SINGLE:
        _arity(line, keyword, args, 1, 1)
        (q,) = _qubits(line, args, width)
        return Gate.single(_SINGLE[keyword], q)
    if keyword == "cnot":
        _arity(line, keyword, args, 2, 2)
        c, t = _qubits(line, args, width)
        return Gate.cnot(c, t)
    if keyword == "ccnot":
        _arity(line, keyword, args, 3, 3)
        c1, c2, t = _qubits(line, args, width)
        return Gate.mcnot([c1, c2], t)
    if keyword == "mcnot":
        _arity(line, keyword, args, 2, None)
        *controls, t = _qubits(line, args, width)
        return Gate.mcnot(controls, t)
    if keyword == "cps":
        targets = _qubits(line, args, width) if args else list(range(width))
        return Gate.cps(targets)
    if keyword == "oracle":
        return _oracle(line, args, width)
    if keyword == "custom":
        return _custom(line, args, width)
    raise line.fail(f"unknown gate '{keyword}'", column)


def _oracle(line: _Line, args: list[Token], width: int) -> Gate:
    if len(args) != 1:
        raise line.fail("'oracle' takes one pattern", args[1][1] if len(args) > 1 else line.end_column())
    text, column = args[0]
    for offset, symbol in enumerate(text):
        if symbol not in "01d":
            raise line.fail(f"oracle pattern symbols are 0, 1 and d, got '{symbol}'", column + offset)
    if len(text) != width - 1:
        raise line.fail(f"oracle pattern must cover the {width - 1} data qubit(s), got {len(text)}", column)
    return Gate.oracle(text)


def _custom(line: _Line, args: list[Token], width: int) -> Gate:
    split = next((i for i, (text, _) in enumerate(args) if text == ":"), None)
    if split is None:
        raise line.fail("custom gate needs ':' between qubits and matrix", line.end_column())
    targets = _qubits(line, args[:split], width)
    if not 1 <= len(targets) <= MAX_CUSTOM_QUBITS:
        raise line.fail(f"custom gates act on 1 to {MAX_CUSTOM_QUBITS} qubits", args[0][1] if args else 1)
    size = 1 << len(targets)
    rows: list[list[ExactValue]] = [[]]
    for text, column in args[split + 1 :]:
        for offset, piece in _split_rows(text):
            if piece == ";":
                rows.append([])
                continue
            try:
                rows[-1].append(parse_value(piece))
            except PersistenceParseError as exc:
                raise line.fail(f"bad matrix entry '{piece}': {exc}", column + offset) from None
    if rows and not rows[-1]:
        rows.pop()
    if len(rows) != size or any(len(row) != size for row in rows):
        raise line.fail(f"custom gate on {len(targets)} qubit(s) needs a {size}x{size} matrix", args[split][1])
    return Gate.custom(targets, rows)


def _split_rows(text: str) -> list[tuple[int, str]]:
    """Split a token on ';' keeping separators and their offsets."""
    pieces: list[tuple[int, str]] = []
    start = 0
    for i, ch in enumerate(text):
        if ch == ";":
            if i > start:
                pieces.append((start, text[start:i]))
            pieces.append((i, ";"))
            start = i + 1
    if start < len(text):
        pieces.append((start, text[start:]))
    return pieces
