"""QuIDD operators for gates.

Controlled gates are built bottom-up, one qubit at a time, directly as
diagram nodes. Below the target the builder keeps a projector P onto
the assignments satisfying the lower controls and its complement Q; at
the target it forms U (x) P + I (x) Q; above the target it keeps the
action A together with the identity and branches on each control:

    control (polarity p):  |p><p| (x) A + |1-p><1-p| (x) I
    free qubit:            I (x) A
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from ..core.labels import col_level, row_level
from ..core.manager import Manager, Node
from ..core.ops import ADD, MUL
from ..linalg import QuiddMatrix, QuiddVector, diagonal_matrix, identity_nodes, tensor_all
from ..numerics import ArithmeticField, Scalar
from ..persistence import ExactValue
from .ir import Gate, GateKind

Matrix2 = tuple[tuple[Scalar, Scalar], tuple[Scalar, Scalar]]


def inverse_sqrt2(field: ArithmeticField) -> Scalar:
    return field.sqrt(field.real(Fraction(1, 2)))


def exact_to_field(field: ArithmeticField, value: ExactValue) -> Scalar:
    gauss = field.add(field.convert(value.re), field.mul(field.convert(value.im), field.root_of_unity(1, 4)))
    if value.turn == 0:
        return gauss
    return field.mul(gauss, field.root_of_unity(value.turn.numerator, value.turn.denominator))


def single_qubit_matrix(field: ArithmeticField, kind: GateKind) -> Matrix2:
    zero, one = field.zero, field.one
    if kind is GateKind.HADAMARD:
        c = inverse_sqrt2(field)
        return (c, c), (c, field.neg(c))
    if kind in (GateKind.PAULI_X, GateKind.CNOT, GateKind.MULTI_CONTROLLED_NOT, GateKind.ORACLE_FLIP):
        return (zero, one), (one, zero)
    if kind is GateKind.PAULI_Y:
        i = field.root_of_unity(1, 4)
        return (zero, field.neg(i)), (i, zero)
    if kind is GateKind.PAULI_Z:
        return (one, zero), (zero, field.neg(one))
    if kind is GateKind.IDENTITY:
        return (one, zero), (zero, one)
    raise ValueError(f"{kind.value} is not a single-qubit gate")


def block_node(manager: Manager, qubit: int, entries: tuple[tuple[Node, Node], tuple[Node, Node]]) -> Node:
    """Node for the 2x2 block [[e00, e01], [e10, e11]] on `qubit`."""
    (e00, e01), (e10, e11) = entries
    then = manager.find_or_add(col_level(qubit), e11, e10)
    else_ = manager.find_or_add(col_level(qubit), e01, e00)
    return manager.find_or_add(row_level(qubit), then, else_)


def single_qubit_factor(manager: Manager, u: Matrix2) -> QuiddMatrix:
    """The 1-qubit operator u as a diagram over Row(0)/Col(0)."""
    entries = tuple(tuple(manager.terminal_node(x) for x in row) for row in u)
    return QuiddMatrix(manager.wrap(block_node(manager, 0, entries)), 1)  # type: ignore[arg-type]


def controlled_operator(
    manager: Manager,
    width: int,
    target: int,
    u: Matrix2,
    controls: dict[int, int] | None = None,
) -> QuiddMatrix:
    """U on `target`, applied when every control qubit q holds controls[q]."""
    controls = controls or {}
    zero_node, one_node = manager.zero_node, manager.one_node
    identity = one_node
    satisfied, unsatisfied = one_node, zero_node
    for q in reversed(range(target + 1, width)):
        polarity = controls.get(q)
        if polarity is None:
            satisfied = block_node(manager, q, ((satisfied, zero_node), (zero_node, satisfied)))
            unsatisfied = block_node(manager, q, ((unsatisfied, zero_node), (zero_node, unsatisfied)))
        else:
            p00, p11 = (zero_node, satisfied) if polarity else (satisfied, zero_node)
            satisfied = block_node(manager, q, ((p00, zero_node), (zero_node, p11)))
            q00, q11 = (identity, unsatisfied) if polarity else (unsatisfied, identity)
            unsatisfied = block_node(manager, q, ((q00, zero_node), (zero_node, q11)))
        identity = identity_nodes(manager, q, q + 1, identity)

    def entry(r: int, c: int) -> Node:
        scaled = manager.apply_nodes(MUL, manager.terminal_node(u[r][c]), satisfied)
        if r == c:
            return manager.apply_nodes(ADD, scaled, unsatisfied)
        return scaled

    action = block_node(manager, target, ((entry(0, 0), entry(0, 1)), (entry(1, 0), entry(1, 1))))
    identity = identity_nodes(manager, target, target + 1, identity)
    for q in reversed(range(target)):
        polarity = controls.get(q)
        if polarity is None:
            action = block_node(manager, q, ((action, zero_node), (zero_node, action)))
        elif polarity:
            action = block_node(manager, q, ((identity, zero_node), (zero_node, action)))
        else:
            action = block_node(manager, q, ((action, zero_node), (zero_node, identity)))
        identity = identity_nodes(manager, q, q + 1, identity)
    return QuiddMatrix(manager.wrap(action), width)


def custom_operator(manager: Manager, gate: Gate, width: int) -> QuiddMatrix:
    """Dense literal on up to three qubits, identity elsewhere."""
    assert gate.matrix is not None
    field = manager.field
    positions = {q: i for i, q in enumerate(gate.targets)}
    k = len(gate.targets)
    values = [[manager.terminal_node(exact_to_field(field, v)) for v in row] for row in gate.matrix]
    zero_node = manager.zero_node
    cache: dict[tuple[int, int, int], Node] = {}

    def rec(q: int, r_acc: int, c_acc: int) -> Node:
        if q == width:
            return values[r_acc][c_acc]
        key = (q, r_acc, c_acc)
        hit = cache.get(key)
        if hit is not None:
            return hit
        pos = positions.get(q)
        if pos is None:
            below = rec(q + 1, r_acc, c_acc)
            node = block_node(manager, q, ((below, zero_node), (zero_node, below)))
        else:
            bit = 1 << (k - 1 - pos)
            node = block_node(
                manager,
                q,
                (
                    (rec(q + 1, r_acc, c_acc), rec(q + 1, r_acc, c_acc | bit)),
                    (rec(q + 1, r_acc | bit, c_acc), rec(q + 1, r_acc | bit, c_acc | bit)),
                ),
            )
        cache[key] = node
        return node

    return QuiddMatrix(manager.wrap(rec(0, 0, 0)), width)


def gate_diagonal(manager: Manager, gate: Gate, width: int) -> QuiddVector:
    """Diagonal of a diagonal gate as a vector over Col variables."""
    one_node = manager.one_node
    if gate.kind is GateKind.IDENTITY:
        return QuiddVector(manager.wrap(one_node), width)
    minus_one = manager.terminal_node(manager.field.neg(manager.field.one))
    if gate.kind is GateKind.PAULI_Z:
        (q,) = gate.targets
        return QuiddVector(manager.wrap(manager.find_or_add(col_level(q), minus_one, one_node)), width)
    if gate.kind is GateKind.CONDITIONAL_PHASE_SHIFT:
        node = minus_one
        for q in sorted(gate.targets, reverse=True):
            node = manager.find_or_add(col_level(q), one_node, node)
        return QuiddVector(manager.wrap(node), width)
    raise ValueError(f"{gate.kind.value} is not diagonal")


def gate_operator(manager: Manager, gate: Gate, width: int) -> QuiddMatrix:
    """Full 2^width x 2^width operator of `gate`."""
    if gate.is_diagonal:
        return diagonal_matrix(gate_diagonal(manager, gate, width))
    if gate.kind is GateKind.CUSTOM:
        return custom_operator(manager, gate, width)
    (target,) = gate.targets
    u = single_qubit_matrix(manager.field, gate.kind)
    controls = {c.qubit: c.polarity for c in gate.controls}
    return controlled_operator(manager, width, target, u, controls)


def hadamard_wall(manager: Manager, width: int, qubits: range | list[int] | None = None) -> QuiddMatrix:
    """H on `qubits` (default all), identity elsewhere, built as a tensor product of 1-qubit factors."""
    chosen = set(range(width) if qubits is None else qubits)
    field = manager.field
    h = single_qubit_factor(manager, single_qubit_matrix(field, GateKind.HADAMARD))
    i = single_qubit_factor(manager, single_qubit_matrix(field, GateKind.IDENTITY))
    result = tensor_all([h if q in chosen else i for q in range(width)])
    assert isinstance(result, QuiddMatrix)
    return result


def decompose_conditional_phase_shift(targets: list[int] | tuple[int, ...]) -> list[Gate]:
    """X on all, H on last, C^(k-1)NOT onto last, H on last, X on all."""
    targets = list(targets)
    if not targets:
        raise ValueError("conditional phase shift needs at least one qubit")
    *rest, last = targets
    flips = [Gate.single(GateKind.PAULI_X, q) for q in targets]
    if rest:
        middle = Gate.mcnot(rest, last)
    else:
        middle = Gate.single(GateKind.PAULI_X, last)
    h = Gate.single(GateKind.HADAMARD, last)
    return [*flips, h, middle, h, *flips]


def operator_cache(manager: Manager, width: int) -> Callable[[Gate], QuiddMatrix]:
    """Memoized gate_operator for one width."""
    built: dict[Gate, QuiddMatrix] = {}

    def get(gate: Gate) -> QuiddMatrix:
        op = built.get(gate)
        if op is None:
            op = built[gate] = gate_operator(manager, gate, width)
        return op

    return get