"""Linear algebra on QuIDDs.

A `QuiddMatrix` on n qubits is a diagram over Row(0..n-1) and
Col(0..n-1); a `QuiddVector` depends on Col variables only. Qubit 0 is
the most significant bit of a row, column or state index.

Matrix products use the ADD product recursion over a combined order in
which the contracted index of both operands shares one level per qubit:

    A.Row(i) -> 3i      A.Col(i) -> 3i + 1
    B.Row(i) -> 3i + 1  B.Col(i) -> 3i + 2     (matrix B)
    B.Col(i) -> 3i + 1                         (vector B)

Levels congruent to 1 mod 3 are summed out. Every summed level that is
absent between a parent and its child contributes a factor of 2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Iterator, Sequence, Union

import numpy as np

from .core.labels import TERMINAL_LEVEL, col_level, row_level
from .core.manager import DiagramHandle, Manager, Node
from .core.ops import ABS2, ADD, CONJ, MUL
from .errors import DimensionError, ManagerMismatchError, ZeroProbabilityError
from .numerics import Scalar, TerminalTable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuiddMatrix:
    handle: DiagramHandle
    qubits: int

    @property
    def manager(self) -> Manager:
        return self.handle.manager

    @property
    def root(self) -> Node:
        return self.handle.root


@dataclass(frozen=True)
class QuiddVector:
    handle: DiagramHandle
    qubits: int

    @property
    def manager(self) -> Manager:
        return self.handle.manager

    @property
    def root(self) -> Node:
        return self.handle.root

    def row_free(self) -> bool:
        """True when the support holds no Row variable."""
        return all(level & 1 for level in _internal_levels(self.manager, self.root))


Operand = Union[QuiddMatrix, QuiddVector]


@dataclass(frozen=True)
class MeasurementOutcome:
    post_state: QuiddVector
    probability: Any


def _internal_levels(manager: Manager, root: Node) -> Iterator[int]:
    for node in manager.node_reachable(root):
        level = manager.level_of(node)
        if level != TERMINAL_LEVEL:
            yield level


def _like(x: Operand, root: Node, qubits: int | None = None) -> Operand:
    kind = type(x)
    return kind(x.manager.wrap(root), x.qubits if qubits is None else qubits)


def _common_manager(*operands: Operand | DiagramHandle) -> Manager:
    managers = {id(op.manager): op.manager for op in operands}
    if len(managers) != 1:
        raise ManagerMismatchError("operands belong to different managers")
    return next(iter(managers.values()))


def _check_same_shape(a: Operand, b: Operand) -> Manager:
    manager = _common_manager(a, b)
    if type(a) is not type(b):
        raise DimensionError(f"cannot combine {type(a).__name__} with {type(b).__name__}")
    if a.qubits != b.qubits:
        raise DimensionError(f"qubit counts differ: {a.qubits} != {b.qubits}")
    return manager


# -- builders --


def zero(manager: Manager, qubits: int, vector: bool = False) -> Operand:
    return constant(manager, 0, qubits, vector)


def constant(manager: Manager, value: Any, qubits: int, vector: bool = False) -> Operand:
    handle = manager.make_terminal(value)
    return QuiddVector(handle, qubits) if vector else QuiddMatrix(handle, qubits)


def basis_state(manager: Manager, bits: str | Sequence[int]) -> QuiddVector:
    """Computational basis state; bits[0] is qubit 0."""
    values = [int(b) for b in bits]
    node = manager.one_node
    for i in reversed(range(len(values))):
        if values[i] not in (0, 1):
            raise ValueError(f"basis bits must be 0 or 1, got {values[i]!r}")
        if values[i]:
            node = manager.find_or_add(col_level(i), node, manager.zero_node)
        else:
            node = manager.find_or_add(col_level(i), manager.zero_node, node)
    return QuiddVector(manager.wrap(node), len(values))


def identity(manager: Manager, qubits: int) -> QuiddMatrix:
    return QuiddMatrix(manager.wrap(identity_nodes(manager, 0, qubits, manager.one_node)), qubits)


def identity_nodes(manager: Manager, first: int, stop: int, below: Node) -> Node:
    """Identity on qubits first..stop-1 stacked above `below`."""
    node = below
    zero_node = manager.zero_node
    for i in reversed(range(first, stop)):
        then = manager.find_or_add(col_level(i), node, zero_node)
        else_ = manager.find_or_add(col_level(i), zero_node, node)
        node = manager.find_or_add(row_level(i), then, else_)
    return node


def vector_from_amplitudes(manager: Manager, amplitudes: Sequence[Any] | np.ndarray) -> QuiddVector:
    size = len(amplitudes)
    n = size.bit_length() - 1
    if size < 1 or 1 << n != size:
        raise DimensionError(f"amplitude count must be a power of two, got {size}")

    def build(i: int, offset: int) -> Node:
        if i == n:
            return manager.terminal_node(_plain(amplitudes[offset]))
        half = 1 << (n - 1 - i)
        return manager.find_or_add(col_level(i), build(i + 1, offset + half), build(i + 1, offset))

    return QuiddVector(manager.wrap(build(0, 0)), n)


def matrix_from_function(manager: Manager, qubits: int, fn: Callable[[int, int], Any]) -> QuiddMatrix:
    """Matrix with entry fn(row, col); enumerates all 4**qubits entries."""

    def build(level: int, r: int, c: int) -> Node:
        if level == 2 * qubits:
            return manager.terminal_node(_plain(fn(r, c)))
        if level & 1:
            return manager.find_or_add(level, build(level + 1, r, c << 1 | 1), build(level + 1, r, c << 1))
        return manager.find_or_add(level, build(level + 1, r << 1 | 1, c), build(level + 1, r << 1, c))

    return QuiddMatrix(manager.wrap(build(0, 0, 0)), qubits)


def matrix_from_entries(manager: Manager, entries: Sequence[Sequence[Any]] | np.ndarray) -> QuiddMatrix:
    size = len(entries)
    n = size.bit_length() - 1
    if size < 1 or 1 << n != size or any(len(row) != size for row in entries):
        raise DimensionError(f"matrix must be square with power-of-two side, got {size} rows")
    return matrix_from_function(manager, n, lambda r, c: entries[r][c])


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    return value


# -- tensor, sums and products --


def tensor(a: Operand, b: Operand) -> Operand:
    manager = _common_manager(a, b)
    if type(a) is not type(b):
        raise DimensionError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")
    shifted = manager.shift_variables(b.handle, a.qubits)
    root = manager.apply_nodes(MUL, a.root, shifted.root)
    return _like(a, root, a.qubits + b.qubits)


def tensor_all(factors: Sequence[Operand]) -> Operand:
    if not factors:
        raise ValueError("factor list must be non-empty")
    result = factors[0]
    for factor in factors[1:]:
        result = tensor(result, factor)
    return result


def add(a: Operand, b: Operand) -> Operand:
    manager = _check_same_shape(a, b)
    return _like(a, manager.apply_nodes(ADD, a.root, b.root))


def elementwise_mul(a: Operand, b: Operand) -> Operand:
    manager = _check_same_shape(a, b)
    return _like(a, manager.apply_nodes(MUL, a.root, b.root))


def scalar_mul(c: Any, a: Operand) -> Operand:
    manager = a.manager
    return _like(a, manager.apply_nodes(MUL, manager.terminal_node(c), a.root))


def conjugate(a: Operand) -> Operand:
    return _like(a, a.manager.map_nodes(CONJ, a.root))


def transpose(a: QuiddMatrix) -> QuiddMatrix:
    if not isinstance(a, QuiddMatrix):
        raise DimensionError("transpose expects a matrix")
    return QuiddMatrix(a.manager.wrap(a.manager.transpose_nodes(a.root)), a.qubits)


def conjugate_transpose(a: QuiddMatrix) -> QuiddMatrix:
    if not isinstance(a, QuiddMatrix):
        raise DimensionError("conjugate_transpose expects a matrix")
    manager = a.manager
    return QuiddMatrix(manager.wrap(manager.transpose_nodes(manager.map_nodes(CONJ, a.root))), a.qubits)


def _skipped_sums(lo: int, hi: int) -> int:
    # number of levels L with lo <= L < hi and L % 3 == 1
    return (hi + 1) // 3 - (lo + 1) // 3


def matmul(a: QuiddMatrix, b: Operand) -> Operand:
    """Matrix-matrix or matrix-vector product."""
    if not isinstance(a, QuiddMatrix):
        raise DimensionError("left operand of matmul must be a matrix")
    manager = _common_manager(a, b)
    if a.qubits != b.qubits:
        raise DimensionError(f"qubit counts differ: {a.qubits} != {b.qubits}")
    vector = isinstance(b, QuiddVector)
    root = _product(manager, a.root, b.root, a.qubits, vector)
    if vector:
        # the product comes out on Row variables; vectors live on Col
        root = manager.relabel_nodes(root, lambda level: level | 1, token="row_to_col")
        return QuiddVector(manager.wrap(root), a.qubits)
    return QuiddMatrix(manager.wrap(root), a.qubits)


def _product(manager: Manager, a: Node, b: Node, qubits: int, vector: bool) -> Node:
    end = 3 * qubits
    field = manager.field
    counters = manager.counters
    cache = manager.product_cache((qubits, vector))
    zero_node = manager.zero_node

    def a_level(node: Node) -> int:
        level = manager.level_of(node)
        if level == TERMINAL_LEVEL:
            return end
        return 3 * (level >> 1) + (level & 1)

    def b_level(node: Node) -> int:
        level = manager.level_of(node)
        if level == TERMINAL_LEVEL:
            return end
        if vector:
            return 3 * (level >> 1) + 1
        return 3 * (level >> 1) + 1 + (level & 1)

    def scaled(x: Node, y: Node, lo: int) -> Node:
        result = rec(x, y)
        if result == zero_node:
            return result
        skipped = _skipped_sums(lo, min(a_level(x), b_level(y)))
        if skipped:
            result = manager.apply_nodes(MUL, result, manager.terminal_node(field.power_of_two(skipped)))
        return result

    def rec(x: Node, y: Node) -> Node:
        # sum over summed levels at or below the pair's top
        if x == zero_node or y == zero_node:
            return zero_node
        key = (x, y)
        hit = cache.get(key)
        if hit is not None:
            return hit
        counters.matmul_steps += 1
        lx, ly = a_level(x), b_level(y)
        top = min(lx, ly)
        if top == end:
            result = manager.terminal_node(field.mul(manager.leaf_value(x), manager.leaf_value(y)))
        else:
            x1, x0 = manager.cofactors(x, manager.level_of(x)) if lx == top else (x, x)
            y1, y0 = manager.cofactors(y, manager.level_of(y)) if ly == top else (y, y)
            then = scaled(x1, y1, top + 1)
            else_ = scaled(x0, y0, top + 1)
            qubit, offset = divmod(top, 3)
            if offset == 1:
                result = manager.apply_nodes(ADD, then, else_)
            elif offset == 0:
                result = manager.find_or_add(row_level(qubit), then, else_)
            else:
                result = manager.find_or_add(col_level(qubit), then, else_)
        cache[key] = result
        return result

    return scaled(a, b, 0)


# -- reductions --


def sum_entries(x: Operand) -> Scalar:
    """Sum of all entries, weighting skipped variables by 2."""
    manager = x.manager
    field = manager.field
    end = 2 * x.qubits
    vector = isinstance(x, QuiddVector)
    cache: dict[Node, Scalar] = {}

    def free(lo: int, hi: int) -> int:
        if vector:
            return hi // 2 - lo // 2
        return hi - lo

    def weigh(node: Node, lo: int) -> Scalar:
        level = manager.level_of(node)
        hi = end if level == TERMINAL_LEVEL else level
        skipped = free(lo, hi)
        total = rec(node)
        if skipped:
            total = field.mul(total, field.power_of_two(skipped))
        return total

    def rec(node: Node) -> Scalar:
        hit = cache.get(node)
        if hit is not None:
            return hit
        level, then, else_ = manager.succ(node)
        if level == TERMINAL_LEVEL:
            total = manager.terminals[then]
        else:
            total = field.add(weigh(then, level + 1), weigh(else_, level + 1))
        cache[node] = total
        return total

    return weigh(x.root, 0)


def norm_squared(v: QuiddVector) -> Any:
    manager = v.manager
    return manager.field.real(sum_entries(_like(v, manager.map_nodes(ABS2, v.root))))


def inner_product(u: QuiddVector, v: QuiddVector) -> Scalar:
    """<u|v>, conjugating u."""
    manager = _check_same_shape(u, v)
    if not isinstance(u, QuiddVector):
        raise DimensionError("inner_product expects vectors")
    # conj(u) on Col variables, read as a matrix, is the row vector u^dagger
    # repeated on every row; the product is constant.
    bra = QuiddMatrix(manager.wrap(manager.map_nodes(CONJ, u.root)), u.qubits)
    product = matmul(bra, v)
    return manager.value(product.handle)


def measure(state: QuiddVector, m: QuiddMatrix) -> MeasurementOutcome:
    """Apply measurement operator `m` and renormalize."""
    manager = _common_manager(state, m)
    if not isinstance(state, QuiddVector) or not isinstance(m, QuiddMatrix):
        raise DimensionError("measure expects a state vector and a matrix")
    if state.qubits != m.qubits:
        raise DimensionError(f"qubit counts differ: {state.qubits} != {m.qubits}")
    field = manager.field
    effect = matmul(conjugate_transpose(m), m)
    probability = field.real(inner_product(state, matmul(effect, state)))
    if probability <= 0:
        raise ZeroProbabilityError("measurement outcome has zero probability")
    if probability > 1:
        probability = field.real(1)
    projected = matmul(m, state)
    post = scalar_mul(field.div_real(field.one, field.sqrt(probability)), projected)
    assert isinstance(post, QuiddVector)
    return MeasurementOutcome(post_state=post, probability=probability)


# -- diagonal forms and patterns --


def diagonal_matrix(v: QuiddVector) -> QuiddMatrix:
    manager = v.manager
    n = v.qubits
    zero_node = manager.zero_node
    cache: dict[tuple[Node, int], Node] = {}

    def rec(node: Node, i: int) -> Node:
        if i == n or node == zero_node:
            return node
        key = (node, i)
        hit = cache.get(key)
        if hit is not None:
            return hit
        v1, v0 = manager.cofactors(node, col_level(i))
        then = manager.find_or_add(col_level(i), rec(v1, i + 1), zero_node)
        else_ = manager.find_or_add(col_level(i), zero_node, rec(v0, i + 1))
        result = manager.find_or_add(row_level(i), then, else_)
        cache[key] = result
        return result

    return QuiddMatrix(manager.wrap(rec(v.root, 0)), n)


def diagonal_of(m: QuiddMatrix) -> QuiddVector:
    manager = m.manager
    n = m.qubits
    cache: dict[tuple[Node, int], Node] = {}

    def rec(node: Node, i: int) -> Node:
        if i == n:
            return node
        key = (node, i)
        hit = cache.get(key)
        if hit is not None:
            return hit
        f1, f0 = manager.cofactors(node, row_level(i))
        f11 = manager.cofactors(f1, col_level(i))[0]
        f00 = manager.cofactors(f0, col_level(i))[1]
        result = manager.find_or_add(col_level(i), rec(f11, i + 1), rec(f00, i + 1))
        cache[key] = result
        return result

    return QuiddVector(manager.wrap(rec(m.root, 0)), n)


def pattern_indicator(manager: Manager, pattern: str, qubits: int | None = None) -> QuiddVector:
    """1 on indices whose leading qubits match `pattern` over {0, 1, d}."""
    width = len(pattern) if qubits is None else qubits
    if width < len(pattern):
        raise DimensionError(f"pattern of length {len(pattern)} does not fit {width} qubits")
    node = manager.one_node
    zero_node = manager.zero_node
    for i in reversed(range(len(pattern))):
        symbol = pattern[i]
        if symbol == "1":
            node = manager.find_or_add(col_level(i), node, zero_node)
        elif symbol == "0":
            node = manager.find_or_add(col_level(i), zero_node, node)
        elif symbol != "d":
            raise ValueError(f"pattern symbols must be 0, 1 or d, got {symbol!r}")
    return QuiddVector(manager.wrap(node), width)


def pattern_projector(manager: Manager, pattern: str, qubits: int | None = None) -> QuiddMatrix:
    return diagonal_matrix(pattern_indicator(manager, pattern, qubits))


# -- element access and dense conversion --


def index_bits(index: int, qubits: int) -> list[int]:
    """Bits of `index`, qubit 0 first (most significant)."""
    return [(index >> (qubits - 1 - i)) & 1 for i in range(qubits)]


def entry(v: QuiddVector, index: int) -> Scalar:
    return v.manager.eval(v.handle, (), index_bits(index, v.qubits))


def matrix_entry(m: QuiddMatrix, row: int, col: int) -> Scalar:
    return m.manager.eval(m.handle, index_bits(row, m.qubits), index_bits(col, m.qubits))


def to_dense_vector(v: QuiddVector) -> np.ndarray:
    manager = v.manager
    n = v.qubits
    cache: dict[tuple[Node, int], np.ndarray] = {}

    def rec(node: Node, i: int) -> np.ndarray:
        key = (node, i)
        hit = cache.get(key)
        if hit is not None:
            return hit
        if i == n:
            out = np.array([manager.field.to_complex(manager.leaf_value(node))], dtype=np.complex128)
        else:
            one, zero_ = manager.cofactors(node, col_level(i))
            out = np.concatenate([rec(zero_, i + 1), rec(one, i + 1)])
        cache[key] = out
        return out

    return rec(v.root, 0)


def to_dense_matrix(m: QuiddMatrix) -> np.ndarray:
    manager = m.manager
    n = m.qubits
    cache: dict[tuple[Node, int], np.ndarray] = {}

    def rec(node: Node, i: int) -> np.ndarray:
        key = (node, i)
        hit = cache.get(key)
        if hit is not None:
            return hit
        if i == n:
            out = np.array([[manager.field.to_complex(manager.leaf_value(node))]], dtype=np.complex128)
        else:
            f1, f0 = manager.cofactors(node, row_level(i))
            f11, f10 = manager.cofactors(f1, col_level(i))
            f01, f00 = manager.cofactors(f0, col_level(i))
            out = np.block([[rec(f00, i + 1), rec(f01, i + 1)], [rec(f10, i + 1), rec(f11, i + 1)]])
        cache[key] = out
        return out

    return rec(m.root, 0)


def iter_cubes(v: QuiddVector) -> Iterator[tuple[dict[int, int], Scalar]]:
    """Paths to nonzero terminals as (qubit -> bit, amplitude)."""
    manager = v.manager
    stack: list[tuple[Node, dict[int, int]]] = [(v.root, {})]
    while stack:
        node, fixed = stack.pop()
        level, then, else_ = manager.succ(node)
        if level == TERMINAL_LEVEL:
            if node != manager.zero_node:
                yield fixed, manager.terminals[then]
            continue
        qubit = level >> 1
        stack.append((else_, {**fixed, qubit: 0}))
        stack.append((then, {**fixed, qubit: 1}))


def top_amplitudes(v: QuiddVector, k: int) -> list[tuple[int, Scalar]]:
    """The k largest-magnitude amplitudes, ties broken by lower index."""
    field = v.manager.field
    cubes = [(fixed, value, float(field.to_complex(field.abs2(value)).real)) for fixed, value in iter_cubes(v)]
    rows: list[tuple[float, int, Scalar]] = []
    for fixed, value, weight in cubes:
        free = [q for q in range(v.qubits) if q not in fixed]
        base = sum(bit << (v.qubits - 1 - q) for q, bit in fixed.items())
        # at most k indices per cube can reach the result
        for combo in range(min(1 << len(free), k)):
            index = base
            for j, q in enumerate(reversed(free)):
                if combo >> j & 1:
                    index |= 1 << (v.qubits - 1 - q)
            rows.append((-weight, index, value))
    rows.sort(key=lambda row: (row[0], row[1]))
    return [(index, value) for _, index, value in rows[:k]]


# -- node-count prediction for tensor products --


def _factor_handle(factor: Operand | DiagramHandle) -> DiagramHandle:
    if isinstance(factor, (QuiddMatrix, QuiddVector)):
        return factor.handle
    return factor


def _first_nonzero_leaf(manager: Manager, node: Node) -> Scalar:
    stack = [node]
    while stack:
        u = stack.pop()
        level, then, else_ = manager.succ(u)
        if level == TERMINAL_LEVEL:
            if u != manager.zero_node:
                return manager.terminals[then]
            continue
        stack.append(else_)
        stack.append(then)
    raise ValueError("diagram has no nonzero terminal")


def _prefix_terminals(table: TerminalTable, manager: Manager, handles: Sequence[DiagramHandle]) -> list[set[int]]:
    """Terminal sets (as local table indices) of every prefix product."""
    field = manager.field
    prefix = {table.intern(field.one)}
    sets = [prefix]
    for handle in handles:
        leaves = manager.terminal_values(handle)
        prefix = {table.intern(field.mul(table[i], value)) for i in prefix for value in leaves}
        sets.append(prefix)
    return sets


def predicted_tensor_nodes(factors: Sequence[Operand | DiagramHandle]) -> int:
    """Node total of the tensor product of `factors`, without building it.

    Nodes of factor i in the product are the distinct scaled copies a*S,
    for a nonzero terminal a of the prefix product and an internal
    subgraph S of factor i. A copy is keyed by S normalized by its first
    nonzero leaf together with the resulting scale.
    """
    handles = [_factor_handle(f) for f in factors]
    if not handles:
        raise ValueError("factor list must be non-empty")
    manager = _common_manager(*handles)
    if any(h.root == manager.zero_node for h in handles):
        return 1
    field = manager.field
    table = TerminalTable(manager.precision)
    prefixes = _prefix_terminals(table, manager, handles)
    internal = 0
    for handle, prefix in zip(handles, prefixes):
        scales = [table[i] for i in sorted(prefix) if not field.is_zero(table[i])]
        copies: set[tuple[Node, int]] = set()
        for node in manager.node_reachable(handle.root):
            if manager.is_leaf(node):
                continue
            lead = _first_nonzero_leaf(manager, node)
            normalized = manager.apply_nodes(MUL, node, manager.terminal_node(field.div(field.one, lead)))
            for a in scales:
                copies.add((normalized, table.intern(field.mul(a, lead))))
        internal += len(copies)
    logger.debug("predicted tensor nodes: %d internal, %d terminal", internal, len(prefixes[-1]))
    return internal + len(prefixes[-1])


def lemma_formula_nodes(factors: Sequence[Operand | DiagramHandle]) -> int:
    """|In(Q1)| + sum_i |In(Qi)| * |Term(Q1..Q(i-1))| + |Term(Q1..Qn)|."""
    handles = [_factor_handle(f) for f in factors]
    if not handles:
        raise ValueError("factor list must be non-empty")
    manager = _common_manager(*handles)
    table = TerminalTable(manager.precision)
    prefixes = _prefix_terminals(table, manager, handles)
    total = 0
    for i, handle in enumerate(handles):
        inner = manager.node_stats(handle).internal_count
        total += inner if i == 0 else inner * len(prefixes[i])
    return total + len(prefixes[-1])
