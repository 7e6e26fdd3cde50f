"""Reduced ordered decision diagrams with complex terminals.

Nodes are positive integers. For each node the manager stores a triple
``(level, then, else)``; terminals store ``(TERMINAL_LEVEL, index, 0)``
where `index` points into the manager's `TerminalTable`.

Reduction rule 1 (no isomorphic subgraphs) is enforced by the unique
table `_pred`, rule 2 (no node with equal children) by `find_or_add`.

Memo tables are never evicted while their nodes are alive. They are
dropped by `collect`, which sweeps every node unreachable from a live
`DiagramHandle`. At desk scale the memo tables dominate memory; callers
running long loops should call `maybe_collect` between steps.
"""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from ..errors import ManagerMismatchError, OrderingError
from ..numerics import PrecisionConfig, Scalar, TerminalTable
from .labels import TERMINAL_LEVEL, Kind, VariableLabel
from .ops import ADD, MUL, TerminalOp, UnaryOp

logger = logging.getLogger(__name__)

GC_STARTS = 1 << 15
GC_FACTOR = 2
# recursion depth grows with the variable count (two frames per level in products)
RECURSION_LIMIT = 100_000

Node = int
Triple = tuple[int, int, int]


@dataclass(frozen=True)
class NodeStats:
    internal_count: int
    terminal_count: int

    @property
    def total(self) -> int:
        return self.internal_count + self.terminal_count


@dataclass
class OpCounters:
    """Recursion step counts, one per memo-table miss."""

    apply_steps: int = 0
    monadic_steps: int = 0
    matmul_steps: int = 0

    def reset(self) -> None:
        self.apply_steps = 0
        self.monadic_steps = 0
        self.matmul_steps = 0

    def snapshot(self) -> dict[str, int]:
        return {
            "apply_steps": self.apply_steps,
            "monadic_steps": self.monadic_steps,
            "matmul_steps": self.matmul_steps,
        }

    @property
    def total(self) -> int:
        return self.apply_steps + self.monadic_steps + self.matmul_steps


class DiagramHandle:
    """Reference-counted root of a diagram owned by one manager."""

    __slots__ = ("manager", "root", "__weakref__")

    def __init__(self, manager: "Manager", root: Node):
        self.manager = manager
        self.root = root
        manager._incref(root)

    def __del__(self) -> None:
        try:
            self.manager._decref(self.root)
        except Exception:  # interpreter shutdown
            pass

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiagramHandle):
            return NotImplemented
        return self.manager is other.manager and self.root == other.root

    def __hash__(self) -> int:
        return hash((id(self.manager), self.root))

    def __repr__(self) -> str:
        level = self.manager.succ(self.root)[0]
        top = "terminal" if level == TERMINAL_LEVEL else str(VariableLabel.from_level(level))
        return f"DiagramHandle(root={self.root}, top={top})"

    @property
    def is_terminal(self) -> bool:
        return self.manager.succ(self.root)[0] == TERMINAL_LEVEL

    @property
    def level(self) -> int:
        return self.manager.succ(self.root)[0]


class Manager:
    """Node manager: unique table, terminal table and Apply caches.

    A manager and its handles are confined to one thread. Distinct
    managers are independent.
    """

    def __init__(self, precision: PrecisionConfig | None = None):
        if sys.getrecursionlimit() < RECURSION_LIMIT:
            sys.setrecursionlimit(RECURSION_LIMIT)
        self.precision = precision or PrecisionConfig()
        self.terminals = TerminalTable(self.precision)
        self.field = self.terminals.field
        # node -> (level, then, else)
        self._succ: dict[Node, Triple] = {}
        # (level, then, else) -> node
        self._pred: dict[Triple, Node] = {}
        # terminal index -> node
        self._leaf: dict[int, Node] = {}
        # node -> number of live handles
        self._ref: dict[Node, int] = {}
        self._min_free = 1
        # op tag -> {(a, b) -> result}
        self._binary_cache: dict[int, dict[tuple[Node, Node], Node]] = {}
        self._unary_cache: dict[int, dict[Node, Node]] = {}
        self._relabel_cache: dict[Hashable, dict[Node, Node]] = {}
        self._matmul_cache: dict[Hashable, dict[tuple[Node, Node], Node]] = {}
        self.counters = OpCounters()
        self._last_len = GC_STARTS
        self.zero_node = self.terminal_node(self.field.zero)
        self.one_node = self.terminal_node(self.field.one)

    def __len__(self) -> int:
        return len(self._succ)

    def __contains__(self, node: Node) -> bool:
        return node in self._succ

    # -- node-level API (used by linalg; raw nodes are not protected from collect) --

    def succ(self, node: Node) -> Triple:
        return self._succ[node]

    def level_of(self, node: Node) -> int:
        return self._succ[node][0]

    def is_leaf(self, node: Node) -> bool:
        return self._succ[node][0] == TERMINAL_LEVEL

    def leaf_value(self, node: Node) -> Scalar:
        level, index, _ = self._succ[node]
        assert level == TERMINAL_LEVEL, node
        return self.terminals[index]

    def terminal_node(self, value: Any) -> Node:
        index = self.terminals.intern(value)
        node = self._leaf.get(index)
        if node is None:
            node = self._new((TERMINAL_LEVEL, index, 0))
            self._leaf[index] = node
        return node

    def find_or_add(self, level: int, then: Node, else_: Node) -> Node:
        """Return the canonical node for `(level, then, else_)`."""
        if then == else_:
            return then
        key = (level, then, else_)
        node = self._pred.get(key)
        if node is None:
            node = self._new(key)
            self._pred[key] = node
        return node

    def cofactors(self, node: Node, level: int) -> tuple[Node, Node]:
        """Return (then, else) of `node` w.r.t. the variable at `level`."""
        node_level, then, else_ = self._succ[node]
        if node_level == level:
            return then, else_
        return node, node

    def wrap(self, node: Node) -> DiagramHandle:
        return DiagramHandle(self, node)

    def _new(self, triple: Triple) -> Node:
        node = self._min_free
        self._min_free += 1
        self._succ[node] = triple
        return node

    # -- reference counting and collection --

    def _incref(self, node: Node) -> None:
        self._ref[node] = self._ref.get(node, 0) + 1

    def _decref(self, node: Node) -> None:
        count = self._ref.get(node, 0) - 1
        if count <= 0:
            self._ref.pop(node, None)
        else:
            self._ref[node] = count

    def product_cache(self, token: Hashable) -> dict[tuple[Node, Node], Node]:
        """Memo table for matrix products, keyed by operand shape."""
        return self._matmul_cache.setdefault(token, {})

    def clear_caches(self) -> None:
        self._binary_cache.clear()
        self._unary_cache.clear()
        self._relabel_cache.clear()
        self._matmul_cache.clear()

    def collect(self) -> int:
        """Sweep nodes unreachable from live handles. Returns the number removed."""
        live = set(self._reachable([*self._ref, self.zero_node, self.one_node]))
        dead = [node for node in self._succ if node not in live]
        for node in dead:
            level, then, else_ = self._succ.pop(node)
            if level == TERMINAL_LEVEL:
                del self._leaf[then]
            else:
                del self._pred[(level, then, else_)]
        self.clear_caches()
        logger.debug("collect: removed %d nodes, %d live", len(dead), len(self._succ))
        return len(dead)

    def maybe_collect(self) -> int:
        """Collect when the node count has grown past the last watermark."""
        if len(self._succ) < GC_FACTOR * self._last_len:
            return 0
        removed = self.collect()
        self._last_len = max(GC_STARTS, len(self._succ))
        return removed

    # -- construction --

    def _check(self, *handles: DiagramHandle) -> None:
        for handle in handles:
            if handle.manager is not self:
                raise ManagerMismatchError("diagram belongs to a different manager")

    def make_terminal(self, value: Any) -> DiagramHandle:
        return self.wrap(self.terminal_node(value))

    def constant(self, value: Any) -> DiagramHandle:
        return self.make_terminal(value)

    def make_internal(self, var: VariableLabel, then: DiagramHandle, else_: DiagramHandle) -> DiagramHandle:
        self._check(then, else_)
        level = var.level
        for child in (then, else_):
            if level >= self.level_of(child.root):
                child_top = self.level_of(child.root)
                raise OrderingError(
                    f"variable {var} must precede child top variable {VariableLabel.from_level(child_top)}"
                )
        return self.wrap(self.find_or_add(level, then.root, else_.root))

    # -- Apply --

    def apply(self, a: DiagramHandle, b: DiagramHandle, op: TerminalOp) -> DiagramHandle:
        self._check(a, b)
        return self.wrap(self.apply_nodes(op, a.root, b.root))

    def apply_nodes(self, op: TerminalOp, a: Node, b: Node) -> Node:
        if op.tag is None:
            cache: dict[tuple[Node, Node], Node] = {}
        else:
            cache = self._binary_cache.setdefault(op.tag, {})
        return self._apply(op, a, b, cache)

    def _apply(self, op: TerminalOp, a: Node, b: Node, cache: dict[tuple[Node, Node], Node]) -> Node:
        if op is MUL:
            zero, one = self.zero_node, self.one_node
            if a == zero or b == zero:
                return zero
            if a == one:
                return b
            if b == one:
                return a
        elif op is ADD:
            if a == self.zero_node:
                return b
            if b == self.zero_node:
                return a
        key = (b, a) if op.commutative and b < a else (a, b)
        result = cache.get(key)
        if result is not None:
            return result
        self.counters.apply_steps += 1
        la, ta, ea = self._succ[a]
        lb, tb, eb = self._succ[b]
        if la == TERMINAL_LEVEL and lb == TERMINAL_LEVEL:
            value = op.fn(self.field, self.terminals[ta], self.terminals[tb])
            result = self.terminal_node(value)
        elif la < lb:
            result = self.find_or_add(la, self._apply(op, ta, b, cache), self._apply(op, ea, b, cache))
        elif la > lb:
            result = self.find_or_add(lb, self._apply(op, a, tb, cache), self._apply(op, a, eb, cache))
        else:
            result = self.find_or_add(la, self._apply(op, ta, tb, cache), self._apply(op, ea, eb, cache))
        cache[key] = result
        return result

    def map_terminals(self, d: DiagramHandle, op: UnaryOp) -> DiagramHandle:
        """Monadic Apply: replace every terminal value x by op(x)."""
        self._check(d)
        return self.wrap(self.map_nodes(op, d.root))

    def map_nodes(self, op: UnaryOp, node: Node) -> Node:
        if op.tag is None:
            cache: dict[Node, Node] = {}
        else:
            cache = self._unary_cache.setdefault(op.tag, {})
        return self._map(op, node, cache)

    def _map(self, op: UnaryOp, node: Node, cache: dict[Node, Node]) -> Node:
        result = cache.get(node)
        if result is not None:
            return result
        self.counters.monadic_steps += 1
        level, then, else_ = self._succ[node]
        if level == TERMINAL_LEVEL:
            result = self.terminal_node(op.fn(self.field, self.terminals[then]))
        else:
            result = self.find_or_add(level, self._map(op, then, cache), self._map(op, else_, cache))
        cache[node] = result
        return result

    # -- variable manipulation --

    def shift_variables(self, d: DiagramHandle, qubit_offset: int) -> DiagramHandle:
        """Move Row(i)/Col(i) to Row(i + offset)/Col(i + offset)."""
        self._check(d)
        if qubit_offset < 0:
            raise ValueError(f"qubit offset must be non-negative, got {qubit_offset}")
        if qubit_offset == 0:
            return self.wrap(d.root)
        delta = 2 * qubit_offset
        return self.wrap(self.relabel_nodes(d.root, lambda level: level + delta, token=("shift", delta)))

    def relabel(self, d: DiagramHandle, fn: Callable[[VariableLabel], VariableLabel]) -> DiagramHandle:
        """Rename variables with an order-preserving map."""
        self._check(d)
        return self.wrap(self.relabel_nodes(d.root, lambda level: fn(VariableLabel.from_level(level)).level))

    def relabel_nodes(self, node: Node, fn: Callable[[int], int], token: Hashable | None = None) -> Node:
        if token is None:
            cache: dict[Node, Node] = {}
        else:
            cache = self._relabel_cache.setdefault(token, {})
        return self._relabel(node, fn, cache)

    def _relabel(self, node: Node, fn: Callable[[int], int], cache: dict[Node, Node]) -> Node:
        result = cache.get(node)
        if result is not None:
            return result
        level, then, else_ = self._succ[node]
        if level == TERMINAL_LEVEL:
            return node
        new_then = self._relabel(then, fn, cache)
        new_else = self._relabel(else_, fn, cache)
        new_level = fn(level)
        if new_level >= self.level_of(new_then) or new_level >= self.level_of(new_else):
            raise OrderingError(f"relabeling {VariableLabel.from_level(level)} breaks the variable order")
        result = self.find_or_add(new_level, new_then, new_else)
        cache[node] = result
        return result

    def transpose_variables(self, d: DiagramHandle) -> DiagramHandle:
        """Swap Row(i) and Col(i) for every qubit i."""
        self._check(d)
        return self.wrap(self.transpose_nodes(d.root))

    def transpose_nodes(self, node: Node) -> Node:
        return self._transpose(node, self._relabel_cache.setdefault("transpose", {}))

    def _transpose(self, node: Node, cache: dict[Node, Node]) -> Node:
        result = cache.get(node)
        if result is not None:
            return result
        level = self.level_of(node)
        if level == TERMINAL_LEVEL:
            return node
        row, col = level & ~1, level | 1
        f1, f0 = self.cofactors(node, row)
        f11, f10 = self.cofactors(f1, col)
        f01, f00 = self.cofactors(f0, col)
        # g(r, c) = f(c, r)
        result = self.find_or_add(
            row,
            self.find_or_add(col, self._transpose(f11, cache), self._transpose(f01, cache)),
            self.find_or_add(col, self._transpose(f10, cache), self._transpose(f00, cache)),
        )
        cache[node] = result
        return result

    def restrict(self, d: DiagramHandle, assignment: Mapping[VariableLabel, int]) -> DiagramHandle:
        """Cofactor `d` on a partial assignment of variables to bits."""
        self._check(d)
        levels = {var.level: int(bit) for var, bit in assignment.items()}
        return self.wrap(self.restrict_nodes(d.root, levels))

    def restrict_nodes(self, node: Node, levels: Mapping[int, int]) -> Node:
        cache: dict[Node, Node] = {}

        def rec(u: Node) -> Node:
            hit = cache.get(u)
            if hit is not None:
                return hit
            level, then, else_ = self._succ[u]
            if level == TERMINAL_LEVEL:
                return u
            bit = levels.get(level)
            if bit is None:
                r = self.find_or_add(level, rec(then), rec(else_))
            else:
                r = rec(then if bit else else_)
            cache[u] = r
            return r

        return rec(node)

    # -- inspection --

    def _reachable(self, roots: Iterable[Node]) -> Iterator[Node]:
        seen: set[Node] = set()
        stack = [r for r in roots if r in self._succ]
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            yield node
            level, then, else_ = self._succ[node]
            if level != TERMINAL_LEVEL:
                stack.append(then)
                stack.append(else_)

    def node_reachable(self, *roots: Node) -> Iterator[Node]:
        return self._reachable(roots)

    def descendants(self, d: DiagramHandle) -> list[Node]:
        self._check(d)
        return list(self._reachable([d.root]))

    def node_stats(self, d: DiagramHandle) -> NodeStats:
        self._check(d)
        return self.node_stats_of(d.root)

    def node_stats_of(self, *roots: Node) -> NodeStats:
        internal = terminal = 0
        for node in self._reachable(roots):
            if self._succ[node][0] == TERMINAL_LEVEL:
                terminal += 1
            else:
                internal += 1
        return NodeStats(internal_count=internal, terminal_count=terminal)

    def value(self, d: DiagramHandle) -> Scalar:
        """Terminal value of a constant diagram."""
        self._check(d)
        if not d.is_terminal:
            raise ValueError("diagram is not constant")
        return self.leaf_value(d.root)

    def terminal_values(self, d: DiagramHandle) -> list[Scalar]:
        self._check(d)
        indices = sorted(
            self._succ[node][1] for node in self._reachable([d.root]) if self._succ[node][0] == TERMINAL_LEVEL
        )
        return [self.terminals[i] for i in indices]

    def support(self, d: DiagramHandle) -> set[VariableLabel]:
        self._check(d)
        return {
            VariableLabel.from_level(self._succ[node][0])
            for node in self._reachable([d.root])
            if self._succ[node][0] != TERMINAL_LEVEL
        }

    def eval(self, d: DiagramHandle, row_bits: Sequence[int], col_bits: Sequence[int]) -> Scalar:
        """Entry of `d` at the given row/column bits (bit i is qubit i)."""
        self._check(d)
        node = d.root
        while True:
            level, then, else_ = self._succ[node]
            if level == TERMINAL_LEVEL:
                return self.terminals[then]
            var = VariableLabel.from_level(level)
            bits = row_bits if var.kind is Kind.ROW else col_bits
            bit = bits[var.index] if var.index < len(bits) else 0
            node = then if bit else else_

    def audit(self, d: DiagramHandle) -> list[str]:
        """Structural audit: reduction rules 1-2 and strict ordering."""
        self._check(d)
        problems: list[str] = []
        for node in self._reachable([d.root]):
            level, then, else_ = self._succ[node]
            if level == TERMINAL_LEVEL:
                if self._leaf.get(then) != node:
                    problems.append(f"terminal node {node} is not canonical for index {then}")
                continue
            if then == else_:
                problems.append(f"node {node} has equal then/else children")
            if self._pred.get((level, then, else_)) != node:
                problems.append(f"node {node} is not canonical in the unique table")
            for child in (then, else_):
                if self._succ[child][0] <= level:
                    problems.append(f"edge {node}->{child} violates the variable order")
        return problems
