"""Decision-diagram manager: canonicity, Apply, variable maps, collection."""

from __future__ import annotations

import gc

import numpy as np
import pytest
from support.assertions import assert_canonical, assert_dense_close
from support.dense import random_matrix, random_vector

from quidd_sim.core import (
    ABS2,
    ADD,
    CONJ,
    MUL,
    SUB,
    Col,
    Manager,
    Row,
    binary_op,
    to_dot,
    unary_op,
)
from quidd_sim.errors import ManagerMismatchError, OrderingError
from quidd_sim.linalg import (
    matmul,
    matrix_from_entries,
    tensor,
    tensor_all,
    to_dense_matrix,
    to_dense_vector,
    vector_from_amplitudes,
)
from quidd_sim.numerics import PrecisionConfig


@pytest.fixture
def manager():
    return Manager(PrecisionConfig.double())


def test_equal_children_collapse(manager):
    leaf = manager.make_terminal(0.5)
    assert manager.make_internal(Row(0), leaf, leaf) == leaf


def test_identical_nodes_are_shared(manager):
    one, zero = manager.make_terminal(1), manager.make_terminal(0)
    a = manager.make_internal(Col(1), one, zero)
    b = manager.make_internal(Col(1), one, zero)
    assert a.root == b.root
    top = manager.make_internal(Row(0), a, b)
    assert top == a
    assert_canonical(a)


def test_ordering_is_enforced(manager):
    one, zero = manager.make_terminal(1), manager.make_terminal(0)
    lower = manager.make_internal(Row(1), one, zero)
    with pytest.raises(OrderingError):
        manager.make_internal(Col(1), lower, zero)
    with pytest.raises(OrderingError):
        manager.make_internal(Row(1), lower, zero)
    assert manager.make_internal(Col(0), lower, zero).level == Col(0).level


def test_interleaved_level_order():
    assert Row(0).level < Col(0).level < Row(1).level < Col(1).level
    assert str(Row(3)) == "R3" and str(Col(0)) == "C0"


@pytest.mark.parametrize("seed", range(6))
def test_construction_order_does_not_change_the_diagram(manager, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (matrix_from_entries(manager, random_matrix(rng, 1)) for _ in range(3))
    shapes = [tensor(tensor(a, b), c), tensor(a, tensor(b, c)), tensor_all([a, b, c])]
    assert len({s.handle.root for s in shapes}) == 1
    assert len({manager.node_stats(s.handle) for s in shapes}) == 1
    assert_canonical(shapes[0].handle)

    x, y, z = (matrix_from_entries(manager, random_matrix(rng, 2)) for _ in range(3))
    left, right = matmul(matmul(x, y), z), matmul(x, matmul(y, z))
    assert left.handle.root == right.handle.root
    assert manager.node_stats(left.handle) == manager.node_stats(right.handle)
    assert_dense_close(to_dense_matrix(left), to_dense_matrix(x) @ to_dense_matrix(y) @ to_dense_matrix(z), 1e-12)

    v = vector_from_amplitudes(manager, random_matrix(rng, 2)[0])
    assert matmul(matmul(x, y), v).handle.root == matmul(x, matmul(y, v)).handle.root


def test_managers_do_not_mix():
    a, b = Manager(), Manager()
    with pytest.raises(ManagerMismatchError):
        a.apply(a.make_terminal(1), b.make_terminal(1), ADD)


@pytest.mark.parametrize("op, fn", [(ADD, np.add), (MUL, np.multiply), (SUB, np.subtract)])
def test_apply_matches_dense(manager, op, fn):
    rng = np.random.default_rng(7)
    for _ in range(10):
        x, y = random_vector(rng, 3), random_vector(rng, 3)
        x[rng.random(8) < 0.4] = 0
        u, v = vector_from_amplitudes(manager, x), vector_from_amplitudes(manager, y)
        result = manager.apply(u.handle, v.handle, op)
        assert_canonical(result)
        actual = to_dense_vector(type(u)(result, 3))
        assert_dense_close(actual, fn(x, y), 1e-12, op.name)


def test_apply_caches_do_not_change_results(manager):
    rng = np.random.default_rng(11)
    x, y = random_vector(rng, 4), random_vector(rng, 4)
    u, v = vector_from_amplitudes(manager, x), vector_from_amplitudes(manager, y)
    warm = manager.apply(u.handle, v.handle, MUL)
    again = manager.apply(u.handle, v.handle, MUL)
    manager.clear_caches()
    cold = manager.apply(u.handle, v.handle, MUL)
    assert warm.root == again.root == cold.root


def test_custom_ops_require_high_tags(manager):
    with pytest.raises(ValueError):
        binary_op(lambda f, a, b: a, tag=5)
    with pytest.raises(ValueError):
        unary_op(lambda f, a: a, tag=101)
    maximum = binary_op(lambda f, a, b: a if abs(a) >= abs(b) else b, name="max")
    x = np.array([1, -3, 2j, 0.5])
    y = np.array([2, 1, 1, 0.25])
    u, v = vector_from_amplitudes(manager, x), vector_from_amplitudes(manager, y)
    out = manager.apply(u.handle, v.handle, maximum)
    assert_dense_close(to_dense_vector(type(u)(out, 2)), np.array([2, -3, 2j, 0.5]), 0.0)


def test_map_terminals(manager):
    x = np.array([1 + 2j, -1j, 0, 3])
    u = vector_from_amplitudes(manager, x)
    conj = manager.map_terminals(u.handle, CONJ)
    mag = manager.map_terminals(u.handle, ABS2)
    assert_dense_close(to_dense_vector(type(u)(conj, 2)), np.conj(x), 0.0)
    assert_dense_close(to_dense_vector(type(u)(mag, 2)), np.abs(x) ** 2, 1e-15)


def test_counters_count_recursion_steps(manager):
    u = vector_from_amplitudes(manager, [1, 2, 3, 4])
    v = vector_from_amplitudes(manager, [5, 6, 7, 8])
    manager.counters.reset()
    manager.apply(u.handle, v.handle, ADD)
    assert manager.counters.apply_steps > 0
    assert manager.counters.total == sum(manager.counters.snapshot().values())
    manager.counters.reset()
    assert manager.counters.total == 0


def test_value_support_and_terminal_values(manager):
    assert manager.value(manager.constant(2.5)) == 2.5
    u = vector_from_amplitudes(manager, [0, 0, 1, -1])
    with pytest.raises(ValueError):
        manager.value(u.handle)
    assert manager.support(u.handle) == {Col(0), Col(1)}
    assert sorted(v.real for v in manager.terminal_values(u.handle)) == [-1, 0, 1]


def test_eval_and_restrict(manager):
    entries = np.arange(16).reshape(4, 4)
    m = matrix_from_entries(manager, entries)
    for r in range(4):
        for c in range(4):
            assert manager.eval(m.handle, [r >> 1, r & 1], [c >> 1, c & 1]) == entries[r, c]
    # missing trailing bits read as 0
    assert manager.eval(m.handle, [1], [1]) == entries[2, 2]
    upper_left = manager.restrict(m.handle, {Row(0): 0, Col(0): 0})
    assert Row(0) not in manager.support(upper_left)
    assert manager.eval(upper_left, [0, 1], [0, 1]) == entries[1, 1]


def test_transpose_variables(manager):
    rng = np.random.default_rng(3)
    dense = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    m = matrix_from_entries(manager, dense)
    t = manager.transpose_variables(m.handle)
    assert_canonical(t)
    assert_dense_close(to_dense_matrix(type(m)(t, 3)), dense.T, 0.0)


def test_shift_and_relabel(manager):
    u = vector_from_amplitudes(manager, [1, 2])
    shifted = manager.shift_variables(u.handle, 2)
    assert manager.support(shifted) == {Col(2)}
    with pytest.raises(ValueError):
        manager.shift_variables(u.handle, -1)
    moved = manager.relabel(u.handle, lambda var: Col(var.index + 1))
    assert manager.support(moved) == {Col(1)}


def test_relabel_rejects_order_violations(manager):
    u = vector_from_amplitudes(manager, [1, 2, 3, 4])
    with pytest.raises(OrderingError):
        manager.relabel(u.handle, lambda var: Col(1 - var.index))


def test_collect_keeps_live_handles(manager):
    rng = np.random.default_rng(5)
    keep = vector_from_amplitudes(manager, random_vector(rng, 4))
    before = to_dense_vector(keep)
    garbage = vector_from_amplitudes(manager, random_vector(rng, 4))
    garbage_nodes = manager.node_stats(garbage.handle).total
    del garbage
    gc.collect()
    removed = manager.collect()
    assert removed >= garbage_nodes - 2
    assert_canonical(keep.handle)
    assert_dense_close(to_dense_vector(keep), before, 0.0)


def test_maybe_collect_waits_for_growth(manager):
    assert manager.maybe_collect() == 0


def test_node_stats(manager):
    u = vector_from_amplitudes(manager, [1, 1, 1, -1])
    stats = manager.node_stats(u.handle)
    assert (stats.internal_count, stats.terminal_count, stats.total) == (2, 2, 4)
    assert len(manager.descendants(u.handle)) == 4


def test_dot_export(manager):
    u = vector_from_amplitudes(manager, [0.5, -0.5j])
    text = to_dot(u.handle, name="state")
    assert text.startswith("digraph state")
    assert "C0" in text
    assert "-0.5i" in text
    assert "dashed" in text
