"""QuiddMatrix / QuiddVector operations against numpy."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from support.assertions import assert_canonical, assert_dense_close, assert_scalar_close
from support.dense import H, kron_all, random_matrix, random_vector

from quidd_sim.core import Manager
from quidd_sim.errors import DimensionError, ManagerMismatchError, ZeroProbabilityError
from quidd_sim.linalg import (
    QuiddMatrix,
    QuiddVector,
    add,
    basis_state,
    conjugate,
    conjugate_transpose,
    constant,
    diagonal_matrix,
    diagonal_of,
    elementwise_mul,
    entry,
    identity,
    inner_product,
    lemma_formula_nodes,
    matmul,
    matrix_entry,
    matrix_from_entries,
    measure,
    norm_squared,
    pattern_indicator,
    pattern_projector,
    predicted_tensor_nodes,
    scalar_mul,
    sum_entries,
    tensor,
    tensor_all,
    to_dense_matrix,
    to_dense_vector,
    top_amplitudes,
    transpose,
    vector_from_amplitudes,
    zero,
)
from quidd_sim.numerics import PrecisionConfig

EXACT = PrecisionConfig(mantissa_bits=53, merge_epsilon=0.0)
# dyadic Gaussian values keep every product exact in double precision
EXACT_POOL = np.array([1, -1, 0.5, 2, 2j, -0.5j, 1 + 1j], dtype=complex)


@pytest.fixture
def manager():
    return Manager(PrecisionConfig.double())


def _matrix(manager: Manager, dense: np.ndarray) -> QuiddMatrix:
    return matrix_from_entries(manager, dense)


def test_builders(manager):
    assert_dense_close(to_dense_vector(basis_state(manager, "101")), np.eye(8)[5], 0.0)
    assert_dense_close(to_dense_matrix(identity(manager, 3)), np.eye(8), 0.0)
    assert manager.node_stats(identity(manager, 3).handle).total == 3 * 3 + 2
    assert_dense_close(to_dense_vector(zero(manager, 2, vector=True)), np.zeros(4), 0.0)
    assert_dense_close(to_dense_matrix(constant(manager, 2, 1)), np.full((2, 2), 2), 0.0)
    with pytest.raises(DimensionError):
        vector_from_amplitudes(manager, [1, 2, 3])
    with pytest.raises(DimensionError):
        matrix_from_entries(manager, [[1, 2, 3]] * 3)


def test_vectors_are_row_free(manager):
    v = vector_from_amplitudes(manager, np.arange(8))
    assert v.row_free()
    assert to_dense_vector(v).tolist() == list(range(8))


def test_tensor_matches_kron(manager):
    rng = np.random.default_rng(1)
    for _ in range(10):
        a, b = random_matrix(rng, 1), random_matrix(rng, 2)
        result = tensor(_matrix(manager, a), _matrix(manager, b))
        assert result.qubits == 3
        assert_canonical(result.handle)
        assert_dense_close(to_dense_matrix(result), np.kron(a, b), 1e-12, "matrix tensor")
    x, y = random_vector(rng, 2), random_vector(rng, 1)
    v = tensor(vector_from_amplitudes(manager, x), vector_from_amplitudes(manager, y))
    assert_dense_close(to_dense_vector(v), np.kron(x, y), 1e-12, "vector tensor")


def test_tensor_rejects_mixed_operands(manager):
    with pytest.raises(DimensionError):
        tensor(identity(manager, 1), basis_state(manager, "0"))
    with pytest.raises(ManagerMismatchError):
        tensor(identity(manager, 1), identity(Manager(), 1))


def test_add_and_elementwise(manager):
    rng = np.random.default_rng(2)
    a, b = random_matrix(rng, 2), random_matrix(rng, 2)
    qa, qb = _matrix(manager, a), _matrix(manager, b)
    assert_dense_close(to_dense_matrix(add(qa, qb)), a + b, 1e-12)
    assert_dense_close(to_dense_matrix(elementwise_mul(qa, qb)), a * b, 1e-12)
    assert_dense_close(to_dense_matrix(scalar_mul(2j, qa)), 2j * a, 1e-12)
    with pytest.raises(DimensionError):
        add(qa, identity(manager, 3))


def test_transpose_and_conjugate(manager):
    rng = np.random.default_rng(4)
    a = random_matrix(rng, 3)
    qa = _matrix(manager, a)
    assert_dense_close(to_dense_matrix(transpose(qa)), a.T, 0.0)
    assert_dense_close(to_dense_matrix(conjugate(qa)), a.conj(), 0.0)
    assert_dense_close(to_dense_matrix(conjugate_transpose(qa)), a.conj().T, 0.0)


@pytest.mark.parametrize("qubits", [1, 2, 3])
def test_matmul_matches_dense(manager, qubits):
    rng = np.random.default_rng(10 + qubits)
    for _ in range(15):
        a, b = random_matrix(rng, qubits, 0.5), random_matrix(rng, qubits, 0.5)
        product = matmul(_matrix(manager, a), _matrix(manager, b))
        assert isinstance(product, QuiddMatrix)
        assert_canonical(product.handle)
        assert_dense_close(to_dense_matrix(product), a @ b, 1e-12, "matrix product")
        x = random_vector(rng, qubits)
        image = matmul(_matrix(manager, a), vector_from_amplitudes(manager, x))
        assert isinstance(image, QuiddVector)
        assert image.row_free()
        assert_dense_close(to_dense_vector(image), a @ x, 1e-12, "matrix-vector product")


def test_matmul_with_skipped_levels(manager):
    # constant and identity-like operands skip contraction levels
    ones = constant(manager, 1, 3)
    x = np.arange(1, 9, dtype=complex)
    v = vector_from_amplitudes(manager, x)
    assert_dense_close(to_dense_vector(matmul(ones, v)), np.full(8, x.sum()), 1e-12)
    assert_dense_close(to_dense_matrix(matmul(ones, ones)), np.full((8, 8), 8), 1e-12)
    assert_dense_close(to_dense_vector(matmul(identity(manager, 3), v)), x, 0.0)


def test_matmul_dimension_checks(manager):
    with pytest.raises(DimensionError):
        matmul(identity(manager, 2), basis_state(manager, "0"))
    with pytest.raises(DimensionError):
        matmul(basis_state(manager, "0"), identity(manager, 1))  # type: ignore[arg-type]


def test_mixed_product_property(manager):
    rng = np.random.default_rng(21)
    for _ in range(5):
        a, b, c, d = (random_matrix(rng, 1) for _ in range(4))
        qa, qb, qc, qd = (_matrix(manager, m) for m in (a, b, c, d))
        left = matmul(tensor(qa, qb), tensor(qc, qd))
        right = tensor(matmul(qa, qc), matmul(qb, qd))
        assert left.handle == right.handle


def test_sum_and_norm(manager):
    rng = np.random.default_rng(6)
    x = random_vector(rng, 3)
    v = vector_from_amplitudes(manager, x)
    assert_scalar_close(manager.field, sum_entries(v), x.sum(), 1e-12)
    assert abs(norm_squared(v) - np.vdot(x, x).real) < 1e-12
    assert_scalar_close(manager.field, sum_entries(identity(manager, 4)), 16, 0.0)
    assert_scalar_close(manager.field, sum_entries(constant(manager, 1, 2, vector=True)), 4, 0.0)


def test_inner_product_conjugates_left(manager):
    rng = np.random.default_rng(8)
    x, y = random_vector(rng, 3), random_vector(rng, 3)
    u, v = vector_from_amplitudes(manager, x), vector_from_amplitudes(manager, y)
    assert_scalar_close(manager.field, inner_product(u, v), np.vdot(x, y), 1e-12)
    assert_scalar_close(manager.field, inner_product(u, u), np.vdot(x, x), 1e-12)


def test_measure_with_projector(manager):
    x = np.array([0.6, 0, 0, 0.8j])
    state = vector_from_amplitudes(manager, x)
    outcome = measure(state, pattern_projector(manager, "1", 2))
    assert abs(outcome.probability - 0.64) < 1e-12
    assert_dense_close(to_dense_vector(outcome.post_state), np.array([0, 0, 0, 1j]), 1e-12)
    with pytest.raises(ZeroProbabilityError):
        measure(state, pattern_projector(manager, "01"))


def test_diagonal_forms(manager):
    d = np.array([1, -1, 2j, 0.5])
    v = vector_from_amplitudes(manager, d)
    m = diagonal_matrix(v)
    assert_dense_close(to_dense_matrix(m), np.diag(d), 0.0)
    assert diagonal_of(m).handle == v.handle
    rng = np.random.default_rng(9)
    a = random_matrix(rng, 2)
    assert_dense_close(to_dense_vector(diagonal_of(_matrix(manager, a))), np.diag(a), 0.0)


def test_pattern_indicator_and_projector(manager):
    ind = pattern_indicator(manager, "1d0", 4)
    dense = to_dense_vector(ind)
    expected = [1.0 if (i >> 3) & 1 == 1 and (i >> 1) & 1 == 0 else 0.0 for i in range(16)]
    assert dense.tolist() == expected
    assert manager.node_stats(ind.handle).total == 4
    proj = pattern_projector(manager, "1d0", 4)
    assert_dense_close(to_dense_matrix(proj), np.diag(expected), 0.0)
    with pytest.raises(DimensionError):
        pattern_indicator(manager, "101", 2)


def test_element_access(manager):
    x = np.array([0.1, -0.7, 0.7, 0.1j])
    v = vector_from_amplitudes(manager, x)
    assert [entry(v, i) for i in range(4)] == list(x)
    a = np.arange(16).reshape(4, 4)
    m = _matrix(manager, a)
    assert matrix_entry(m, 2, 3) == a[2, 3]
    top = top_amplitudes(v, 3)
    assert [index for index, _ in top] == [1, 2, 0]


def test_top_amplitudes_expands_free_qubits(manager):
    v = constant(manager, 0.5, 2, vector=True)
    assert isinstance(v, QuiddVector)
    assert [index for index, _ in top_amplitudes(v, 3)] == [0, 1, 2]


def _random_factor(manager: Manager, rng: np.random.Generator) -> QuiddMatrix | QuiddVector:
    qubits = int(rng.integers(1, 3))
    size = 1 << qubits
    # few distinct values so scaled copies coincide
    values = EXACT_POOL[rng.integers(0, 3 if rng.random() < 0.5 else len(EXACT_POOL), size=size * size)]
    values[rng.random(size * size) < 0.2] = 0
    return matrix_from_entries(manager, values.reshape(size, size))


def test_predicted_tensor_nodes_is_exact():
    manager = Manager(EXACT)
    rng = np.random.default_rng(2024)
    for trial in range(50):
        factors = [_random_factor(manager, rng) for _ in range(int(rng.integers(1, 9)))]
        product = tensor_all(factors)
        actual = manager.node_stats(product.handle).total
        assert predicted_tensor_nodes(factors) == actual, f"trial {trial}"
        assert lemma_formula_nodes(factors) >= actual


def test_lemma_formula_overcounts_with_zero_terminals():
    manager = Manager(EXACT)
    a = vector_from_amplitudes(manager, [0, 1])
    b = vector_from_amplitudes(manager, [1, 2])
    actual = manager.node_stats(tensor(a, b).handle).total
    assert actual == 5
    assert predicted_tensor_nodes([a, b]) == 5
    assert lemma_formula_nodes([a, b]) == 6


def test_tensor_power_of_persistent_gate_grows_linearly():
    manager = Manager()
    field = manager.field
    c = field.sqrt(field.real(Fraction(1, 2)))
    h = matrix_from_entries(manager, [[c, c], [c, field.neg(c)]])
    sizes = range(2, 21)
    totals = [manager.node_stats(tensor_all([h] * n).handle).total for n in sizes]
    steps = {b - a for a, b in zip(totals, totals[1:])}
    assert steps == {4}
    assert totals == [4 * n for n in sizes]
    dense = to_dense_matrix(tensor_all([h] * 3))
    assert_dense_close(dense, kron_all([H] * 3), 1e-12)


@pytest.mark.parametrize(
    "entries",
    [[[0, -1j], [1j, 0]], [[1, 0], [0, -1]], [[0, 0], [0, -1]], [[2, 2j], [-2j, -2]]],
    ids=["Y", "Z", "scaled-projector", "scaled-U4"],
)
def test_tensor_powers_with_persistent_terminals_are_affine(entries):
    manager = Manager(EXACT)
    m = matrix_from_entries(manager, entries)
    totals = [manager.node_stats(tensor_all([m] * n).handle).total for n in range(2, 21)]
    assert len({b - a for a, b in zip(totals, totals[1:])}) == 1


def test_tensor_power_of_non_persistent_gate_grows_faster():
    manager = Manager(EXACT)
    m = matrix_from_entries(manager, [[1, 2], [2, 1]])
    totals = [manager.node_stats(tensor_all([m] * n).handle).total for n in range(1, 7)]
    steps = [b - a for a, b in zip(totals, totals[1:])]
    assert all(later > earlier for earlier, later in zip(steps, steps[1:]))
