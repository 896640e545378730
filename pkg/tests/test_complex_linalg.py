import numpy as np
import pytest
import scipy.linalg
from numpy.testing import assert_allclose

from src.errors import ContractViolation, DimensionError
from src.quantum.complex_linalg import (
    UnitaryMatrix,
    adjoint,
    as_matrix,
    hermitian_eig,
    is_hermitian,
    is_unitary,
    matmul,
    matvec,
    max_abs,
    outer_product,
    pad_matrix,
    pad_vector,
    random_hermitian,
    random_unitary,
    svd,
    tensor_product,
)


def random_complex(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def test_tensor_product_of_basis_states():
    assert_allclose(tensor_product([1, 0], [0, 1]), [0, 1, 0, 0])


def test_tensor_product_matches_nested_loop():
    rng = np.random.default_rng(1)
    a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    expected = [a[i] * b[j] for i in range(3) for j in range(2)]
    assert_allclose(tensor_product(a, b), expected)


def test_outer_product_examples():
    assert_allclose(outer_product([0, 1], [1, 0]), [[0, 0], [1, 0]])
    assert_allclose(outer_product([1, 0], [1, 0]), [[1, 0], [0, 0]])


def test_outer_product_conjugates_the_bra():
    rng = np.random.default_rng(2)
    y = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    expected = np.array([[y[i] * np.conj(x[j]) for j in range(2)] for i in range(3)])
    assert_allclose(outer_product(y, x), expected)


def test_matmul_matches_triple_loop():
    rng = np.random.default_rng(3)
    a, b = random_complex(rng, 3, 2), random_complex(rng, 2, 4)
    expected = np.zeros((3, 4), dtype=complex)
    for i in range(3):
        for j in range(4):
            for k in range(2):
                expected[i, j] += a[i, k] * b[k, j]
    assert_allclose(matmul(a, b), expected)


def test_identity_and_adjoint():
    rng = np.random.default_rng(4)
    a = random_complex(rng, 3, 5)
    x = rng.standard_normal(3) + 0j
    assert_allclose(matvec(np.eye(3), x), x)
    assert_allclose(adjoint(adjoint(a)), a)


def test_shape_mismatch_names_both_shapes():
    with pytest.raises(DimensionError, match=r"\(2, 3\) vs \(2, 2\)"):
        matmul(np.ones((2, 3)), np.ones((2, 2)))
    with pytest.raises(DimensionError):
        matvec(np.ones((2, 3)), np.ones(2))


def test_results_are_read_only():
    m = as_matrix([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        m[0, 0] = 5


def test_non_finite_entries_rejected():
    with pytest.raises(ContractViolation):
        as_matrix([[np.nan, 0], [0, 1]])


def test_svd_identity_and_rank_deficient():
    u, s, v = svd(np.eye(2))
    assert_allclose(s, [1, 1])
    assert_allclose(u.matrix @ v.dagger, np.eye(2), atol=1e-12)

    _, s, _ = svd(np.diag([3.0, 0.0]))
    assert_allclose(s, [3, 0], atol=1e-12)


def test_svd_singular_values_match_eigenvalues_of_gram_matrix():
    rng = np.random.default_rng(5)
    m = random_complex(rng, 4, 4)
    u, s, v = svd(m)
    expected = np.sqrt(np.sort(np.linalg.eigvalsh(m.conj().T @ m))[::-1])
    assert_allclose(s, expected, rtol=1e-10)
    assert max_abs(u.matrix @ np.diag(s) @ v.dagger - m) <= 1e-10


def test_svd_suite_over_random_shapes():
    rng = np.random.default_rng(6)
    for _ in range(100):
        rows, cols = rng.integers(2, 17, size=2)
        m = random_complex(rng, rows, cols)
        u, s, v = svd(m)
        sigma = np.zeros((rows, cols))
        sigma[: len(s), : len(s)] = np.diag(s)
        assert max_abs(u.matrix @ sigma @ v.dagger - m) <= 1e-10 * max(1.0, max_abs(m))
        assert is_unitary(u.matrix) and is_unitary(v.matrix)
        assert np.all(np.diff(s) <= 0)


def test_hermitian_eig_pauli_z():
    lambdas, xi = hermitian_eig(np.diag([1.0, -1.0]))
    assert_allclose(lambdas, [1, -1])
    assert_allclose(np.abs(xi.matrix), np.eye(2), atol=1e-12)


def test_hermitian_eig_pauli_x():
    lambdas, xi = hermitian_eig(np.array([[0, 1], [1, 0]]))
    assert_allclose(lambdas, [1, -1], atol=1e-12)
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    assert abs(np.vdot(plus, xi.matrix[:, 0])) == pytest.approx(1.0)
    assert abs(np.vdot(minus, xi.matrix[:, 1])) == pytest.approx(1.0)


def test_hermitian_eig_trace_identity():
    h = random_hermitian(5, np.random.default_rng(7))
    lambdas, xi = hermitian_eig(h)
    assert abs(np.trace(h).real - lambdas.sum()) <= 1e-10
    assert np.all(np.diff(lambdas) <= 0)
    assert_allclose(xi.matrix @ np.diag(lambdas) @ xi.dagger, h, atol=1e-10)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(ContractViolation):
        hermitian_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(DimensionError):
        hermitian_eig(np.ones((2, 3)))


def test_random_unitary_is_unitary_and_seeded():
    first = random_unitary(6, np.random.default_rng(8))
    second = random_unitary(6, np.random.default_rng(8))
    assert is_unitary(first.matrix)
    assert np.array_equal(first.matrix, second.matrix)


def test_unitary_matrix_checks_on_construction():
    with pytest.raises(ContractViolation):
        UnitaryMatrix(np.array([[1, 1], [0, 1]]))
    q, _ = scipy.linalg.qr(random_complex(np.random.default_rng(9), 3, 3))
    assert UnitaryMatrix(q).dim == 3


def test_is_hermitian():
    assert is_hermitian(random_hermitian(4, np.random.default_rng(10)))
    assert not is_hermitian(np.array([[0, 1j], [1j, 0]]))


def test_padding():
    assert_allclose(pad_vector([1, 2], 4), [1, 2, 0, 0])
    assert_allclose(pad_matrix([[1, 2]], 2), [[1, 2], [0, 0]])
    with pytest.raises(DimensionError):
        pad_vector([1, 2, 3], 2)


def test_tensor_product_is_associative():
    exact = tensor_product(tensor_product([1, 2], [0, 3]), [1j, -1])
    assert np.array_equal(exact, tensor_product([1, 2], tensor_product([0, 3], [1j, -1])))

    rng = np.random.default_rng(8)
    a, b, c = (rng.normal(size=n) + 1j * rng.normal(size=n) for n in (2, 3, 4))
    assert_allclose(tensor_product(tensor_product(a, b), c),
                    tensor_product(a, tensor_product(b, c)), atol=1e-12)


@pytest.mark.parametrize("dim", [2, 5, 8, 16])
def test_random_unitary_has_unit_singular_values(dim):
    u = random_unitary(dim, np.random.default_rng(dim))
    _, s, _ = svd(u.matrix)
    assert_allclose(s, np.ones(dim), atol=1e-10)
