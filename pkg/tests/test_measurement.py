import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.stats import chisquare

from src.errors import ContractViolation, DimensionError
from src.quantum.complex_linalg import random_hermitian
from src.quantum.measurement import (
    ElementwiseSigmoid,
    HermitianProjection,
    apply_elementwise,
    collapse_columns,
    expectation,
    measure_ket,
    measure_matrix,
    project_to_eigenstate,
    sample_eigenindices,
)
from src.quantum.quantum_state import Ket, basis_ket

PAULI_Z = np.diag([1.0, -1.0])
PLUS = Ket(np.array([1, 1]) / np.sqrt(2))


def test_sigmoid_of_zeros_is_half():
    assert_allclose(apply_elementwise(ElementwiseSigmoid(), np.zeros((2, 2))), 0.5)


def test_sigmoid_saturates():
    assert abs(apply_elementwise(ElementwiseSigmoid(), [[100.0]])[0, 0] - 1.0) <= 1e-12


def test_sigmoid_matches_scalar_values():
    result = apply_elementwise(ElementwiseSigmoid(), [[1, -1], [0, 2]])
    assert_allclose(result, [[0.7310586, 0.2689414], [0.5, 0.8807971]], atol=1e-7)
    assert np.all(result.imag == 0)


def test_sigmoid_uses_real_part_only():
    result = apply_elementwise(ElementwiseSigmoid(), [[5j, 1 + 3j]])
    assert_allclose(result, [[0.5, 1 / (1 + np.exp(-1))]])


def test_modes_are_not_interchangeable():
    projection = HermitianProjection(PAULI_Z)
    with pytest.raises(ContractViolation):
        apply_elementwise(projection, np.eye(2))
    with pytest.raises(ContractViolation):
        project_to_eigenstate(ElementwiseSigmoid(), basis_ket(0, 2), np.random.default_rng(0))


def test_projection_of_eigenstate_is_certain():
    rng = np.random.default_rng(0)
    for _ in range(20):
        value, collapsed = project_to_eigenstate(HermitianProjection(PAULI_Z), basis_ket(0, 2), rng)
        assert value == 1.0
        assert_allclose(np.abs(collapsed.amps), [1, 0])


def test_projection_of_superposition_is_balanced():
    rng = np.random.default_rng(1)
    projection = HermitianProjection(PAULI_Z)
    outcomes = [project_to_eigenstate(projection, PLUS, rng)[0] for _ in range(10_000)]
    assert np.mean(np.array(outcomes) == 1.0) == pytest.approx(0.5, abs=0.02)


def test_projection_of_random_observable_eigenvector():
    projection = HermitianProjection(random_hermitian(4, np.random.default_rng(2)))
    xi_2 = Ket(projection.xi.matrix[:, 2])
    rng = np.random.default_rng(3)
    for _ in range(20):
        value, collapsed = project_to_eigenstate(projection, xi_2, rng)
        assert value == pytest.approx(projection.lambdas[2])
        assert abs(np.vdot(collapsed.amps, xi_2.amps)) == pytest.approx(1.0)


def test_projection_needs_normalized_state():
    with pytest.raises(ContractViolation):
        project_to_eigenstate(HermitianProjection(PAULI_Z), Ket([1, 1]), np.random.default_rng(0))


def test_expectation_pauli_z():
    projection = HermitianProjection(PAULI_Z)
    assert expectation(projection, basis_ket(0, 2)) == pytest.approx(1.0)
    assert expectation(projection, PLUS) == pytest.approx(0.0, abs=1e-12)


def test_expectation_matches_sampled_mean():
    rng = np.random.default_rng(4)
    projection = HermitianProjection(random_hermitian(4, rng))
    amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    psi = Ket(amps / np.linalg.norm(amps))

    outcomes = projection.lambdas[sample_eigenindices(projection, psi, rng, 1_000_000)]
    standard_error = outcomes.std() / np.sqrt(outcomes.size)
    assert abs(outcomes.mean() - expectation(projection, psi)) <= 4 * standard_error


def test_expectation_dimension_mismatch():
    with pytest.raises(DimensionError):
        expectation(HermitianProjection(PAULI_Z), basis_ket(0, 4))


def test_collapse_columns_keeps_norms_and_zero_columns():
    projection = HermitianProjection(random_hermitian(3, np.random.default_rng(5)))
    a = np.array([[2, 0], [0, 0], [0, 0]], dtype=complex)
    collapsed = collapse_columns(projection, a, np.random.default_rng(6))
    assert np.linalg.norm(collapsed[:, 0]) == pytest.approx(2.0)
    assert_allclose(collapsed[:, 1], 0)


def test_measure_dispatches_on_mode():
    assert_allclose(measure_matrix(ElementwiseSigmoid(), np.zeros((2, 2))), 0.5)
    with pytest.raises(ContractViolation):
        measure_matrix(HermitianProjection(PAULI_Z), np.eye(2))

    measured = measure_ket(ElementwiseSigmoid(), basis_ket(0, 2))
    assert measured.is_normalized()
    collapsed = measure_ket(HermitianProjection(PAULI_Z), Ket([2, 0]), np.random.default_rng(0))
    assert_allclose(np.abs(collapsed.amps), [1, 0])


def test_sigmoid_is_monotone_in_the_real_part():
    grid = np.linspace(-20.0, 20.0, 401)
    noisy = grid + 1j * np.random.default_rng(9).normal(size=grid.size)
    result = apply_elementwise(ElementwiseSigmoid(), noisy[np.newaxis, :])[0].real
    assert np.all(np.diff(result) > 0)
    assert np.all((result > 0) & (result < 1))


@pytest.mark.parametrize("dim", [2, 8])
def test_projection_frequencies_pass_chi_square(dim):
    rng = np.random.default_rng(20 + dim)
    projection = HermitianProjection(random_hermitian(dim, rng))
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    psi = Ket(amps / np.linalg.norm(amps))

    draws = 100_000
    counts = np.bincount(sample_eigenindices(projection, psi, rng, draws), minlength=dim)
    probs = np.abs(projection.xi.matrix.conj().T @ psi.amps) ** 2
    probs /= probs.sum()
    assert chisquare(counts, f_exp=probs * draws).pvalue >= 0.01


def test_expectation_lies_within_the_spectrum():
    rng = np.random.default_rng(10)
    projection = HermitianProjection(random_hermitian(5, rng))
    low, high = projection.lambdas.min(), projection.lambdas.max()
    for _ in range(50):
        amps = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        value = expectation(projection, Ket(amps / np.linalg.norm(amps)))
        assert low - 1e-12 <= value <= high + 1e-12
