"""
Measurable operators: the elementwise sigmoid and Hermitian eigenprojection

The two modes are separate types and every function checks which one it was
given, so a sigmoid is never used where a projection is expected or the
other way round.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.special import expit

from src.errors import ContractViolation, DimensionError
from src.quantum.complex_linalg import CMatrix, UnitaryMatrix, as_matrix, hermitian_eig
from src.quantum.quantum_state import Ket, normalize

logger = logging.getLogger(__name__)


class MeasurableOperator:
    """Base type of the measurable operator ``M``"""

    kind = "abstract"


@dataclass(frozen=True)
class ElementwiseSigmoid(MeasurableOperator):
    """``M`` as a logistic squashing applied to each entry's real part"""

    kind = "sigmoid"


@dataclass(frozen=True, eq=False)
class HermitianProjection(MeasurableOperator):
    """``M`` as an observable; measuring collapses onto one of its eigenvectors

    Args:
        h: Hermitian matrix; its eigendecomposition is computed once here
    """

    h: CMatrix
    lambdas: np.ndarray = field(init=False, repr=False, compare=False)
    xi: UnitaryMatrix = field(init=False, repr=False, compare=False)

    kind = "hermitian"

    def __post_init__(self):
        h = as_matrix(self.h)
        lambdas, xi = hermitian_eig(h)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "xi", xi)

    @property
    def dim(self) -> int:
        return self.h.shape[0]


def _require(m: MeasurableOperator, expected: type) -> None:
    if not isinstance(m, expected):
        raise ContractViolation(f"operation needs a {expected.kind} operator, got {m.kind}")


def _outcome_probabilities(m: HermitianProjection, psi: Ket) -> np.ndarray:
    if psi.dim != m.dim:
        raise DimensionError("state does not match observable", (psi.dim,), m.h.shape)
    if not psi.is_normalized():
        raise ContractViolation(f"state is not normalized (norm {psi.norm:.12f})")
    amplitudes = m.xi.dagger @ psi.amps
    probs = np.abs(amplitudes) ** 2
    return probs / probs.sum()


def apply_elementwise(m: MeasurableOperator, a: CMatrix) -> CMatrix:
    """Entry (i, j) becomes ``1 / (1 + exp(-re(a[i, j])))`` with zero imaginary part

    Raises:
        ContractViolation: If ``m`` is not the sigmoid mode
    """
    _require(m, ElementwiseSigmoid)
    a = as_matrix(a)
    return as_matrix(expit(a.real).astype(np.complex128))


def project_to_eigenstate(m: MeasurableOperator, psi: Ket,
                          rng: np.random.Generator) -> Tuple[float, Ket]:
    """Measure ``psi`` and collapse it onto an eigenvector of ``m``

    Eigen-index ``i`` is drawn with probability ``|<xi_i|psi>|^2``.

    Returns:
        ``(lambda_i, xi_i)``

    Raises:
        ContractViolation: If ``psi`` is not normalized or ``m`` is not a projection
        DimensionError: If dimensions differ
    """
    _require(m, HermitianProjection)
    probs = _outcome_probabilities(m, psi)
    index = int(rng.choice(m.dim, p=probs))
    return float(m.lambdas[index]), Ket(m.xi.matrix[:, index])


def sample_eigenindices(m: MeasurableOperator, psi: Ket, rng: np.random.Generator,
                        size: int) -> np.ndarray:
    """Draw ``size`` independent measurement outcomes (eigen-indices) at once"""
    _require(m, HermitianProjection)
    probs = _outcome_probabilities(m, psi)
    return rng.choice(m.dim, size=size, p=probs)


def expectation(m: MeasurableOperator, psi: Ket) -> float:
    """``re(<psi|h|psi>)`` for a normalized ``psi``

    Raises:
        DimensionError: If ``psi`` and ``h`` differ in dimension
        ContractViolation: If ``psi`` is not normalized
    """
    _require(m, HermitianProjection)
    if psi.dim != m.dim:
        raise DimensionError("state does not match observable", (psi.dim,), m.h.shape)
    if not psi.is_normalized():
        raise ContractViolation(f"state is not normalized (norm {psi.norm:.12f})")
    return float(np.real(np.vdot(psi.amps, m.h @ psi.amps)))


def collapse_columns(m: MeasurableOperator, a: CMatrix, rng: np.random.Generator) -> CMatrix:
    """Projection-mode ``M`` on a matrix

    Every nonzero column is normalized, measured, and replaced by the
    collapsed eigenvector scaled back to the column's original norm. Zero
    columns stay zero.
    """
    _require(m, HermitianProjection)
    a = as_matrix(a)
    if a.shape[0] != m.dim:
        raise DimensionError("matrix rows do not match observable", a.shape, m.h.shape)
    collapsed = np.zeros(a.shape, dtype=np.complex128)
    for j in range(a.shape[1]):
        column = a[:, j]
        norm = float(np.linalg.norm(column))
        if norm == 0.0:
            continue
        _, eigenstate = project_to_eigenstate(m, Ket(column / norm), rng)
        collapsed[:, j] = eigenstate.amps * norm
    return as_matrix(collapsed)


def measure_matrix(m: MeasurableOperator, a: CMatrix,
                   rng: Optional[np.random.Generator] = None) -> CMatrix:
    """Apply whichever mode ``m`` is to a matrix

    Raises:
        ContractViolation: If a projection is requested without an rng
    """
    if isinstance(m, ElementwiseSigmoid):
        return apply_elementwise(m, a)
    if rng is None:
        raise ContractViolation("projection measurement needs a random source")
    return collapse_columns(m, a, rng)


def measure_ket(m: MeasurableOperator, k: Ket,
                rng: Optional[np.random.Generator] = None) -> Ket:
    """Apply ``m`` to a state and return the measured, normalized state"""
    if isinstance(m, ElementwiseSigmoid):
        # sigmoid outputs are strictly positive, so the norm is never zero
        return normalize(Ket(expit(k.amps.real).astype(np.complex128)))
    if rng is None:
        raise ContractViolation("projection measurement needs a random source")
    _, collapsed = project_to_eigenstate(m, normalize(k), rng)
    return collapsed
