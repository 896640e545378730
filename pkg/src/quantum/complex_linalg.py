"""
Dense complex linear algebra used by every other module

Vectors and matrices are plain numpy ``complex128`` arrays (``CVector`` is
1-D, ``CMatrix`` is 2-D, row-major). Decompositions go through LAPACK via
scipy and are checked against their own post-conditions before returning.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from src.errors import ContractViolation, DimensionError, NumericalFailure

logger = logging.getLogger(__name__)

CVector = np.ndarray
CMatrix = np.ndarray

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-10


def as_vector(values) -> CVector:
    """Convert a sequence to a read-only complex vector

    Args:
        values: Anything numpy can turn into a 1-D array

    Returns:
        A ``complex128`` vector

    Raises:
        DimensionError: If the input is not 1-D or is empty
        ContractViolation: If an entry is NaN or infinite
    """
    vector = np.array(values, dtype=np.complex128)
    if vector.ndim != 1 or vector.size == 0:
        raise DimensionError("expected a non-empty vector", vector.shape, ("dim",))
    if not np.all(np.isfinite(vector)):
        raise ContractViolation("vector has non-finite entries")
    vector.flags.writeable = False
    return vector


def as_matrix(values) -> CMatrix:
    """Convert nested sequences to a read-only complex matrix

    Raises:
        DimensionError: If the input is not 2-D or has an empty side
        ContractViolation: If an entry is NaN or infinite
    """
    matrix = np.array(values, dtype=np.complex128)
    if matrix.ndim != 2 or 0 in matrix.shape:
        raise DimensionError("expected a non-empty matrix", matrix.shape, ("rows", "cols"))
    if not np.all(np.isfinite(matrix)):
        raise ContractViolation("matrix has non-finite entries")
    matrix.flags.writeable = False
    return matrix


def max_abs(matrix: np.ndarray) -> float:
    """Largest entry modulus (the max-norm used for every tolerance here)"""
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


def is_unitary(matrix: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    """Check ``U U^dagger = I`` entrywise within ``tol``"""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    identity = np.eye(matrix.shape[0])
    return max_abs(matrix @ matrix.conj().T - identity) <= tol


def is_hermitian(matrix: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    """Check ``H = H^dagger`` entrywise within ``tol``"""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return max_abs(matrix - matrix.conj().T) <= tol


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Square complex matrix whose unitarity was checked at construction"""

    matrix: CMatrix

    def __post_init__(self):
        matrix = as_matrix(self.matrix)
        if matrix.shape[0] != matrix.shape[1]:
            raise DimensionError("unitary matrix must be square", matrix.shape, matrix.shape[::-1])
        if not is_unitary(matrix):
            deviation = max_abs(matrix @ matrix.conj().T - np.eye(matrix.shape[0]))
            raise ContractViolation(f"matrix is not unitary (max deviation {deviation:.3e})")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dagger(self) -> CMatrix:
        return adjoint(self.matrix)


def tensor_product(a: CVector, b: CVector) -> CVector:
    """Kronecker product; entry ``i*len(b) + j`` is ``a[i]*b[j]``"""
    return as_vector(np.kron(as_vector(a), as_vector(b)))


def outer_product(y: CVector, x: CVector) -> CMatrix:
    """The rank-1 operator ``|y><x|``; entry (i, j) is ``y[i] * conj(x[j])``"""
    return as_matrix(np.outer(as_vector(y), as_vector(x).conj()))


def adjoint(a: CMatrix) -> CMatrix:
    """Conjugate transpose"""
    return as_matrix(as_matrix(a).conj().T)


def matmul(a: CMatrix, b: CMatrix) -> CMatrix:
    """Matrix product with a shape check

    Raises:
        DimensionError: If ``a.cols != b.rows``
    """
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError("cannot multiply matrices", a.shape, b.shape)
    return as_matrix(a @ b)


def matvec(a: CMatrix, x: CVector) -> CVector:
    """Matrix-vector product with a shape check

    Raises:
        DimensionError: If ``a.cols != x.dim``
    """
    a, x = as_matrix(a), as_vector(x)
    if a.shape[1] != x.shape[0]:
        raise DimensionError("cannot apply matrix to vector", a.shape, x.shape)
    return as_vector(a @ x)


def pad_vector(x: CVector, dim: int) -> CVector:
    """Zero-pad ``x`` to ``dim`` entries

    Raises:
        DimensionError: If ``x`` is already longer than ``dim``
    """
    x = as_vector(x)
    if x.shape[0] > dim:
        raise DimensionError("vector longer than padding target", x.shape, (dim,))
    padded = np.zeros(dim, dtype=np.complex128)
    padded[: x.shape[0]] = x
    return as_vector(padded)


def pad_matrix(m: CMatrix, dim: int) -> CMatrix:
    """Zero-pad ``m`` into the top-left corner of a ``dim x dim`` matrix"""
    m = as_matrix(m)
    if m.shape[0] > dim or m.shape[1] > dim:
        raise DimensionError("matrix larger than padding target", m.shape, (dim, dim))
    padded = np.zeros((dim, dim), dtype=np.complex128)
    padded[: m.shape[0], : m.shape[1]] = m
    return as_matrix(padded)


def _lapack_svd(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # gesdd is fast but occasionally fails to converge; gesvd is the fallback
    try:
        return scipy.linalg.svd(m, full_matrices=True, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        logger.debug("gesdd did not converge on %s matrix, retrying with gesvd", m.shape)
    try:
        return scipy.linalg.svd(m, full_matrices=True, lapack_driver="gesvd")
    except np.linalg.LinAlgError as e:
        raise NumericalFailure(f"SVD did not converge: {e}") from e


def svd(m: CMatrix) -> Tuple[UnitaryMatrix, np.ndarray, UnitaryMatrix]:
    """Full singular value decomposition ``m = U diag(s) V^dagger``

    Args:
        m: Any finite complex matrix

    Returns:
        ``(u, s, v)`` with ``u`` rows x rows, ``v`` cols x cols, and ``s`` the
        ``min(rows, cols)`` singular values in non-increasing order

    Raises:
        NumericalFailure: If LAPACK does not converge or the reconstruction
            misses the tolerance
    """
    m = as_matrix(m)
    u, s, vh = _lapack_svd(np.array(m))

    order = np.argsort(-s, kind="stable")
    if np.any(order != np.arange(s.shape[0])):
        k = s.shape[0]
        u = u.copy()
        vh = vh.copy()
        u[:, :k] = u[:, order]
        vh[:k, :] = vh[order, :]
        s = s[order]

    sigma = np.zeros(m.shape, dtype=np.complex128)
    sigma[: s.shape[0], : s.shape[0]] = np.diag(s)
    residual = max_abs(u @ sigma @ vh - m)
    if residual > RECONSTRUCTION_TOL * max(1.0, max_abs(m)):
        raise NumericalFailure(f"SVD reconstruction residual {residual:.3e} above tolerance")

    try:
        return UnitaryMatrix(u), s.astype(np.float64), UnitaryMatrix(vh.conj().T)
    except ContractViolation as e:
        raise NumericalFailure(f"SVD factors lost unitarity: {e}") from e


def hermitian_eig(h: CMatrix) -> Tuple[np.ndarray, UnitaryMatrix]:
    """Eigendecomposition of a Hermitian matrix

    Args:
        h: Square matrix, Hermitian within 1e-10

    Returns:
        ``(lambdas, xi)`` with real eigenvalues in non-increasing order and the
        matching orthonormal eigenvectors as the columns of ``xi``

    Raises:
        DimensionError: If ``h`` is not square
        ContractViolation: If ``h`` is not Hermitian
        NumericalFailure: If LAPACK does not converge
    """
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionError("Hermitian matrix must be square", h.shape, h.shape[::-1])
    if not is_hermitian(h):
        raise ContractViolation(
            f"matrix is not Hermitian (max deviation {max_abs(h - h.conj().T):.3e})"
        )

    symmetric = (h + h.conj().T) / 2
    try:
        lambdas, xi = scipy.linalg.eigh(symmetric)
    except np.linalg.LinAlgError as e:
        raise NumericalFailure(f"Hermitian eigendecomposition did not converge: {e}") from e

    lambdas = lambdas[::-1].copy()
    xi = xi[:, ::-1].copy()
    try:
        return lambdas, UnitaryMatrix(xi)
    except ContractViolation as e:
        raise NumericalFailure(f"eigenvectors lost orthonormality: {e}") from e


def random_unitary(n: int, rng: np.random.Generator) -> UnitaryMatrix:
    """Haar-random ``n x n`` unitary from the QR of a complex Gaussian matrix

    The phases of ``diag(R)`` are folded back into ``Q`` so the result is
    distributed by the Haar measure rather than biased by the QR convention.
    """
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = scipy.linalg.qr(z)
    d = np.diag(r)
    phases = d / np.abs(d)
    return UnitaryMatrix(q * phases)


def random_hermitian(n: int, rng: np.random.Generator) -> CMatrix:
    """Draw an ``n x n`` Hermitian matrix from the Gaussian unitary ensemble"""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    return as_matrix((z + z.conj().T) / 2)
