"""
Kets, computational basis states and the encoding of bit strings as states
"""

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from src.errors import ContractViolation, DegenerateInputError, EmptyInputError, RangeError
from src.quantum.complex_linalg import CVector, as_vector, tensor_product

NORM_TOL = 1e-10


class EncodingMode(Enum):
    """How a classical bit string becomes a ket"""

    BASIS_TENSOR = "basis_tensor"
    RAW_VECTOR = "raw_vector"

    @classmethod
    def parse(cls, value: str) -> "EncodingMode":
        try:
            return cls(value.strip().lower())
        except ValueError:
            choices = ", ".join(mode.value for mode in cls)
            raise ValueError(f"unknown encoding '{value}' (expected one of: {choices})")


@dataclass(frozen=True, eq=False)
class Ket:
    """Column state vector ``|psi>``"""

    amps: CVector

    def __post_init__(self):
        object.__setattr__(self, "amps", as_vector(self.amps))

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(float(np.sum(np.abs(self.amps) ** 2)) - 1.0) <= tol

    def __len__(self) -> int:
        return self.dim


def basis_ket(index: int, dim: int) -> Ket:
    """Computational basis state ``|index>`` in ``dim`` dimensions

    Raises:
        RangeError: If ``index`` is negative or not below ``dim``
    """
    if dim < 1:
        raise RangeError(f"basis dimension must be positive, got {dim}")
    if index < 0 or index >= dim:
        raise RangeError(f"basis index {index} out of range for dimension {dim}")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return Ket(amps)


def normalize(k: Ket) -> Ket:
    """Scale ``k`` to unit Euclidean norm

    Raises:
        DegenerateInputError: If ``k`` is the zero vector
    """
    norm = k.norm
    if norm == 0.0:
        raise DegenerateInputError("cannot normalize the zero vector")
    return Ket(k.amps / norm)


def encode_bits(bits: Sequence[int], mode: EncodingMode = EncodingMode.BASIS_TENSOR) -> Ket:
    """Encode a bit string as a ket

    BasisTensor gives ``|b_0> (x) |b_1> (x) ...`` which equals
    ``basis_ket(int(bits, 2), 2**k)``. RawVector uses the bits as real
    amplitudes and normalizes them; the all-zero string maps to the uniform
    state so that it stays representable.

    Raises:
        EmptyInputError: If ``bits`` is empty
        ValueError: If an entry is not 0 or 1
    """
    bits = [int(b) for b in bits]
    if not bits:
        raise EmptyInputError("cannot encode an empty bit string")
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"bit string must contain only 0 and 1, got {bits}")

    if mode is EncodingMode.BASIS_TENSOR:
        state = basis_ket(bits[0], 2).amps
        for bit in bits[1:]:
            state = tensor_product(state, basis_ket(bit, 2).amps)
        return Ket(state)

    amps = np.array(bits, dtype=np.complex128)
    if not amps.any():
        amps = np.ones(len(bits), dtype=np.complex128)
    return normalize(Ket(amps))


def born_probabilities(k: Ket) -> np.ndarray:
    """Measurement probabilities ``|amps[i]|^2`` of a normalized ket

    Raises:
        ContractViolation: If ``k`` is not normalized within 1e-10
    """
    if not k.is_normalized():
        raise ContractViolation(f"ket is not normalized (norm {k.norm:.12f})")
    return np.abs(k.amps) ** 2
