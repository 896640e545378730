"""
Quantum perceptron: labelled outer products, SVD unitarization, forward map

The weight operator is ``W = sum_i |y_i><x_i|``. It is generally not
unitary, so it is decomposed as ``U S V^dagger`` and the forward operator
``F`` is taken either as ``U`` itself or as ``U V^dagger`` (the result of
replacing ``S`` by the identity). Rectangular weights are zero-padded to a
square ``D x D`` with ``D = max(out_dim, in_dim)`` first.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from src.errors import ContractViolation, DimensionError, EmptyInputError
from src.quantum.complex_linalg import (
    CMatrix,
    UnitaryMatrix,
    as_matrix,
    matvec,
    outer_product,
    pad_matrix,
    pad_vector,
    svd,
)
from src.quantum.quantum_state import Ket

logger = logging.getLogger(__name__)


class UnitarizeMode(Enum):
    """Which unitary the SVD of the weights is turned into"""

    U_ONLY = "u_only"
    UV_DAGGER = "uv_dagger"

    @classmethod
    def parse(cls, value: str) -> "UnitarizeMode":
        try:
            return cls(value.strip().lower())
        except ValueError:
            choices = ", ".join(mode.value for mode in cls)
            raise ValueError(f"unknown unitarize mode '{value}' (expected one of: {choices})")


@dataclass(frozen=True, eq=False)
class TrainingPair:
    """An input state and its label state"""

    x: Ket
    y: Ket

    def __post_init__(self):
        for name, state in (("input", self.x), ("label", self.y)):
            if not state.is_normalized():
                raise ContractViolation(f"{name} state is not normalized (norm {state.norm:.12f})")


def accumulate_weights(pairs: Sequence[TrainingPair]) -> CMatrix:
    """Sum of the label/input outer products, ``out_dim x in_dim``

    Raises:
        EmptyInputError: If ``pairs`` is empty
        DimensionError: If the pairs disagree on input or label dimension
    """
    pairs = list(pairs)
    if not pairs:
        raise EmptyInputError("cannot accumulate weights over an empty dataset")

    out_dim, in_dim = pairs[0].y.dim, pairs[0].x.dim
    w_hat = np.zeros((out_dim, in_dim), dtype=np.complex128)
    for pair in pairs:
        if pair.y.dim != out_dim or pair.x.dim != in_dim:
            raise DimensionError(
                "training pair dimensions differ from the first pair",
                (pair.y.dim, pair.x.dim), (out_dim, in_dim),
            )
        w_hat += outer_product(pair.y.amps, pair.x.amps)
    return as_matrix(w_hat)


def unitarize(w_hat: CMatrix, mode: UnitarizeMode = UnitarizeMode.U_ONLY) -> UnitaryMatrix:
    """Turn weights into a unitary through their SVD

    Args:
        w_hat: Weight matrix; padded with zeros to square if rectangular
        mode: ``U_ONLY`` returns ``U``; ``UV_DAGGER`` returns ``U V^dagger``

    Raises:
        NumericalFailure: If the SVD fails
    """
    w_hat = as_matrix(w_hat)
    dim = max(w_hat.shape)
    u, _, v = svd(pad_matrix(w_hat, dim))
    if mode is UnitarizeMode.U_ONLY:
        return u
    return UnitaryMatrix(u.matrix @ v.dagger)


@dataclass(frozen=True, eq=False)
class QuantumPerceptron:
    """Accumulated weights together with their unitary forward operator"""

    w_hat: CMatrix
    f_hat: UnitaryMatrix
    unitarize_mode: UnitarizeMode = UnitarizeMode.U_ONLY

    def __post_init__(self):
        w_hat = as_matrix(self.w_hat)
        if self.f_hat.dim != max(w_hat.shape):
            raise DimensionError("forward operator does not match padded weights",
                                 self.f_hat.matrix.shape, w_hat.shape)
        object.__setattr__(self, "w_hat", w_hat)

    @classmethod
    def from_pairs(cls, pairs: Sequence[TrainingPair],
                   mode: UnitarizeMode = UnitarizeMode.U_ONLY) -> "QuantumPerceptron":
        w_hat = accumulate_weights(pairs)
        return cls(w_hat, unitarize(w_hat, mode), mode)

    @property
    def dim(self) -> int:
        return self.f_hat.dim

    @property
    def out_dim(self) -> int:
        return self.w_hat.shape[0]

    @property
    def in_dim(self) -> int:
        return self.w_hat.shape[1]


def forward(p: QuantumPerceptron, x: Ket) -> Ket:
    """``F |x>``; inputs shorter than ``D`` are zero-padded first

    Raises:
        DimensionError: If ``x`` is longer than ``D``
        ContractViolation: If ``x`` is not normalized
    """
    if x.dim > p.dim:
        raise DimensionError("input longer than perceptron dimension", (x.dim,), p.f_hat.matrix.shape)
    if not x.is_normalized():
        raise ContractViolation(f"input state is not normalized (norm {x.norm:.12f})")
    return Ket(matvec(p.f_hat.matrix, pad_vector(x.amps, p.dim)))
