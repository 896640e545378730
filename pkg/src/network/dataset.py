"""
Binary datasets shared by the derivative-free trainer and the backprop baseline
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from src.errors import ContractViolation, DimensionError, EmptyInputError
from src.network.quantum_perceptron import TrainingPair
from src.quantum.quantum_state import EncodingMode, encode_bits


@dataclass(frozen=True, eq=False)
class Dataset:
    """Rows of input bits with their target bits

    Args:
        inputs: ``(n_rows, n_inputs)`` array of 0/1
        targets: ``(n_rows, n_targets)`` array of 0/1
        name: Label used in logs and run ids
    """

    inputs: np.ndarray
    targets: np.ndarray
    name: str = "dataset"

    def __post_init__(self):
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=np.int64))
        targets = np.atleast_2d(np.asarray(self.targets, dtype=np.int64))
        if inputs.size == 0 or targets.size == 0:
            raise EmptyInputError("dataset has no rows")
        if inputs.shape[0] != targets.shape[0]:
            raise DimensionError("inputs and targets differ in row count", inputs.shape, targets.shape)
        for name, values in (("inputs", inputs), ("targets", targets)):
            if not np.isin(values, (0, 1)).all():
                raise ContractViolation(f"{name} must contain only 0 and 1")
        inputs.flags.writeable = False
        targets.flags.writeable = False
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    @property
    def n_rows(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.inputs.shape[1]

    @property
    def n_targets(self) -> int:
        return self.targets.shape[1]

    def input_dim(self, encoding: EncodingMode) -> int:
        """Dimension of the encoded input ket"""
        if encoding is EncodingMode.BASIS_TENSOR:
            return 2 ** self.n_inputs
        return self.n_inputs

    @property
    def label_dim(self) -> int:
        return 2 ** self.n_targets

    def pairs(self, encoding: EncodingMode = EncodingMode.BASIS_TENSOR) -> List[TrainingPair]:
        """Encoded training pairs; labels are always computational basis states"""
        return [
            TrainingPair(
                x=encode_bits(self.inputs[i], encoding),
                y=encode_bits(self.targets[i], EncodingMode.BASIS_TENSOR),
            )
            for i in range(self.n_rows)
        ]


def xor_dataset() -> Dataset:
    """Truth table of exclusive or: equal inputs give 0, unequal give 1"""
    inputs = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])
    targets = np.array([[0], [1], [1], [0]])
    return Dataset(inputs, targets, name="xor")
