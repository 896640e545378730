"""
Derivative-free training of a layered quantum perceptron network

Every layer is updated locally with ``W_new = M{U Y - W_old}``, where ``U``
is the unitarized old weight matrix and ``Y`` aggregates the forward images
of the layer's input batch. Labels enter once, when the output layer is
accumulated from the raw dataset kets; the opt-in refit variant accumulates
the output layer again every iteration.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.errors import ConfigError, DimensionError, EmptyInputError, RangeError
from src.network.dataset import Dataset
from src.network.metrics import first_full_accuracy, loss_plateau_iteration, score_outputs
from src.network.ops_counter import OpsCounter
from src.network.quantum_perceptron import (
    TrainingPair,
    UnitarizeMode,
    accumulate_weights,
    unitarize,
)
from src.quantum.complex_linalg import (
    CMatrix,
    UnitaryMatrix,
    as_matrix,
    matmul,
    matvec,
    outer_product,
    pad_matrix,
    pad_vector,
    random_unitary,
)
from src.quantum.measurement import (
    ElementwiseSigmoid,
    HermitianProjection,
    MeasurableOperator,
    measure_ket,
    measure_matrix,
)
from src.quantum.quantum_state import EncodingMode, Ket, born_probabilities

logger = logging.getLogger(__name__)

POST_SELECTION_FLOOR = 1e-12
LOSS_KINDS = ("l1_average",)


class OutputUpdate(Enum):
    """How the output layer moves each iteration

    ``DF_UPDATE`` treats it like every other layer. ``REFIT`` re-accumulates it
    from the current images of every dataset row and their labels instead.
    """

    DF_UPDATE = "df_update"
    REFIT = "refit"

    @classmethod
    def parse(cls, value: str) -> "OutputUpdate":
        try:
            return cls(value.strip().lower())
        except ValueError:
            choices = ", ".join(mode.value for mode in cls)
            raise ValueError(f"unknown output update '{value}' (expected one of: {choices})")


@dataclass(frozen=True)
class TrainerConfig:
    """Settings of one derivative-free training run

    Args:
        layer_dims: State dimension entering each layer plus the output dimension
        unitarize_mode: How weights become the forward unitary
        measurable: One operator for every layer, or one per layer
        max_iterations: Number of training iterations (0 gives empty histories)
        accuracy_cutoff: Decision threshold for decoded outputs
        loss_kind: Only the average L1 deviation is supported
        seed: Root seed of the init, sampler and measurement streams
        convergence_eps: Loss change below which an iteration counts as flat
        encoding: How input bit strings become kets
        batch_size: Training instances drawn per iteration
        output_update: Whether the output layer takes the local update or a refit
    """

    layer_dims: Tuple[int, ...] = (4, 4, 2)
    unitarize_mode: UnitarizeMode = UnitarizeMode.U_ONLY
    measurable: Union[MeasurableOperator, Tuple[MeasurableOperator, ...]] = field(
        default_factory=ElementwiseSigmoid
    )
    max_iterations: int = 100
    accuracy_cutoff: float = 0.5
    loss_kind: str = "l1_average"
    seed: int = 0
    convergence_eps: float = 1e-3
    encoding: EncodingMode = EncodingMode.BASIS_TENSOR
    batch_size: int = 1
    output_update: OutputUpdate = OutputUpdate.DF_UPDATE

    def __post_init__(self):
        dims = tuple(int(d) for d in self.layer_dims)
        object.__setattr__(self, "layer_dims", dims)
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise ConfigError(f"layer_dims needs at least two positive entries, got {list(dims)}")
        if self.max_iterations < 0:
            raise ConfigError(f"max_iterations must not be negative, got {self.max_iterations}")
        if not 0.0 < self.accuracy_cutoff < 1.0:
            raise ConfigError(f"accuracy_cutoff must lie in (0, 1), got {self.accuracy_cutoff}")
        if self.loss_kind not in LOSS_KINDS:
            raise ConfigError(f"unsupported loss '{self.loss_kind}'")
        if self.convergence_eps <= 0:
            raise ConfigError(f"convergence_eps must be positive, got {self.convergence_eps}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be positive, got {self.batch_size}")
        if isinstance(self.measurable, (list, tuple)):
            object.__setattr__(self, "measurable", tuple(self.measurable))

    def operator_for(self, layer_index: int, dim: int) -> MeasurableOperator:
        """The measurable operator of a layer acting on ``dim`` amplitudes

        Raises:
            RangeError: If a per-layer tuple has no entry for ``layer_index``
            DimensionError: If a projection does not match ``dim``
        """
        operator = self.measurable
        if isinstance(operator, tuple):
            if not 0 <= layer_index < len(operator):
                raise RangeError(f"no measurable operator configured for layer {layer_index}")
            operator = operator[layer_index]
        if isinstance(operator, HermitianProjection) and operator.dim != dim:
            raise DimensionError(f"observable of layer {layer_index} does not match layer dimension",
                                 operator.h.shape, (dim, dim))
        return operator


def seed_streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    """Independent ``(init, sampler, measure)`` generators derived from one seed"""
    children = np.random.SeedSequence(seed).spawn(3)
    return tuple(np.random.default_rng(child) for child in children)


class InstanceSampler:
    """Draws the training rows and the test row of each iteration

    Both trainers build it from the sampler stream of the same seed, so paired
    runs see the same instances.
    """

    def __init__(self, n_rows: int, rng: np.random.Generator):
        if n_rows < 1:
            raise EmptyInputError("cannot sample instances from an empty dataset")
        self.n_rows = n_rows
        self.rng = rng

    def draw(self, batch_size: int = 1) -> Tuple[List[int], int]:
        indices = self.rng.integers(self.n_rows, size=batch_size + 1)
        return [int(i) for i in indices[:-1]], int(indices[-1])


@dataclass
class LayeredNetwork:
    """Padded square weights ``W_l`` with their cached unitaries ``U_l``

    Layer ``l`` maps ``layer_dims[l]`` amplitudes to ``layer_dims[l + 1]`` and
    acts on ``D_l = max`` of the two.
    """

    layer_dims: Tuple[int, ...]
    unitarize_mode: UnitarizeMode
    weights: List[CMatrix] = field(default_factory=list)
    unitaries: List[UnitaryMatrix] = field(default_factory=list)
    iteration: int = 0
    loss_history: List[float] = field(default_factory=list)
    accuracy_history: List[float] = field(default_factory=list)
    table_accuracy_history: List[float] = field(default_factory=list)

    def __post_init__(self):
        if not self.weights:
            self.weights = [None] * self.n_layers
            self.unitaries = [None] * self.n_layers

    @property
    def n_layers(self) -> int:
        return len(self.layer_dims) - 1

    @property
    def output_index(self) -> int:
        return self.n_layers - 1

    def _check_index(self, index: int) -> None:
        if not 0 <= index < self.n_layers:
            raise RangeError(f"layer index {index} out of range for {self.n_layers} layers")

    def in_dim(self, index: int) -> int:
        self._check_index(index)
        return self.layer_dims[index]

    def out_dim(self, index: int) -> int:
        self._check_index(index)
        return self.layer_dims[index + 1]

    def layer_dim(self, index: int) -> int:
        return max(self.in_dim(index), self.out_dim(index))

    def set_layer(self, index: int, w: CMatrix) -> None:
        """Store weights (zero-padded to ``D_l``) and refresh the cached unitary"""
        w = pad_matrix(w, self.layer_dim(index))
        self.weights[index] = w
        self.unitaries[index] = unitarize(w, self.unitarize_mode)

    def apply_layer(self, index: int, state: Ket) -> Ket:
        """Pad, apply ``U_l``, keep the first ``out_dim`` amplitudes and renormalize"""
        image = matvec(self.unitaries[index].matrix, pad_vector(state.amps, self.layer_dim(index)))
        kept = image[: self.out_dim(index)]
        norm = float(np.linalg.norm(kept))
        if norm < POST_SELECTION_FLOOR:
            logger.debug("post-selection on layer %d lost the state, using the uniform state", index)
            return Ket(np.full(kept.shape[0], 1.0 / np.sqrt(kept.shape[0]), dtype=np.complex128))
        return Ket(kept / norm)

    def propagate(self, x: Ket, upto: int) -> Ket:
        """Image of ``x`` after layers ``0 .. upto-1``"""
        if upto < 0 or upto > self.n_layers:
            raise RangeError(f"cannot propagate through {upto} of {self.n_layers} layers")
        if x.dim > self.layer_dim(0):
            raise DimensionError("input longer than the first layer", (x.dim,), (self.layer_dim(0),))
        state = x
        for index in range(upto):
            state = self.apply_layer(index, state)
        return state

    def forward(self, x: Ket) -> Ket:
        return self.propagate(x, self.n_layers)


def refit_output_layer(network: LayeredNetwork, pairs: Sequence[TrainingPair]) -> None:
    """Re-accumulate the output layer from the current images of every pair

    Raises:
        EmptyInputError: If ``pairs`` is empty
    """
    images = [
        TrainingPair(network.propagate(pair.x, network.output_index), pair.y)
        for pair in pairs
    ]
    network.set_layer(network.output_index, accumulate_weights(images))


def init_network(pairs: Sequence[TrainingPair], config: TrainerConfig,
                 rng: np.random.Generator) -> LayeredNetwork:
    """Random unitary hidden layers and an output layer accumulated from the pairs

    The output layer sums ``|y_i><x_i|`` over the raw dataset kets padded to
    its dimension, whatever the hidden layers do to them.

    Raises:
        EmptyInputError: If ``pairs`` is empty
        DimensionError: If the pairs do not match the first or last layer
            dimension, or the inputs are longer than the output layer
    """
    pairs = list(pairs)
    if not pairs:
        raise EmptyInputError("cannot initialize a network from an empty dataset")
    dims = config.layer_dims
    if pairs[0].x.dim != dims[0]:
        raise DimensionError("input states do not match the first layer", (pairs[0].x.dim,), (dims[0],))
    if pairs[0].y.dim != dims[-1]:
        raise DimensionError("label states do not match the output layer", (pairs[0].y.dim,), (dims[-1],))

    network = LayeredNetwork(layer_dims=dims, unitarize_mode=config.unitarize_mode)
    output_dim = network.layer_dim(network.output_index)
    if pairs[0].x.dim > output_dim:
        raise DimensionError("input states do not fit the output layer", (pairs[0].x.dim,), (output_dim,))
    for index in range(network.n_layers - 1):
        network.set_layer(index, random_unitary(network.layer_dim(index), rng).matrix)
    raw = [TrainingPair(Ket(pad_vector(pair.x.amps, output_dim)), pair.y) for pair in pairs]
    network.set_layer(network.output_index, accumulate_weights(raw))
    return network


def tally_df_update(counter: OpsCounter, dim: int, batch_size: int,
                    mode: UnitarizeMode) -> OpsCounter:
    """Record the complex operations of one ``df_update`` on a ``dim x dim`` layer

    The measurement itself is not counted: the sigmoid is not a complex
    multiply-add and the projection cost is a sampling step.
    """
    counter.svd()
    if mode is UnitarizeMode.UV_DAGGER:
        counter.matmul(dim, dim, dim)
    for _ in range(batch_size):
        counter.matvec(dim, dim)
        counter.outer(dim, dim)
    counter.elementwise_adds((batch_size - 1) * dim * dim)
    counter.elementwise_mults(dim * dim)
    counter.matmul(dim, dim, dim)
    counter.elementwise_adds(dim * dim)
    return counter


def df_update(w_old: CMatrix, batch: Sequence[Union[TrainingPair, Ket]],
              m: MeasurableOperator, mode: UnitarizeMode = UnitarizeMode.U_ONLY,
              rng: Optional[np.random.Generator] = None,
              counter: Optional[OpsCounter] = None) -> Tuple[CMatrix, UnitaryMatrix]:
    """One derivative-free weight update ``W_new = M{U Y - W_old}``

    Args:
        w_old: Square ``D x D`` weights
        batch: Input states (or pairs, whose inputs are used), padded to ``D``
        m: Measurable operator applied to the result
        mode: Unitarization of ``w_old``
        rng: Random source, required by the projection mode
        counter: Receives the operation tally when given

    Returns:
        ``(w_new, u)`` where ``u`` is the unitary used for the update

    Raises:
        DimensionError: If ``w_old`` is not square or an input is longer than ``D``
        EmptyInputError: If ``batch`` is empty
        NumericalFailure: If the SVD fails
    """
    w_old = as_matrix(w_old)
    if w_old.shape[0] != w_old.shape[1]:
        raise DimensionError("layer weights must be square", w_old.shape, w_old.shape[::-1])
    batch = list(batch)
    if not batch:
        raise EmptyInputError("df_update needs at least one input state")

    dim = w_old.shape[0]
    u = unitarize(w_old, mode)
    y_hat = np.zeros((dim, dim), dtype=np.complex128)
    for item in batch:
        state = item.x if isinstance(item, TrainingPair) else item
        x = pad_vector(state.amps, dim)
        y_hat += outer_product(matvec(u.matrix, x), x)
    y_hat /= len(batch)

    w_new = measure_matrix(m, matmul(u.matrix, y_hat) - w_old, rng)
    if counter is not None:
        tally_df_update(counter, dim, len(batch), mode)
    return w_new, u


def count_update_ops(network: LayeredNetwork, layer_index: int,
                     batch: Sequence[Union[TrainingPair, Ket]]) -> OpsCounter:
    """Operations of one ``df_update`` of a single layer

    Depends only on the layer dimension and the batch size, never on how many
    other layers the network has.

    Raises:
        RangeError: If ``layer_index`` is not a layer of ``network``
        EmptyInputError: If ``batch`` is empty
    """
    dim = network.layer_dim(layer_index)
    batch = list(batch)
    if not batch:
        raise EmptyInputError("cannot count an update over an empty batch")
    return tally_df_update(OpsCounter(), dim, len(batch), network.unitarize_mode)


def decode(state: Ket, encoding: EncodingMode = EncodingMode.BASIS_TENSOR) -> np.ndarray:
    """The real vector an output ket is scored with

    Born probabilities under BasisTensor encoding, the real parts of the
    amplitudes under RawVector encoding.
    """
    if encoding is EncodingMode.RAW_VECTOR:
        return state.amps.real.copy()
    return born_probabilities(state)


def evaluate(network: LayeredNetwork, pairs: Sequence[TrainingPair], cutoff: float = 0.5,
             encoding: EncodingMode = EncodingMode.BASIS_TENSOR) -> Tuple[float, float]:
    """Accuracy and average L1 deviation of the network on ``pairs``

    Targets are the one-hot label vectors; outputs go through ``decode``.

    Raises:
        EmptyInputError: If ``pairs`` is empty
    """
    pairs = list(pairs)
    if not pairs:
        raise EmptyInputError("cannot evaluate on an empty set of pairs")
    decoded = np.array([decode(network.forward(pair.x), encoding) for pair in pairs])
    targets = np.array([born_probabilities(pair.y) for pair in pairs])
    return score_outputs(decoded, targets, cutoff)


@dataclass
class TrainResult:
    network: LayeredNetwork
    loss_history: List[float]
    accuracy_history: List[float]
    table_accuracy_history: List[float]
    converged_at: Optional[int]
    reached_full_accuracy_at: Optional[int]

    @property
    def iterations(self) -> int:
        return len(self.loss_history)


def layer_input(network: LayeredNetwork, x: Ket, layer_index: int,
                m: MeasurableOperator, rng: Optional[np.random.Generator]) -> Ket:
    """State fed to a layer's update

    Layer 0 sees the raw input. Deeper layers see the measured image of the
    input after the layers before them; the sigmoid acts on the image itself,
    the projection acts on the image padded to the layer dimension.
    """
    dim = network.layer_dim(layer_index)
    if layer_index == 0:
        return Ket(pad_vector(x.amps, dim))
    image = network.propagate(x, layer_index)
    if isinstance(m, HermitianProjection):
        return measure_ket(m, Ket(pad_vector(image.amps, dim)), rng)
    return Ket(pad_vector(measure_ket(m, image).amps, dim))


def train(dataset: Dataset, config: TrainerConfig,
          sampler: Optional[InstanceSampler] = None) -> TrainResult:
    """Run derivative-free training for ``config.max_iterations`` iterations

    Each iteration draws training rows and a test row, scores the network it
    starts from (test-row loss, test-row accuracy and accuracy over the whole
    dataset), then updates every layer from its input batch under that
    network. With ``OutputUpdate.REFIT`` the output layer is re-accumulated
    from the labelled images after the other layers moved.

    Raises:
        EmptyInputError: If the dataset is empty
        DimensionError: If the dataset does not fit ``config.layer_dims``
        NumericalFailure: If a decomposition fails
    """
    pairs = dataset.pairs(config.encoding)
    init_rng, sampler_rng, measure_rng = seed_streams(config.seed)
    network = init_network(pairs, config, init_rng)
    if sampler is None:
        sampler = InstanceSampler(len(pairs), sampler_rng)
    refit = config.output_update is OutputUpdate.REFIT
    updated = range(network.n_layers - 1 if refit else network.n_layers)
    operators = [config.operator_for(index, network.layer_dim(index)) for index in updated]

    logger.info("Training %s with layers %s (seed %d, %d iterations)",
                dataset.name, list(config.layer_dims), config.seed, config.max_iterations)

    for iteration in range(1, config.max_iterations + 1):
        train_rows, test_row = sampler.draw(config.batch_size)
        accuracy, loss = evaluate(network, [pairs[test_row]], config.accuracy_cutoff, config.encoding)
        table_accuracy, _ = evaluate(network, pairs, config.accuracy_cutoff, config.encoding)
        network.iteration = iteration
        network.loss_history.append(loss)
        network.accuracy_history.append(accuracy)
        network.table_accuracy_history.append(table_accuracy)
        logger.debug("iteration %d: loss %.6f accuracy %.1f table accuracy %.3f",
                     iteration, loss, accuracy, table_accuracy)

        batches = [
            [layer_input(network, pairs[row].x, index, operators[index], measure_rng)
             for row in train_rows]
            for index in updated
        ]
        for index in updated:
            w_new, _ = df_update(network.weights[index], batches[index], operators[index],
                                 config.unitarize_mode, measure_rng)
            network.set_layer(index, w_new)
        if refit:
            refit_output_layer(network, pairs)

    converged_at = loss_plateau_iteration(network.loss_history, config.convergence_eps)
    reached = first_full_accuracy(network.table_accuracy_history)
    logger.info("Finished %s seed %d: converged at %s, full accuracy at %s",
                dataset.name, config.seed, converged_at, reached)
    return TrainResult(
        network=network,
        loss_history=list(network.loss_history),
        accuracy_history=list(network.accuracy_history),
        table_accuracy_history=list(network.table_accuracy_history),
        converged_at=converged_at,
        reached_full_accuracy_at=reached,
    )
