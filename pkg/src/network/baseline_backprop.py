"""
Classical sigmoid perceptron network trained by backpropagation

This is the comparison baseline for the derivative-free trainer. It shares
the dataset, the instance sampler stream and the scoring with it, and counts
its real-valued operations in an ``OpsCounter`` so the cost of one layer's
gradient can be set against one derivative-free layer update.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from src.errors import ContractViolation, DimensionError, EmptyInputError, RangeError
from src.network.dataset import Dataset
from src.network.metrics import first_full_accuracy, loss_plateau_iteration, score_outputs
from src.network.ops_counter import OpsCounter
from src.network.trainer import InstanceSampler, TrainerConfig, seed_streams

logger = logging.getLogger(__name__)

Sample = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True, eq=False)
class Mlp:
    """Layers ``a_l = sigmoid(W_l a_{l-1} + b_l)``; ``W_l`` is ``out x in``"""

    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]

    def __post_init__(self):
        weights = tuple(np.array(w, dtype=np.float64) for w in self.weights)
        biases = tuple(np.array(b, dtype=np.float64).reshape(-1) for b in self.biases)
        if not weights or len(weights) != len(biases):
            raise DimensionError("weights and biases must pair up", (len(weights),), (len(biases),))
        for index, (w, b) in enumerate(zip(weights, biases)):
            if w.ndim != 2 or w.shape[0] != b.shape[0]:
                raise DimensionError(f"layer {index} bias does not match weights", w.shape, b.shape)
            if index and w.shape[1] != weights[index - 1].shape[0]:
                raise DimensionError(f"layer {index} does not follow layer {index - 1}",
                                     w.shape, weights[index - 1].shape)
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ContractViolation(f"layer {index} has non-finite parameters")
            w.flags.writeable = False
            b.flags.writeable = False
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def layer_dims(self) -> Tuple[int, ...]:
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)


def init_mlp(layer_dims: Sequence[int], rng: np.random.Generator) -> Mlp:
    """Weights and biases drawn uniformly from ``[-1, 1)``"""
    dims = [int(d) for d in layer_dims]
    if len(dims) < 2:
        raise DimensionError("a network needs an input and an output dimension", (len(dims),), (2,))
    weights, biases = [], []
    for n_in, n_out in zip(dims[:-1], dims[1:]):
        weights.append(rng.uniform(-1.0, 1.0, size=(n_out, n_in)))
        biases.append(rng.uniform(-1.0, 1.0, size=n_out))
    return Mlp(tuple(weights), tuple(biases))


def forward_classical(mlp: Mlp, x: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray]]:
    """Output of the network and every layer's activation, input first

    Raises:
        DimensionError: If ``x`` does not match the first layer
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != mlp.weights[0].shape[1]:
        raise DimensionError("input does not match the first layer", x.shape, mlp.weights[0].shape)
    activations = [x]
    for w, b in zip(mlp.weights, mlp.biases):
        activations.append(expit(w @ activations[-1] + b))
    return activations[-1], activations


def loss_and_gradients(mlp: Mlp, batch: Sequence[Sample]
                       ) -> Tuple[float, List[np.ndarray], List[np.ndarray]]:
    """Average L1 loss over the batch and its gradient

    The subgradient of ``|r|`` at ``r = 0`` is taken as 0.

    Returns:
        ``(loss, weight_grads, bias_grads)``

    Raises:
        EmptyInputError: If ``batch`` is empty
    """
    batch = list(batch)
    if not batch:
        raise EmptyInputError("cannot compute gradients over an empty batch")
    grad_w = [np.zeros_like(w) for w in mlp.weights]
    grad_b = [np.zeros_like(b) for b in mlp.biases]
    loss = 0.0
    scale = 1.0 / (len(batch) * mlp.weights[-1].shape[0])

    for x, target in batch:
        output, activations = forward_classical(mlp, x)
        residual = output - np.asarray(target, dtype=np.float64).reshape(-1)
        loss += float(np.sum(np.abs(residual))) * scale

        delta = np.sign(residual) * scale * output * (1.0 - output)
        for index in range(mlp.depth - 1, -1, -1):
            grad_w[index] += np.outer(delta, activations[index])
            grad_b[index] += delta
            if index:
                a = activations[index]
                delta = (mlp.weights[index].T @ delta) * a * (1.0 - a)
    return loss, grad_w, grad_b


def backprop_step(mlp: Mlp, batch: Sequence[Sample], learning_rate: float) -> Mlp:
    """One plain gradient-descent step; a zero learning rate returns an equal network"""
    if learning_rate < 0:
        raise ValueError(f"learning rate must not be negative, got {learning_rate}")
    _, grad_w, grad_b = loss_and_gradients(mlp, batch)
    return Mlp(
        tuple(w - learning_rate * g for w, g in zip(mlp.weights, grad_w)),
        tuple(b - learning_rate * g for b, g in zip(mlp.biases, grad_b)),
    )


def count_backprop_ops(mlp: Mlp, layer_index: int, batch: Sequence[Sample]) -> OpsCounter:
    """Operations to obtain the weight gradient of one layer

    Per sample this is the layer's own affine map, the delta chain from the
    output layer down to it, and the outer product with its input. The other
    layers' activations are taken as cached.

    Raises:
        RangeError: If ``layer_index`` is not a layer of ``mlp``
        EmptyInputError: If ``batch`` is empty
    """
    if not 0 <= layer_index < mlp.depth:
        raise RangeError(f"layer index {layer_index} out of range for {mlp.depth} layers")
    n_samples = len(list(batch))
    if not n_samples:
        raise EmptyInputError("cannot count gradient operations over an empty batch")

    dims = mlp.layer_dims
    counter = OpsCounter()
    for _ in range(n_samples):
        n_in, n_out = dims[layer_index], dims[layer_index + 1]
        counter.matvec(n_out, n_in).elementwise_adds(n_out)

        n_last = dims[-1]
        counter.elementwise_mults(2 * n_last).elementwise_adds(n_last)
        for index in range(mlp.depth - 1, layer_index, -1):
            # delta of layer index-1 from layer index
            rows, cols = dims[index], dims[index + 1]
            counter.matvec(rows, cols).elementwise_mults(2 * rows).elementwise_adds(rows)

        counter.outer(n_out, n_in)
    return counter


@dataclass
class BackpropResult:
    mlp: Mlp
    learning_rate: float
    loss_history: List[float]
    accuracy_history: List[float]
    table_accuracy_history: List[float]
    converged_at: Optional[int]
    reached_full_accuracy_at: Optional[int]

    @property
    def iterations(self) -> int:
        return len(self.loss_history)


def evaluate_mlp(mlp: Mlp, inputs: np.ndarray, targets: np.ndarray,
                 cutoff: float = 0.5) -> Tuple[float, float]:
    """Accuracy and average L1 deviation of the network's outputs"""
    if len(inputs) == 0:
        raise EmptyInputError("cannot evaluate on an empty set of rows")
    outputs = np.array([forward_classical(mlp, x)[0] for x in inputs])
    return score_outputs(outputs, targets, cutoff)


def train_backprop(dataset: Dataset, config: TrainerConfig, learning_rate: float,
                   seed: Optional[int] = None,
                   sampler: Optional[InstanceSampler] = None) -> BackpropResult:
    """Train the baseline with single-step gradient descent per iteration

    ``config.layer_dims`` is the classical architecture here (for example
    ``2, 2, 1`` for XOR). The sampler stream of ``seed`` is the same one the
    derivative-free trainer uses, so paired runs see the same instances.

    Raises:
        DimensionError: If the dataset does not fit ``config.layer_dims``
    """
    seed = config.seed if seed is None else seed
    dims = config.layer_dims
    if dataset.n_inputs != dims[0] or dataset.n_targets != dims[-1]:
        raise DimensionError("dataset does not fit the network",
                             (dataset.n_inputs, dataset.n_targets), (dims[0], dims[-1]))
    inputs = dataset.inputs.astype(np.float64)
    targets = dataset.targets.astype(np.float64)

    init_rng, sampler_rng, _ = seed_streams(seed)
    mlp = init_mlp(dims, init_rng)
    if sampler is None:
        sampler = InstanceSampler(dataset.n_rows, sampler_rng)

    logger.info("Training backprop baseline on %s with layers %s (seed %d, rate %g)",
                dataset.name, list(dims), seed, learning_rate)

    losses, accuracies, table_accuracies = [], [], []
    for iteration in range(1, config.max_iterations + 1):
        train_rows, test_row = sampler.draw(config.batch_size)
        # scored before the step, in the same order as the derivative-free trainer
        accuracy, loss = evaluate_mlp(mlp, inputs[[test_row]], targets[[test_row]],
                                      config.accuracy_cutoff)
        table_accuracy, _ = evaluate_mlp(mlp, inputs, targets, config.accuracy_cutoff)
        losses.append(loss)
        accuracies.append(accuracy)
        table_accuracies.append(table_accuracy)
        logger.debug("iteration %d: loss %.6f accuracy %.1f table accuracy %.3f",
                     iteration, loss, accuracy, table_accuracy)

        mlp = backprop_step(mlp, [(inputs[row], targets[row]) for row in train_rows], learning_rate)

    return BackpropResult(
        mlp=mlp,
        learning_rate=learning_rate,
        loss_history=losses,
        accuracy_history=accuracies,
        table_accuracy_history=table_accuracies,
        converged_at=loss_plateau_iteration(losses, config.convergence_eps),
        reached_full_accuracy_at=first_full_accuracy(table_accuracies),
    )
