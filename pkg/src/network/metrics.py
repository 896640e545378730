"""
Scoring of decoded outputs and the convergence markers of a training run
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from src.errors import DimensionError, EmptyInputError


def score_outputs(decoded: np.ndarray, targets: np.ndarray,
                  cutoff: float = 0.5) -> Tuple[float, float]:
    """Thresholded accuracy and mean absolute deviation

    Args:
        decoded: ``(n_rows, n_outputs)`` real predictions
        targets: Same shape, entries 0 or 1
        cutoff: A prediction counts as 1 when strictly above ``cutoff``

    Returns:
        ``(accuracy, avg_l1)``; a row is correct only when every entry lies on
        the correct side of the cutoff

    Raises:
        EmptyInputError: If there are no rows
        DimensionError: If shapes differ
    """
    decoded = np.atleast_2d(np.asarray(decoded, dtype=np.float64))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    if decoded.size == 0:
        raise EmptyInputError("no outputs to score")
    if decoded.shape != targets.shape:
        raise DimensionError("outputs and targets differ in shape", decoded.shape, targets.shape)

    predicted = decoded > cutoff
    correct_rows = np.all(predicted == (targets > 0.5), axis=1)
    accuracy = float(np.mean(correct_rows))
    avg_l1 = float(np.mean(np.abs(decoded - targets)))
    return accuracy, avg_l1


def loss_plateau_iteration(losses: Sequence[float], eps: float,
                           window: int = 3) -> Optional[int]:
    """First iteration ``t`` (1-based, ``t >= 2``) whose loss change stays below
    ``eps`` for ``window`` consecutive iterations ``t .. t+window-1``

    Returns:
        The iteration, or None if the history never plateaus
    """
    deltas = np.abs(np.diff(np.asarray(losses, dtype=np.float64)))
    small = deltas < eps
    for start in range(len(small) - window + 1):
        if small[start:start + window].all():
            return start + 2
    return None


def first_full_accuracy(accuracies: Sequence[float]) -> Optional[int]:
    """First iteration (1-based) with accuracy 1.0, or None"""
    for index, accuracy in enumerate(accuracies):
        if accuracy >= 1.0:
            return index + 1
    return None


def censored(iteration: Optional[int], max_iterations: int) -> int:
    """Replace "never" by ``max_iterations + 1`` for medians and comparisons"""
    return max_iterations + 1 if iteration is None else iteration
