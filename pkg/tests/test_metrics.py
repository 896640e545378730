import numpy as np
import pytest

from src.errors import DimensionError, EmptyInputError
from src.network.metrics import censored, first_full_accuracy, loss_plateau_iteration, score_outputs
from src.network.ops_counter import OpsCounter

XOR_TARGETS = np.array([[0], [1], [1], [0]])


def test_perfect_predictor():
    assert score_outputs(XOR_TARGETS.astype(float), XOR_TARGETS) == (1.0, 0.0)


def test_constant_half_predictor():
    accuracy, loss = score_outputs(np.full((4, 1), 0.5), XOR_TARGETS)
    assert loss == pytest.approx(0.5)
    assert accuracy == 0.5


def test_confident_enough_predictor():
    decoded = np.where(XOR_TARGETS == 1, 0.6, 0.4)
    accuracy, loss = score_outputs(decoded, XOR_TARGETS)
    assert accuracy == 1.0
    assert loss == pytest.approx(0.4)


def test_row_needs_every_entry_right():
    accuracy, _ = score_outputs([[0.9, 0.9]], [[1, 0]])
    assert accuracy == 0.0


def test_score_errors():
    with pytest.raises(EmptyInputError):
        score_outputs(np.zeros((0, 1)), np.zeros((0, 1)))
    with pytest.raises(DimensionError):
        score_outputs(np.zeros((2, 1)), np.zeros((2, 2)))


@pytest.mark.parametrize("losses, expected", [
    ([0.5, 0.1, 0.1, 0.1, 0.1], 3),
    ([0.2, 0.2, 0.2, 0.2], 2),
    ([0.5, 0.4, 0.3, 0.2, 0.1], None),
    ([0.1, 0.1], None),
    ([], None),
])
def test_loss_plateau_iteration(losses, expected):
    assert loss_plateau_iteration(losses, 1e-3) == expected


def test_first_full_accuracy():
    assert first_full_accuracy([0.5, 0.75, 1.0, 1.0]) == 3
    assert first_full_accuracy([0.5, 0.75]) is None


def test_censored():
    assert censored(None, 100) == 101
    assert censored(7, 100) == 7


def test_ops_counter_arithmetic():
    counter = OpsCounter().matmul(2, 3, 4).outer(2, 2).svd()
    assert counter.to_dict() == {"complex_mults": 28, "complex_adds": 16, "svd_calls": 1}
    total = counter + OpsCounter(1, 1, 0)
    assert (total.complex_mults, total.complex_adds, total.svd_calls) == (29, 17, 1)
