"""
Markov chains driven by a unitary

The transition probabilities are the squared moduli of the unitary's
entries, ``p[i][j] = Pr(next = i | current = j) = |u_ij|^2``. Every column
(and every row) of such a matrix sums to one.
"""

import bisect
import logging
import re
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy.stats import chi2, chisquare

from src.errors import ContractViolation, DimensionError, EmptyInputError, RangeError
from src.quantum.complex_linalg import UnitaryMatrix, is_unitary, random_unitary

logger = logging.getLogger(__name__)

STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Doubly stochastic matrix, column ``j`` is the distribution of the next state"""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DimensionError("transition matrix must be square", p.shape, p.shape[::-1])
        if np.any(p < 0):
            raise ContractViolation("transition probabilities must be non-negative")
        column_error = float(np.max(np.abs(p.sum(axis=0) - 1.0)))
        row_error = float(np.max(np.abs(p.sum(axis=1) - 1.0)))
        if column_error > STOCHASTIC_TOL or row_error > STOCHASTIC_TOL:
            raise ContractViolation(
                f"matrix is not doubly stochastic (column error {column_error:.3e}, "
                f"row error {row_error:.3e})"
            )
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.p.shape[0]


def transition_probabilities(u) -> TransitionMatrix:
    """Unistochastic matrix ``|u_ij|^2`` of a unitary

    Args:
        u: A ``UnitaryMatrix`` or a raw matrix that must be unitary

    Raises:
        ContractViolation: If ``u`` is not unitary
    """
    matrix = u.matrix if isinstance(u, UnitaryMatrix) else np.asarray(u, dtype=np.complex128)
    if not is_unitary(matrix):
        raise ContractViolation("transition probabilities need a unitary matrix")
    return TransitionMatrix(np.abs(matrix) ** 2)


def sample_chain(t: TransitionMatrix, start: int, steps: int,
                 rng: np.random.Generator) -> List[int]:
    """Walk the chain for ``steps`` transitions

    Returns:
        ``steps + 1`` state indices beginning with ``start``

    Raises:
        RangeError: If ``start`` is not a valid state or ``steps`` is not positive
    """
    if start < 0 or start >= t.n:
        raise RangeError(f"start state {start} out of range for {t.n} states")
    if steps < 1:
        raise RangeError(f"steps must be positive, got {steps}")

    cumulative = [np.cumsum(t.p[:, j]).tolist() for j in range(t.n)]
    draws = rng.random(steps).tolist()
    last = t.n - 1

    chain = [start]
    current = start
    for u in draws:
        # cumulative sums can end a hair below 1.0
        current = min(bisect.bisect_right(cumulative[current], u), last)
        chain.append(current)
    return chain


def _transition_counts(chain: Sequence[int], n: int, lag: int) -> np.ndarray:
    states = np.asarray(chain, dtype=np.int64)
    if states.shape[0] < lag + 1:
        raise EmptyInputError(f"chain needs at least {lag + 1} states, got {states.shape[0]}")
    if states.min() < 0 or states.max() >= n:
        raise RangeError(f"chain visits a state outside 0..{n - 1}")
    counts = np.zeros((n, n), dtype=np.float64)
    np.add.at(counts, (states[lag:], states[:-lag]), 1.0)
    return counts


def _normalize_columns(counts: np.ndarray) -> np.ndarray:
    totals = counts.sum(axis=0)
    frequencies = np.zeros_like(counts)
    visited = totals > 0
    frequencies[:, visited] = counts[:, visited] / totals[visited]
    return frequencies


def empirical_frequencies(chain: Sequence[int], n: int) -> np.ndarray:
    """Observed ``Pr(next = i | current = j)`` laid out like ``TransitionMatrix.p``

    States never left stay as an all-zero column.

    Raises:
        EmptyInputError: If the chain has fewer than two states
    """
    return _normalize_columns(_transition_counts(chain, n, lag=1))


def two_step_frequencies(chain: Sequence[int], n: int) -> np.ndarray:
    """Observed two-step transitions, comparable with ``p @ p``"""
    return _normalize_columns(_transition_counts(chain, n, lag=2))


def chi_square_transitions(chain: Sequence[int], t: TransitionMatrix) -> float:
    """Pooled chi-square goodness-of-fit p-value of the observed transitions

    The statistic of every current state is summed, as are the degrees of
    freedom. Outcomes with zero exact probability are left out (they are
    never observed) and states with a single possible successor contribute
    nothing.
    """
    counts = _transition_counts(chain, t.n, lag=1)
    statistic = 0.0
    dof = 0
    for j in range(t.n):
        observed = counts[:, j]
        total = observed.sum()
        support = t.p[:, j] > 1e-12
        if total == 0 or support.sum() < 2:
            continue
        expected = t.p[support, j] * total
        expected *= observed[support].sum() / expected.sum()
        statistic += float(chisquare(observed[support], expected).statistic)
        dof += int(support.sum()) - 1
    if dof == 0:
        return 1.0
    return float(chi2.sf(statistic, dof))


_PRESET = re.compile(r"^\s*([a-z_]+)\s*(?:\(([^)]*)\))?\s*$")


def preset_unitary(preset: str) -> UnitaryMatrix:
    """Build a named unitary

    ``identity`` or ``identity(n)``, ``hadamard``, ``cyclic(n)`` (state ``j``
    moves to ``j + 1 mod n``) and ``random(seed, n)`` (Haar random).

    Raises:
        ValueError: If the preset is unknown or its arguments are malformed
    """
    match = _PRESET.match(preset.lower())
    if not match:
        raise ValueError(f"malformed unitary preset '{preset}'")
    name, raw_args = match.group(1), match.group(2)
    try:
        args = [int(a) for a in raw_args.split(",")] if raw_args and raw_args.strip() else []
    except ValueError:
        raise ValueError(f"unitary preset '{preset}' takes integer arguments")

    if name == "identity" and len(args) <= 1:
        n = args[0] if args else 2
        if n < 1:
            raise ValueError(f"identity needs a positive size, got {n}")
        return UnitaryMatrix(np.eye(n))
    if name == "hadamard" and not args:
        return UnitaryMatrix(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    if name == "cyclic" and len(args) == 1:
        n = args[0]
        if n < 1:
            raise ValueError(f"cyclic needs a positive size, got {n}")
        return UnitaryMatrix(np.roll(np.eye(n), 1, axis=0))
    if name == "random" and len(args) == 2:
        seed, n = args
        if n < 1:
            raise ValueError(f"random needs a positive size, got {n}")
        return random_unitary(n, np.random.default_rng(seed))
    raise ValueError(
        f"unknown unitary preset '{preset}' "
        "(expected identity, hadamard, cyclic(n) or random(seed, n))"
    )
