"""
Continuous-time neuron dynamics ``tau_i dZ_i/dt = -Z_i + f((W Z)_i)``

Forward-Euler integration with a fixed step, fixed-point search, and a
direct Picard iteration ``z <- f(W z)`` that reaches the same equilibria.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from scipy.special import expit

from src.errors import ContractViolation, DimensionError

logger = logging.getLogger(__name__)

DEFAULT_DT = 0.1
DEFAULT_MAX_STEPS = 10_000
DEFAULT_EPS = 1e-8

ACTIVATIONS = {"sigmoid": expit}


@dataclass(frozen=True, eq=False)
class DynamicsState:
    """Activations ``z`` with their time constants, couplings and activation"""

    z: np.ndarray
    tau: np.ndarray
    w: np.ndarray
    activation: str = "sigmoid"

    def __post_init__(self):
        z = np.array(self.z, dtype=np.float64).reshape(-1)
        tau = np.broadcast_to(np.array(self.tau, dtype=np.float64), z.shape).copy()
        w = np.array(self.w, dtype=np.float64)
        if w.shape != (z.shape[0], z.shape[0]):
            raise DimensionError("coupling matrix does not match the activations", w.shape, z.shape)
        if np.any(tau <= 0):
            raise ContractViolation("time constants must be positive")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation '{self.activation}'")
        for array in (z, tau, w):
            array.flags.writeable = False
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.z.shape[0]

    def f(self, values: np.ndarray) -> np.ndarray:
        return ACTIVATIONS[self.activation](values)

    def residual(self, z: Optional[np.ndarray] = None) -> np.ndarray:
        """Right-hand side ``-z + f(W z)`` without the time constants"""
        z = self.z if z is None else z
        return -z + self.f(self.w @ z)


def euler_step(s: DynamicsState, dt: float) -> DynamicsState:
    """``z_i + (dt / tau_i) * (-z_i + f((W z)_i))``"""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return replace(s, z=s.z + (dt / s.tau) * s.residual())


def integrate_to_fixed_point(s: DynamicsState, dt: float = DEFAULT_DT,
                             max_steps: int = DEFAULT_MAX_STEPS,
                             eps: float = DEFAULT_EPS) -> Tuple[np.ndarray, float, int]:
    """Euler-step until ``max|-z + f(W z)| < eps`` or ``max_steps`` is used up

    Running out of steps is not an error: the caller sees ``steps_used ==
    max_steps`` together with the residual actually reached.

    Returns:
        ``(z_star, residual, steps_used)``
    """
    if dt <= 0 or eps <= 0:
        raise ValueError(f"dt and eps must be positive, got dt={dt} eps={eps}")
    steps = 0
    residual = float(np.max(np.abs(s.residual())))
    while residual >= eps and steps < max_steps:
        s = euler_step(s, dt)
        steps += 1
        residual = float(np.max(np.abs(s.residual())))
    if residual >= eps:
        logger.info("no fixed point within %d steps, residual %.3e", max_steps, residual)
    return s.z.copy(), residual, steps


def picard_fixed_point(w: np.ndarray, z0: np.ndarray, tol: float = 1e-12,
                       max_iter: int = DEFAULT_MAX_STEPS) -> Tuple[np.ndarray, float, int]:
    """Iterate ``z <- sigmoid(W z)`` until successive iterates agree within ``tol``

    Converges when ``W`` is contractive after the sigmoid's slope bound of 1/4.

    Returns:
        ``(z, residual, iterations)`` with the residual ``max|-z + f(W z)|``
    """
    if max_iter < 1:
        raise ValueError(f"max_iter must be positive, got {max_iter}")
    w = np.asarray(w, dtype=np.float64)
    z = np.asarray(z0, dtype=np.float64).reshape(-1)
    if w.shape != (z.shape[0], z.shape[0]):
        raise DimensionError("coupling matrix does not match the start vector", w.shape, z.shape)
    for iteration in range(1, max_iter + 1):
        z_next = expit(w @ z)
        if np.max(np.abs(z_next - z)) < tol:
            z = z_next
            break
        z = z_next
    else:
        iteration = max_iter
    return z, float(np.max(np.abs(-z + expit(w @ z)))), iteration


def trajectory(s: DynamicsState, dt: float, steps: int) -> np.ndarray:
    """Activations after ``0 .. steps`` Euler steps, one row per step"""
    if steps < 0:
        raise ValueError(f"steps must not be negative, got {steps}")
    rows = np.empty((steps + 1, s.n))
    rows[0] = s.z
    for step in range(1, steps + 1):
        s = euler_step(s, dt)
        rows[step] = s.z
    return rows
