"""
Experiment configuration read from an INI file with one ``[experiment]`` section
"""

import configparser
import logging
import os
import re
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.errors import ConfigError
from src.network.quantum_perceptron import UnitarizeMode
from src.network.trainer import OutputUpdate, TrainerConfig
from src.quantum.complex_linalg import random_hermitian
from src.quantum.markov_sim import preset_unitary
from src.quantum.measurement import ElementwiseSigmoid, HermitianProjection
from src.quantum.quantum_state import EncodingMode

logger = logging.getLogger(__name__)

SECTION = "experiment"
METHODS = ("derivative_free", "backprop")
MEASURABLES = ("sigmoid", "hermitian")

_RANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


def _int_list(value) -> Tuple[int, ...]:
    """``1,2,4`` or an inclusive range ``0..29``"""
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    match = _RANGE.match(value)
    if match:
        low, high = int(match.group(1)), int(match.group(2))
        if high < low:
            raise ValueError(f"empty range {value}")
        return tuple(range(low, high + 1))
    items = [item.strip() for item in value.split(",") if item.strip()]
    if not items:
        raise ValueError("expected at least one integer")
    return tuple(int(item) for item in items)


def _float_list(value) -> Tuple[float, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    items = [item.strip() for item in value.split(",") if item.strip()]
    if not items:
        raise ValueError("expected at least one number")
    return tuple(float(item) for item in items)


def _bool(value) -> bool:
    if isinstance(value, bool):
        return value
    lowered = str(value).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected true or false, got '{value}'")


def _choice(choices):
    def convert(value) -> str:
        value = str(value).strip().lower()
        if value not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}, got '{value}'")
        return value
    return convert


def _string(value) -> str:
    return str(value).strip()


CONVERTERS = {
    "name": _string,
    "method": _choice(METHODS),
    "layer_dims": _int_list,
    "seeds": _int_list,
    "max_iterations": int,
    "unitarize_mode": _choice(tuple(mode.value for mode in UnitarizeMode)),
    "measurable": _choice(MEASURABLES),
    "encoding": _choice(tuple(mode.value for mode in EncodingMode)),
    "accuracy_cutoff": float,
    "convergence_eps": float,
    "learning_rates": _float_list,
    "backprop_layer_dims": _int_list,
    "depths": _int_list,
    "depth_layer_dim": int,
    "batch_size": int,
    "output_update": _choice(tuple(mode.value for mode in OutputUpdate)),
    "timing": _bool,
    "unitary": _string,
    "steps": int,
    "start": int,
    "dt": float,
    "tau": float,
    "dynamics_dim": int,
    "coupling_scale": float,
    "trajectory_steps": int,
    "output_dir": _string,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated settings shared by every subcommand"""

    name: str
    method: str = "derivative_free"
    layer_dims: Tuple[int, ...] = (4, 4, 2)
    seeds: Tuple[int, ...] = tuple(range(30))
    max_iterations: int = 100
    unitarize_mode: str = "u_only"
    measurable: str = "sigmoid"
    encoding: str = "basis_tensor"
    accuracy_cutoff: float = 0.5
    convergence_eps: float = 1e-3
    learning_rates: Tuple[float, ...] = (0.1, 0.5, 1.0)
    backprop_layer_dims: Tuple[int, ...] = (2, 2, 1)
    depths: Tuple[int, ...] = (1, 2, 4, 8, 16, 32)
    depth_layer_dim: int = 4
    batch_size: int = 1
    output_update: str = "df_update"
    timing: bool = False
    unitary: str = "hadamard"
    steps: int = 100_000
    start: int = 0
    dt: float = 0.1
    tau: float = 1.0
    dynamics_dim: int = 4
    coupling_scale: float = 0.1
    trajectory_steps: int = 200
    output_dir: str = "results"
    source: str = field(default="", compare=False)

    def __post_init__(self):
        problems = []
        if not self.name:
            problems.append("name must not be empty")
        for key in ("layer_dims", "backprop_layer_dims"):
            dims = getattr(self, key)
            if len(dims) < 2 or any(d < 1 for d in dims):
                problems.append(f"{key} needs at least two positive entries")
        if not self.seeds:
            problems.append("seeds must not be empty")
        if self.max_iterations < 0:
            problems.append("max_iterations must not be negative")
        if not 0.0 < self.accuracy_cutoff < 1.0:
            problems.append("accuracy_cutoff must lie in (0, 1)")
        if self.convergence_eps <= 0:
            problems.append("convergence_eps must be positive")
        if any(rate <= 0 for rate in self.learning_rates):
            problems.append("learning_rates must be positive")
        if not self.depths or any(d < 1 for d in self.depths):
            problems.append("depths must be positive")
        for key in ("depth_layer_dim", "batch_size", "dynamics_dim", "trajectory_steps"):
            if getattr(self, key) < 1:
                problems.append(f"{key} must be positive")
        if self.steps < 1:
            problems.append("steps must be positive")
        if self.start < 0:
            problems.append("start must not be negative")
        if self.dt <= 0 or self.tau <= 0:
            problems.append("dt and tau must be positive")
        try:
            n_states = preset_unitary(self.unitary).dim
            if self.start >= n_states:
                problems.append(f"start {self.start} out of range for {n_states} states")
        except ValueError as e:
            problems.append(str(e))
        if problems:
            where = f" in {self.source}" if self.source else ""
            raise ConfigError(f"invalid experiment config{where}: " + "; ".join(problems))

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name in CONVERTERS}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], source: str = "") -> "ExperimentConfig":
        """Build a config from raw strings or already typed values

        Raises:
            ConfigError: On unknown keys, a missing name or unparseable values
        """
        unknown = sorted(set(data) - set(CONVERTERS))
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        if "name" not in data:
            raise ConfigError("config key 'name' is required")
        values = {}
        for key, raw in data.items():
            try:
                values[key] = CONVERTERS[key](raw)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"bad value for '{key}': {e}") from e
        return cls(source=source, **values)

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        """Parse and validate an INI config file

        Raises:
            ConfigError: If the file is missing, malformed or fails validation
        """
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path, encoding="utf-8") as handle:
                parser.read_file(handle)
        except configparser.Error as e:
            raise ConfigError(f"cannot parse {path}: {e}") from e
        except UnicodeDecodeError as e:
            raise ConfigError(f"{path} is not UTF-8 text (byte {e.start})") from e
        except OSError as e:
            raise ConfigError(f"cannot read {path}: {e.strerror or e}") from e

        sections = parser.sections()
        extra = [s for s in sections if s != SECTION]
        if extra or parser.defaults():
            names = extra + (["DEFAULT"] if parser.defaults() else [])
            raise ConfigError(f"unknown section(s) in {path}: {', '.join(names)}")
        if SECTION not in sections:
            raise ConfigError(f"{path} has no [{SECTION}] section")

        config = cls.from_dict(dict(parser.items(SECTION)), source=path)
        logger.info("Loaded experiment '%s' from %s", config.name, path)
        return config

    def with_seed(self, seed: int) -> "ExperimentConfig":
        """The same experiment restricted to a single seed"""
        return replace(self, seeds=(int(seed),))

    def trainer_config(self, seed: int, layer_dims: Optional[Tuple[int, ...]] = None) -> TrainerConfig:
        """Derivative-free trainer settings for one seed

        In Hermitian mode every layer gets its own observable, drawn
        from the Gaussian unitary ensemble with a generator seeded by ``seed``.
        """
        dims = tuple(layer_dims or self.layer_dims)
        if self.measurable == "hermitian":
            rng = np.random.default_rng(seed)
            measurable = tuple(
                HermitianProjection(random_hermitian(max(n_in, n_out), rng))
                for n_in, n_out in zip(dims[:-1], dims[1:])
            )
        else:
            measurable = ElementwiseSigmoid()
        return TrainerConfig(
            layer_dims=dims,
            unitarize_mode=UnitarizeMode.parse(self.unitarize_mode),
            measurable=measurable,
            max_iterations=self.max_iterations,
            accuracy_cutoff=self.accuracy_cutoff,
            seed=seed,
            convergence_eps=self.convergence_eps,
            encoding=EncodingMode.parse(self.encoding),
            batch_size=self.batch_size,
            output_update=OutputUpdate.parse(self.output_update),
        )

    def backprop_config(self, seed: int) -> TrainerConfig:
        """Baseline settings: same schedule, classical architecture"""
        return TrainerConfig(
            layer_dims=self.backprop_layer_dims,
            max_iterations=self.max_iterations,
            accuracy_cutoff=self.accuracy_cutoff,
            seed=seed,
            convergence_eps=self.convergence_eps,
            batch_size=self.batch_size,
        )
