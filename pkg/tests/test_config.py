import os

import pytest

from src.config.experiment_config import ExperimentConfig
from src.errors import ConfigError
from src.network.quantum_perceptron import UnitarizeMode
from src.network.trainer import OutputUpdate
from src.quantum.measurement import ElementwiseSigmoid, HermitianProjection

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "data")


def write_ini(tmp_path, body, name="experiment.ini"):
    path = tmp_path / name
    path.write_text(body, encoding="utf-8")
    return str(path)


@pytest.mark.parametrize("filename", ["xor_bench.ini", "depth_bench.ini", "markov.ini", "dynamics.ini"])
def test_shipped_configs_load(filename):
    config = ExperimentConfig.from_file(os.path.join(DATA_DIR, filename))
    assert config.name


def test_xor_bench_config_values():
    config = ExperimentConfig.from_file(os.path.join(DATA_DIR, "xor_bench.ini"))
    assert config.seeds == tuple(range(30))
    assert config.layer_dims == (4, 4, 2)
    assert config.learning_rates == (0.1, 0.5, 1.0)
    assert config.unitarize_mode == "uv_dagger"


def test_defaults():
    config = ExperimentConfig(name="defaults")
    assert config.max_iterations == 100
    assert config.accuracy_cutoff == 0.5
    assert config.to_dict()["name"] == "defaults"
    assert "source" not in config.to_dict()


def test_round_trip_through_dict():
    config = ExperimentConfig(name="x", seeds=(1, 2), learning_rates=(0.25,))
    assert ExperimentConfig.from_dict(config.to_dict()) == config


def test_parsing_of_values(tmp_path):
    path = write_ini(tmp_path, "[experiment]\nname = parsed\nseeds = 3..5\ntiming = yes\n"
                               "depths = 1, 2\nmeasurable = Hermitian\n")
    config = ExperimentConfig.from_file(path)
    assert config.seeds == (3, 4, 5)
    assert config.timing is True
    assert config.depths == (1, 2)
    assert config.measurable == "hermitian"
    assert config.source == path


@pytest.mark.parametrize("body, message", [
    ("[experiment]\nname = x\ncolour = blue\n", "unknown config key"),
    ("[experiment]\nseeds = 1\n", "'name' is required"),
    ("[experiment]\nname = x\nmax_iterations = many\n", "max_iterations"),
    ("[experiment]\nname = x\nseeds = 5..1\n", "seeds"),
    ("[experiment]\nname = x\nmethod = annealing\n", "method"),
    ("[experiment]\nname = x\naccuracy_cutoff = 1.5\n", "accuracy_cutoff"),
    ("[experiment]\nname = x\nunitary = rotation\n", "unknown unitary preset"),
    ("[experiment]\nname = x\nunitary = hadamard\nstart = 2\n", "out of range"),
    ("[experiment]\nname = x\nsteps = 0\n", "steps must be positive"),
    ("[experiment]\nname = x\noutput_update = freeze\n", "output_update"),
    ("[experiment]\nname = x\n[extra]\nkey = 1\n", "unknown section"),
    ("[other]\nname = x\n", "unknown section"),
    ("[experiment\nname = x\n", "cannot parse"),
])
def test_invalid_configs(tmp_path, body, message):
    with pytest.raises(ConfigError, match=message):
        ExperimentConfig.from_file(write_ini(tmp_path, body))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        ExperimentConfig.from_file(str(tmp_path / "absent.ini"))


def test_non_utf8_file(tmp_path):
    path = tmp_path / "latin.ini"
    path.write_bytes(b"[experiment]\nname = \xff\n")
    with pytest.raises(ConfigError, match="UTF-8"):
        ExperimentConfig.from_file(str(path))


def test_with_seed():
    assert ExperimentConfig(name="x").with_seed(9).seeds == (9,)


def test_trainer_config_sigmoid():
    trainer = ExperimentConfig(name="x", unitarize_mode="uv_dagger").trainer_config(4)
    assert trainer.seed == 4
    assert trainer.unitarize_mode is UnitarizeMode.UV_DAGGER
    assert isinstance(trainer.measurable, ElementwiseSigmoid)
    assert trainer.output_update is OutputUpdate.DF_UPDATE


def test_trainer_config_passes_output_update():
    config = ExperimentConfig.from_dict({"name": "x", "output_update": "Refit"})
    assert config.output_update == "refit"
    assert config.trainer_config(0).output_update is OutputUpdate.REFIT


def test_trainer_config_hermitian_gives_one_observable_per_layer():
    config = ExperimentConfig(name="x", measurable="hermitian", layer_dims=(4, 8, 4, 2))
    trainer = config.trainer_config(0)
    assert [m.dim for m in trainer.measurable] == [8, 8, 4]
    assert all(isinstance(m, HermitianProjection) for m in trainer.measurable)
    again = config.trainer_config(0)
    assert (trainer.measurable[0].h == again.measurable[0].h).all()


def test_backprop_config_uses_classical_layers():
    backprop = ExperimentConfig(name="x", max_iterations=7).backprop_config(2)
    assert backprop.layer_dims == (2, 2, 1)
    assert backprop.max_iterations == 7
