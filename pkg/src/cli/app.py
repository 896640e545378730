"""
Command line front end and benchmark harness

Subcommands write CSVs into the output directory; ``report`` turns those
CSVs into a workbook and a PDF. Exit codes: 0 success, 2 usage, config or
input errors, 3 numerical failure.
"""

import argparse
import logging
import os
import sys
import time
from typing import List, Optional

import numpy as np
import pandas as pd

from src.config.experiment_config import ExperimentConfig
from src.errors import ConfigError, NumericalFailure, WorkbenchError
from src.network.baseline_backprop import count_backprop_ops, init_mlp, loss_and_gradients, train_backprop
from src.network.dataset import Dataset, xor_dataset
from src.network.dynamics import DynamicsState, integrate_to_fixed_point, picard_fixed_point, trajectory
from src.network.ops_counter import OpsCounter
from src.network.quantum_perceptron import UnitarizeMode
from src.network.trainer import LayeredNetwork, df_update, train
from src.quantum.complex_linalg import random_unitary
from src.quantum.markov_sim import (
    chi_square_transitions,
    empirical_frequencies,
    preset_unitary,
    sample_chain,
    transition_probabilities,
)
from src.quantum.measurement import ElementwiseSigmoid
from src.quantum.quantum_state import basis_ket
from src.records.run_store import (
    read_dataset,
    records_from_history,
    write_chain,
    write_csv,
    write_depth,
    write_matrix,
    write_runs,
    write_trajectory,
    write_weights,
)
from src.records.summary import BACKPROP, DERIVATIVE_FREE, RunOutcome, write_summary
from src.utils.logging_setup import configure_logging
from src.utils.report_exporter import ReportExporter
from src.utils.workbook_exporter import WorkbookExporter

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _outcome(method: str, seed: int, result, config: ExperimentConfig,
             learning_rate: Optional[float] = None) -> RunOutcome:
    return RunOutcome(method, learning_rate, seed, result.reached_full_accuracy_at,
                      result.converged_at, config.max_iterations)


def run_benchmark(dataset: Dataset, config: ExperimentConfig, out_dir: str,
                  methods: List[str], dump_weights: bool = False) -> pd.DataFrame:
    """Train every requested method over every seed and write runs and summary CSVs

    Returns:
        The summary frame
    """
    records, outcomes = [], []
    if DERIVATIVE_FREE in methods:
        for seed in config.seeds:
            result = train(dataset, config.trainer_config(seed))
            records += records_from_history(DERIVATIVE_FREE, seed, result.loss_history,
                                            result.accuracy_history, result.table_accuracy_history)
            outcomes.append(_outcome(DERIVATIVE_FREE, seed, result, config))
            if dump_weights:
                write_weights(result.network.weights,
                              os.path.join(out_dir, f"weights_{DERIVATIVE_FREE}_s{seed}.txt"))

    if BACKPROP in methods:
        for rate in config.learning_rates:
            for seed in config.seeds:
                result = train_backprop(dataset, config.backprop_config(seed), rate)
                records += records_from_history(BACKPROP, seed, result.loss_history,
                                                result.accuracy_history,
                                                result.table_accuracy_history, learning_rate=rate)
                outcomes.append(_outcome(BACKPROP, seed, result, config, learning_rate=rate))
                if dump_weights:
                    write_weights(result.mlp.weights,
                                  os.path.join(out_dir, f"weights_{BACKPROP}_lr{rate:g}_s{seed}.txt"))

    write_runs(records, os.path.join(out_dir, "runs.csv"))
    return write_summary(outcomes, os.path.join(out_dir, "summary.csv"))


def cmd_xor_bench(config: ExperimentConfig, out_dir: str) -> int:
    """Derivative-free training against the backprop sweep on exclusive or"""
    run_benchmark(xor_dataset(), config, out_dir, [DERIVATIVE_FREE, BACKPROP])
    return EXIT_OK


def cmd_train(config: ExperimentConfig, dataset_path: str, out_dir: str) -> int:
    """Train the configured method on a dataset file and dump the final weights"""
    dataset = read_dataset(dataset_path)
    run_benchmark(dataset, config, out_dir, [config.method], dump_weights=True)
    return EXIT_OK


def _timed_ns(fn) -> int:
    start = time.perf_counter_ns()
    fn()
    return time.perf_counter_ns() - start


def cmd_depth_bench(config: ExperimentConfig, out_dir: str) -> int:
    """Per-layer update cost of both methods as the network gets deeper"""
    dim = config.depth_layer_dim
    mode = UnitarizeMode.parse(config.unitarize_mode)
    seed = config.seeds[0]
    rows = []
    for depth in config.depths:
        rng = np.random.default_rng(seed)
        network = LayeredNetwork(layer_dims=(dim,) * (depth + 1), unitarize_mode=mode)
        for index in range(depth):
            network.set_layer(index, random_unitary(dim, rng).matrix)
        batch = [basis_ket(0, dim)] * config.batch_size
        for index in range(depth):
            counter = OpsCounter()
            wall_ns = _timed_ns(lambda: df_update(network.weights[index], batch,
                                                  ElementwiseSigmoid(), mode, counter=counter))
            rows.append({"method": DERIVATIVE_FREE, "depth": depth, "layer_index": index,
                         "complex_ops": counter.total,
                         "wall_ns": wall_ns if config.timing else 0})

        mlp = init_mlp((dim,) * (depth + 1), rng)
        samples = [(rng.uniform(0.0, 1.0, dim), rng.integers(0, 2, dim))] * config.batch_size
        # every layer's gradient needs the whole backward pass, so it is timed once
        wall_ns = _timed_ns(lambda: loss_and_gradients(mlp, samples)) if config.timing else 0
        for index in range(depth):
            rows.append({"method": BACKPROP, "depth": depth, "layer_index": index,
                         "complex_ops": count_backprop_ops(mlp, index, samples).total,
                         "wall_ns": wall_ns})
        logger.info("Depth %d: %d layer rows per method", depth, depth)

    write_depth(rows, os.path.join(out_dir, "depth.csv"))
    return EXIT_OK


def cmd_markov(config: ExperimentConfig, out_dir: str) -> int:
    """Sample a chain from a unitary's transition probabilities"""
    t = transition_probabilities(preset_unitary(config.unitary))
    rng = np.random.default_rng(config.seeds[0])
    chain = sample_chain(t, config.start, config.steps, rng)

    write_matrix(t.p, os.path.join(out_dir, "transitions.csv"))
    write_chain(chain, os.path.join(out_dir, "chain.csv"))
    empirical = empirical_frequencies(chain, t.n)
    write_matrix(empirical, os.path.join(out_dir, "empirical.csv"))
    logger.info("Chain of %d steps on %s: max deviation %.4g, chi-square p-value %.4g",
                config.steps, config.unitary, float(np.max(np.abs(empirical - t.p))),
                chi_square_transitions(chain, t))
    return EXIT_OK


def cmd_dynamics(config: ExperimentConfig, out_dir: str) -> int:
    """Integrate the neuron dynamics for a seeded contractive coupling matrix"""
    rng = np.random.default_rng(config.seeds[0])
    n = config.dynamics_dim
    w = rng.uniform(-1.0, 1.0, size=(n, n))
    w *= config.coupling_scale / np.linalg.norm(w, 2)
    z0 = rng.uniform(0.0, 1.0, size=n)
    state = DynamicsState(z=z0, tau=np.full(n, config.tau), w=w)

    write_trajectory(trajectory(state, config.dt, config.trajectory_steps), config.dt,
                     os.path.join(out_dir, "trajectory.csv"))

    z_star, residual, steps_used = integrate_to_fixed_point(state, config.dt)
    z_picard, _, _ = picard_fixed_point(w, z0)
    fixed_point = pd.DataFrame({
        "neuron": range(n),
        "z_euler": z_star,
        "z_picard": z_picard,
        "abs_difference": np.abs(z_star - z_picard),
    })
    write_csv(fixed_point, os.path.join(out_dir, "fixed_point.csv"))
    logger.info("Fixed point after %d steps, residual %.3e", steps_used, residual)
    return EXIT_OK


def cmd_report(out_dir: str, name: Optional[str] = None) -> int:
    """Workbook and PDF from the CSVs already in ``out_dir``"""
    WorkbookExporter(out_dir).export(os.path.join(out_dir, "results.xlsx"))
    ReportExporter(out_dir, name).export(os.path.join(out_dir, "report.pdf"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpw",
        description="Quantum Perceptron Workbench: derivative-free training experiments",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_common(sub):
        sub.add_argument("--config", help="experiment INI file with an [experiment] section")
        sub.add_argument("--out", help="output directory (overrides output_dir)")
        sub.add_argument("--seed", type=int, help="run a single seed (overrides seeds)")
        return sub

    add_common(subparsers.add_parser("xor-bench", help="derivative-free vs backprop on XOR"))
    add_common(subparsers.add_parser("depth-bench", help="per-layer update cost by depth"))
    add_common(subparsers.add_parser("markov", help="sample a unitary-driven Markov chain"))
    train_parser = add_common(subparsers.add_parser("train", help="train on a dataset file"))
    train_parser.add_argument("--dataset", required=True, help="dataset CSV with an inputs/targets header")
    add_common(subparsers.add_parser("dynamics", help="integrate the neuron dynamics"))
    report_parser = subparsers.add_parser("report", help="workbook and PDF from earlier CSVs")
    report_parser.add_argument("--out", required=True, help="directory holding the CSVs")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        config = ExperimentConfig.from_file(args.config)
    else:
        config = ExperimentConfig(name=args.command)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return config


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "report":
        return cmd_report(args.out)

    config = load_config(args)
    out_dir = args.out or config.output_dir
    if os.path.exists(out_dir) and not os.path.isdir(out_dir):
        raise ConfigError(f"output path is not a directory: {out_dir}")
    os.makedirs(out_dir, exist_ok=True)
    logger.info("Running %s '%s' into %s", args.command, config.name, out_dir)

    if args.command == "xor-bench":
        return cmd_xor_bench(config, out_dir)
    if args.command == "depth-bench":
        return cmd_depth_bench(config, out_dir)
    if args.command == "markov":
        return cmd_markov(config, out_dir)
    if args.command == "train":
        return cmd_train(config, args.dataset, out_dir)
    return cmd_dynamics(config, out_dir)


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return its exit code"""
    configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        return dispatch(args)
    except NumericalFailure as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (WorkbenchError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
