"""
Dataset files in, CSV result files and weight dumps out

Every CSV has a header row, floats are written with 17 significant digits
so they read back exactly, and rows are sorted before writing so the bytes
depend only on the results.
"""

import logging
import os
from dataclasses import asdict, dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.errors import DatasetError
from src.network.dataset import Dataset

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
COMPLEX_FORMAT = "%.17g%+.17gj"

RUN_COLUMNS = ["run_id", "method", "learning_rate", "seed", "iteration",
               "loss", "accuracy", "table_accuracy"]
DEPTH_COLUMNS = ["method", "depth", "layer_index", "complex_ops", "wall_ns"]


@dataclass(frozen=True)
class RunRecord:
    """One iteration of one training run"""

    run_id: str
    method: str
    learning_rate: Optional[float]
    seed: int
    iteration: int
    loss: float
    accuracy: float
    table_accuracy: float


def run_id_for(method: str, seed: int, learning_rate: Optional[float] = None) -> str:
    if learning_rate is None:
        return f"{method}-s{seed}"
    return f"{method}-lr{learning_rate:g}-s{seed}"


def records_from_history(method: str, seed: int, losses: Sequence[float],
                         accuracies: Sequence[float], table_accuracies: Sequence[float],
                         learning_rate: Optional[float] = None) -> List[RunRecord]:
    """Turn the histories of one run into records numbered from iteration 1"""
    run_id = run_id_for(method, seed, learning_rate)
    return [
        RunRecord(run_id, method, learning_rate, seed, index + 1,
                  float(loss), float(accuracy), float(table_accuracy))
        for index, (loss, accuracy, table_accuracy)
        in enumerate(zip(losses, accuracies, table_accuracies))
    ]


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent and not os.path.exists(parent):
        os.makedirs(parent)


def write_csv(df: pd.DataFrame, path: str) -> None:
    """Write a frame with the fixed float format and ``\\n`` line endings"""
    _ensure_parent(path)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", na_rep="")
    logger.info("Wrote %d rows to %s", len(df), path)


def write_runs(records: Iterable[RunRecord], path: str) -> pd.DataFrame:
    """Write run records sorted by method, learning rate, seed and iteration"""
    df = pd.DataFrame([asdict(record) for record in records], columns=RUN_COLUMNS)
    df["learning_rate"] = pd.to_numeric(df["learning_rate"])
    df = df.sort_values(["method", "learning_rate", "seed", "iteration"],
                        kind="mergesort", na_position="first").reset_index(drop=True)
    write_csv(df, path)
    return df


def write_depth(rows: Iterable[dict], path: str) -> pd.DataFrame:
    df = pd.DataFrame(list(rows), columns=DEPTH_COLUMNS)
    df = df.sort_values(["method", "depth", "layer_index"], kind="mergesort").reset_index(drop=True)
    write_csv(df, path)
    return df


def write_matrix(matrix: np.ndarray, path: str, row_label: str = "next",
                 column_label: str = "current") -> pd.DataFrame:
    """A square real matrix with labelled rows and columns"""
    n_rows, n_cols = matrix.shape
    df = pd.DataFrame(matrix, columns=[f"{column_label}_{j}" for j in range(n_cols)])
    df.insert(0, row_label, range(n_rows))
    write_csv(df, path)
    return df


def write_chain(chain: Sequence[int], path: str) -> pd.DataFrame:
    df = pd.DataFrame({"step": range(len(chain)), "state": list(chain)})
    write_csv(df, path)
    return df


def write_trajectory(rows: np.ndarray, dt: float, path: str) -> pd.DataFrame:
    """Euler trajectory with its step index and time"""
    df = pd.DataFrame(rows, columns=[f"z_{i}" for i in range(rows.shape[1])])
    df.insert(0, "time", np.arange(rows.shape[0]) * dt)
    df.insert(0, "step", range(rows.shape[0]))
    write_csv(df, path)
    return df


def write_weights(layers: Sequence[np.ndarray], path: str) -> None:
    """Plain-text dump, one ``# layer`` block per weight matrix

    Complex entries are written as ``re+imj`` and real ones as plain numbers,
    both comma separated with 17 significant digits.
    """
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for index, matrix in enumerate(layers):
            matrix = np.atleast_2d(np.asarray(matrix))
            handle.write(f"# layer {index} ({matrix.shape[0]}x{matrix.shape[1]})\n")
            if np.iscomplexobj(matrix):
                fmt = [COMPLEX_FORMAT] * matrix.shape[1]
            else:
                fmt = FLOAT_FORMAT
            np.savetxt(handle, matrix, fmt=fmt, delimiter=",", newline="\n")
    logger.info("Wrote %d weight matrices to %s", len(layers), path)


def _parse_header(line: str) -> tuple:
    fields = {}
    for part in line.split(","):
        key, sep, value = part.partition("=")
        if not sep:
            raise DatasetError(f"header entry '{part.strip()}' is not key=value", line=1)
        fields[key.strip()] = value.strip()
    if set(fields) != {"inputs", "targets"}:
        raise DatasetError("header must be 'inputs=<k>,targets=<m>'", line=1)
    try:
        n_inputs, n_targets = int(fields["inputs"]), int(fields["targets"])
    except ValueError:
        raise DatasetError("header counts must be integers", line=1)
    if n_inputs < 1 or n_targets < 1:
        raise DatasetError("header counts must be positive", line=1)
    return n_inputs, n_targets


def read_dataset(path: str) -> Dataset:
    """Parse a dataset file

    The first line is ``inputs=<k>,targets=<m>``; every following non-blank
    line holds ``k + m`` comma-separated bits, inputs first.

    Raises:
        DatasetError: If the file is missing, unreadable, empty or malformed;
            parse errors name the offending line
    """
    if not os.path.exists(path):
        raise DatasetError(f"dataset file not found: {path}")
    try:
        with open(path, "rb") as handle:
            raw = handle.read()
    except OSError as e:
        raise DatasetError(f"cannot read dataset {path}: {e.strerror or e}") from e
    try:
        lines = raw.decode("utf-8").splitlines()
    except UnicodeDecodeError as e:
        raise DatasetError(f"not UTF-8 text (byte {e.start})", line=raw.count(b"\n", 0, e.start) + 1) from e
    if not lines or not lines[0].strip():
        raise DatasetError("dataset file is empty", line=1)

    n_inputs, n_targets = _parse_header(lines[0])
    width = n_inputs + n_targets
    rows = []
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = [cell.strip() for cell in line.split(",")]
        if len(cells) != width:
            raise DatasetError(f"expected {width} values, found {len(cells)}", line=number)
        bad = [cell for cell in cells if cell not in ("0", "1")]
        if bad:
            raise DatasetError(f"values must be 0 or 1, found '{bad[0]}'", line=number)
        rows.append([int(cell) for cell in cells])
    if not rows:
        raise DatasetError("dataset has a header but no rows", line=len(lines))

    table = np.array(rows, dtype=np.int64)
    name = os.path.splitext(os.path.basename(path))[0]
    logger.info("Read %d rows from %s", len(rows), path)
    return Dataset(table[:, :n_inputs], table[:, n_inputs:], name=name)
