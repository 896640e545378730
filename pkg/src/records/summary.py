"""
Per-method summaries of a benchmark: medians, success fraction, paired wins
"""

import logging
from dataclasses import asdict, dataclass
from typing import Iterable, Optional

import numpy as np
import pandas as pd

from src.errors import EmptyInputError
from src.network.metrics import censored
from src.records.run_store import write_csv

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["method", "learning_rate", "seeds", "median_iterations_to_accuracy",
                   "median_iterations_to_plateau", "reached_accuracy_fraction",
                   "paired_win_fraction", "best"]

DERIVATIVE_FREE = "derivative_free"
BACKPROP = "backprop"


@dataclass(frozen=True)
class RunOutcome:
    """What one run achieved; ``None`` means never within ``max_iterations``"""

    method: str
    learning_rate: Optional[float]
    seed: int
    reached_full_accuracy_at: Optional[int]
    converged_at: Optional[int]
    max_iterations: int

    @property
    def iterations_to_accuracy(self) -> int:
        return censored(self.reached_full_accuracy_at, self.max_iterations)

    @property
    def iterations_to_plateau(self) -> int:
        return censored(self.converged_at, self.max_iterations)


def _outcome_frame(outcomes: Iterable[RunOutcome]) -> pd.DataFrame:
    rows = []
    for outcome in outcomes:
        row = asdict(outcome)
        row["to_accuracy"] = outcome.iterations_to_accuracy
        row["to_plateau"] = outcome.iterations_to_plateau
        row["reached"] = outcome.reached_full_accuracy_at is not None
        rows.append(row)
    if not rows:
        raise EmptyInputError("no runs to summarize")
    df = pd.DataFrame(rows)
    df["learning_rate"] = pd.to_numeric(df["learning_rate"])
    return df


def best_learning_rate(df: pd.DataFrame) -> Optional[float]:
    """Backprop rate with the lowest median iterations to accuracy

    Ties go to the lower median plateau, then to the smaller rate.
    """
    backprop = df[df["method"] == BACKPROP]
    if backprop.empty:
        return None
    ranked = (backprop.groupby("learning_rate")[["to_accuracy", "to_plateau"]]
              .median()
              .reset_index()
              .sort_values(["to_accuracy", "to_plateau", "learning_rate"], kind="mergesort"))
    return float(ranked.iloc[0]["learning_rate"])


def _paired_wins(mine: pd.Series, theirs: pd.Series) -> float:
    """Fraction of shared seeds where ``mine`` needed strictly fewer iterations"""
    shared = mine.index.intersection(theirs.index)
    if shared.empty:
        return float("nan")
    return float(np.mean(mine.loc[shared].to_numpy() < theirs.loc[shared].to_numpy()))


def summarize(outcomes: Iterable[RunOutcome]) -> pd.DataFrame:
    """One row per (method, learning rate)

    The derivative-free row's paired wins are counted against the best
    backprop rate; each backprop row's against the derivative-free runs.
    """
    df = _outcome_frame(outcomes)
    best_rate = best_learning_rate(df)
    free = df[df["method"] == DERIVATIVE_FREE].set_index("seed")["to_accuracy"]
    best = None
    if best_rate is not None:
        best = (df[(df["method"] == BACKPROP) & (df["learning_rate"] == best_rate)]
                .set_index("seed")["to_accuracy"])

    rows = []
    for (method, rate), group in df.groupby(["method", "learning_rate"], dropna=False, sort=True):
        mine = group.set_index("seed")["to_accuracy"]
        if method == DERIVATIVE_FREE:
            wins = _paired_wins(mine, best) if best is not None else float("nan")
            is_best = True
        else:
            wins = _paired_wins(mine, free) if not free.empty else float("nan")
            is_best = bool(rate == best_rate)
        rows.append({
            "method": method,
            "learning_rate": rate,
            "seeds": int(group["seed"].nunique()),
            "median_iterations_to_accuracy": float(group["to_accuracy"].median()),
            "median_iterations_to_plateau": float(group["to_plateau"].median()),
            "reached_accuracy_fraction": float(group["reached"].mean()),
            "paired_win_fraction": wins,
            "best": is_best,
        })
    summary = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
    return summary.sort_values(["method", "learning_rate"], kind="mergesort",
                               na_position="first").reset_index(drop=True)


def write_summary(outcomes: Iterable[RunOutcome], path: str) -> pd.DataFrame:
    summary = summarize(outcomes)
    write_csv(summary, path)
    for row in summary.itertuples():
        logger.info("%s (rate %s): median iterations to accuracy %.1f, best=%s",
                    row.method, row.learning_rate, row.median_iterations_to_accuracy, row.best)
    return summary
