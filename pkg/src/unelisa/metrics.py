"""Evaluation metrics: support-recovery rates and classification scores.

Undefined metrics are reported as 0 plus an explicit flag, never as NaN.
The F-score here combines PPV and NPV (the harmonic mean of the two predictive
values); the conventional recall-based F1 is available behind a flag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import PredictionResult, StructuralError

__all__ = ["RecoveryMetrics", "ClassificationMetrics", "recovery", "classification"]


@dataclass(frozen=True)
class RecoveryMetrics:
    """Hit rate (recall of the true expert set) and precision of the estimate."""

    hit_rate: float
    precision: float
    flags: tuple[str, ...] = ()


def recovery(estimated, truth) -> RecoveryMetrics:
    """Support-recovery rates of an estimated node set against the truth.

    ``hit_rate = |est & truth| / |truth|`` and
    ``precision = |est & truth| / |est|`` with precision reported as 0 and
    flagged when the estimate is empty. An empty truth set is an error.
    """
    est = frozenset(int(s) for s in estimated)
    tru = frozenset(int(s) for s in truth)
    if not tru:
        raise StructuralError("truth set must be nonempty")
    inter = len(est & tru)
    if not est:
        return RecoveryMetrics(hit_rate=0.0, precision=0.0, flags=("empty_estimate",))
    return RecoveryMetrics(hit_rate=inter / len(tru), precision=inter / len(est))


@dataclass(frozen=True)
class ClassificationMetrics:
    accuracy: float
    auc: float
    ppv: float
    npv: float
    f_score: float
    f1_conventional: float | None = None
    flags: tuple[str, ...] = ()


def _auc_rank(scores: np.ndarray, truth: np.ndarray) -> float:
    """Mann-Whitney AUC from midranks; ties contribute one half."""
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=float)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0  # average of 1-based ranks
        i = j + 1
    n_pos = int(np.sum(truth == 1))
    n_neg = len(truth) - n_pos
    rank_sum = float(ranks[truth == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def classification(
    pred: PredictionResult,
    truth,
    threshold: float = 0.5,
    conventional_f1: bool = False,
) -> ClassificationMetrics:
    """Confusion-matrix metrics plus rank-based AUC against +/-1 truth.

    Hard labels are taken from ``pred.labels`` at the default threshold; a
    non-default threshold re-derives them from the scores. AUC uses the
    scores regardless. Single-class truth makes AUC undefined (0, flagged);
    no predicted positives/negatives make PPV/NPV undefined (0, flagged).
    """
    truth = np.asarray(truth)
    if truth.shape != pred.labels.shape:
        raise StructuralError("truth length must match predictions")
    if not np.isin(truth, (-1, 1)).all():
        raise StructuralError("truth entries must be -1 or +1")
    labels = pred.labels if threshold == 0.5 else np.where(pred.scores >= threshold, 1, -1)

    flags: list[str] = []
    tp = int(np.sum((labels == 1) & (truth == 1)))
    fp = int(np.sum((labels == 1) & (truth == -1)))
    tn = int(np.sum((labels == -1) & (truth == -1)))
    fn = int(np.sum((labels == -1) & (truth == 1)))
    accuracy = (tp + tn) / len(truth)

    if tp + fp == 0:
        ppv = 0.0
        flags.append("no_predicted_positive")
    else:
        ppv = tp / (tp + fp)
    if tn + fn == 0:
        npv = 0.0
        flags.append("no_predicted_negative")
    else:
        npv = tn / (tn + fn)
    f_score = 2 * ppv * npv / (ppv + npv) if ppv + npv > 0 else 0.0
    if ppv + npv == 0:
        flags.append("f_score_undefined")

    n_pos = int(np.sum(truth == 1))
    if n_pos == 0 or n_pos == len(truth):
        auc = 0.0
        flags.append("auc_undefined")
    else:
        auc = _auc_rank(np.asarray(pred.scores, dtype=float), truth)

    f1 = None
    if conventional_f1:
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = 2 * ppv * recall / (ppv + recall) if ppv + recall > 0 else 0.0

    return ClassificationMetrics(
        accuracy=accuracy,
        auc=auc,
        ppv=ppv,
        npv=npv,
        f_score=f_score,
        f1_conventional=f1,
        flags=tuple(flags),
    )
