"""Confusion counts, TPR/FPR, ROC curve, and tie-aware AUC."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class RocCurve:
    """Threshold sweep points; starts at (0,0), ends at (1,1), monotone."""

    thresholds: np.ndarray  # aligned with (fpr, tpr) pairs after the (0,0) origin
    fpr: np.ndarray
    tpr: np.ndarray


def confusion(scores: np.ndarray, truths: np.ndarray, threshold: float) -> ConfusionCounts:
    """Predicted attack iff score >= threshold; truths are 0=benign, 1=attack."""
    scores = np.asarray(scores)
    truths = np.asarray(truths)
    if scores.shape != truths.shape:
        raise ValueError("scores and truths must align")
    pred = scores >= threshold
    pos = truths == 1
    return ConfusionCounts(
        tp=int(np.sum(pred & pos)),
        fp=int(np.sum(pred & ~pos)),
        tn=int(np.sum(~pred & ~pos)),
        fn=int(np.sum(~pred & pos)),
    )


def tpr(counts: ConfusionCounts) -> float:
    denom = counts.tp + counts.fn
    return counts.tp / denom if denom else 0.0


def fpr(counts: ConfusionCounts) -> float:
    denom = counts.fp + counts.tn
    return counts.fp / denom if denom else 0.0


def roc_auc(scores: np.ndarray, truths: np.ndarray) -> tuple[RocCurve, float]:
    """ROC from a descending sweep over distinct scores, AUC by trapezoid.

    Equal scores collapse into one threshold step, which makes the trapezoidal
    area equal the Mann-Whitney statistic P(s_pos > s_neg) + 0.5 P(equal).
    """
    scores = np.asarray(scores, dtype=np.float64)
    truths = np.asarray(truths)
    n_pos = int(np.sum(truths == 1))
    n_neg = int(np.sum(truths == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC requires at least one positive and one negative")

    order = np.argsort(-scores, kind="stable")
    s_sorted = scores[order]
    t_sorted = truths[order]
    # group tied scores into single steps
    distinct = np.flatnonzero(np.diff(s_sorted) != 0)
    step_ends = np.append(distinct, len(s_sorted) - 1)
    cum_tp = np.cumsum(t_sorted == 1)[step_ends]
    cum_fp = np.cumsum(t_sorted == 0)[step_ends]

    tpr_pts = np.concatenate(([0.0], cum_tp / n_pos))
    fpr_pts = np.concatenate(([0.0], cum_fp / n_neg))
    thresholds = s_sorted[step_ends]
    auc = float(np.trapezoid(tpr_pts, fpr_pts))
    return RocCurve(thresholds=thresholds, fpr=fpr_pts, tpr=tpr_pts), auc


def write_roc_csv(path: str | Path, curve: RocCurve) -> None:
    """(threshold, fpr, tpr) rows; the (0,0) origin carries an empty threshold."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "fpr", "tpr"])
        writer.writerow(["", 0.0, 0.0])
        for th, f, t in zip(curve.thresholds, curve.fpr[1:], curve.tpr[1:]):
            writer.writerow([repr(float(th)), repr(float(f)), repr(float(t))])
