"""Confusion-matrix statistics and non-parametric ROC/AUC.

Conventions: pass is the positive class, and a sample is predicted pass when
its score is greater than or equal to the threshold (the same ``>=`` rule the
training code uses).  Rates with a zero denominator are reported as ``None``
rather than silently coerced to 0, so averages stay honest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .data import PASS


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fn: int
    fp: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fn": self.fn, "fp": self.fp, "tn": self.tn}


@dataclass(frozen=True)
class MetricSet:
    """Derived rates; ``None`` marks an undefined (0/0) value."""

    sensitivity: Optional[float]
    specificity: Optional[float]
    ppv: Optional[float]
    npv: Optional[float]
    accuracy: Optional[float]

    def as_dict(self) -> dict:
        return {
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "ppv": self.ppv,
            "npv": self.npv,
            "accuracy": self.accuracy,
        }


def confusion(
    scores: Sequence[float], labels: Sequence[int], threshold: float
) -> ConfusionMatrix:
    """Tally predictions (score >= threshold means pass) against true labels."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if scores.shape != labels.shape or scores.size == 0:
        raise ValueError("scores and labels must be equal-length and non-empty")
    predicted_pass = scores >= threshold
    actual_pass = labels == PASS
    tp = int(np.sum(predicted_pass & actual_pass))
    fn = int(np.sum(~predicted_pass & actual_pass))
    fp = int(np.sum(predicted_pass & ~actual_pass))
    tn = int(np.sum(~predicted_pass & ~actual_pass))
    return ConfusionMatrix(tp, fn, fp, tn)


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


def derived_metrics(cm: ConfusionMatrix) -> MetricSet:
    """Sensitivity, specificity, predictive values and accuracy from one matrix."""
    return MetricSet(
        sensitivity=_ratio(cm.tp, cm.tp + cm.fn),
        specificity=_ratio(cm.tn, cm.tn + cm.fp),
        ppv=_ratio(cm.tp, cm.tp + cm.fp),
        npv=_ratio(cm.tn, cm.tn + cm.fn),
        accuracy=_ratio(cm.tp + cm.tn, cm.total),
    )


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    fpr: float
    tpr: float


@dataclass
class RocCurve:
    """Threshold sweep from (0,0) to (1,1) and its trapezoidal area."""

    points: list  # of RocPoint, fpr non-decreasing
    auc: float

    def to_csv(self) -> str:
        lines = ["threshold,fpr,tpr"]
        for p in self.points:
            lines.append(f"{p.threshold!r},{p.fpr!r},{p.tpr!r}")
        lines.append(f"auc,{self.auc!r}")
        return "\n".join(lines) + "\n"


def roc(scores: Sequence[float], labels: Sequence[int]) -> RocCurve:
    """Sweep thresholds over the distinct scores, descending.

    Each distinct score value is one threshold step, so tied scores produce a
    single diagonal segment and the trapezoid sum matches the pairwise
    ranking estimate (ties counting one half).  Sentinels above the maximum
    and below the minimum score pin the (0,0) and (1,1) endpoints.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if scores.shape != labels.shape or scores.size == 0:
        raise ValueError("scores and labels must be equal-length and non-empty")
    positives = int(np.sum(labels == PASS))
    negatives = len(labels) - positives
    if positives == 0 or negatives == 0:
        raise ValueError("ROC requires both classes present")

    points = [RocPoint(np.inf, 0.0, 0.0)]
    tp = fp = 0
    for value in sorted(set(scores.tolist()), reverse=True):
        at = scores == value
        tp += int(np.sum(at & (labels == PASS)))
        fp += int(np.sum(at & (labels != PASS)))
        points.append(RocPoint(value, fp / negatives, tp / positives))
    points.append(RocPoint(-np.inf, 1.0, 1.0))

    area = 0.0
    for prev, cur in zip(points, points[1:]):
        area += (cur.fpr - prev.fpr) * (cur.tpr + prev.tpr) / 2.0
    return RocCurve(points, area)


def auc_pairwise_oracle(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Rank-based AUC: fraction of (pass, fail) pairs ordered correctly, ties half.

    Exhaustive over every pair; kept deliberately independent of the
    threshold-sweep construction so the two can cross-check each other.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    pos = scores[labels == PASS]
    neg = scores[labels != PASS]
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("pairwise AUC requires both classes present")
    wins = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                wins += 1.0
            elif p == n:
                wins += 0.5
    return wins / (len(pos) * len(neg))
