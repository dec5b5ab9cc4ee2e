"""Confusion-matrix metrics and ROC-AUC.

Conventions, pinned for reproducibility:
  - predicted positive iff score >= threshold (ties predict positive);
  - any metric with a zero denominator is defined as 0;
  - AUC counts a tied positive/negative pair as 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_consistent_length


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    auc: float


def confusion(scores, labels, threshold: float = 0.5) -> ConfusionMatrix:
    """Count TP/FP/TN/FN at the given decision threshold."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n = check_consistent_length(scores, labels)
    if n == 0:
        raise ValueError("empty input")
    if not np.isfinite(threshold):
        raise ValueError("threshold must be finite")
    predicted = scores >= threshold
    actual = labels == 1
    tp = int(np.sum(predicted & actual))
    fp = int(np.sum(predicted & ~actual))
    tn = int(np.sum(~predicted & ~actual))
    fn = int(np.sum(~predicted & actual))
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def _ratio(num: float, denom: float) -> float:
    return num / denom if denom > 0 else 0.0


def accuracy(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tp + cm.tn, cm.total)


def precision(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tp, cm.tp + cm.fp)


def recall(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tp, cm.tp + cm.fn)


def f1(cm: ConfusionMatrix) -> float:
    p = precision(cm)
    r = recall(cm)
    return _ratio(2.0 * p * r, p + r)


def _split_by_class(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    check_consistent_length(scores, labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("AUC is undefined without both a positive and a negative example")
    return pos, neg


def auc(scores, labels) -> float:
    """Area under the ROC curve by threshold sweep with trapezoidal integration.

    Scores tied at the same value are swept as one threshold step, which
    credits each tied positive/negative pair exactly 0.5 and makes the result
    agree with :func:`auc_pairwise_oracle` to the last bit.
    """
    pos, neg = _split_by_class(scores, labels)
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]

    area = 0.0
    tp = fp = 0
    i = 0
    n = len(sorted_scores)
    while i < n:
        j = i
        while j < n and sorted_scores[j] == sorted_scores[i]:
            j += 1
        block = sorted_labels[i:j]
        tp_next = tp + int(np.sum(block == 1))
        fp_next = fp + int(np.sum(block == 0))
        area += (fp_next - fp) * (tp_next + tp) / 2.0
        tp, fp = tp_next, fp_next
        i = j
    return area / (len(pos) * len(neg))


def auc_pairwise_oracle(scores, labels) -> float:
    """Independent O(n^2) cross-check: fraction of correctly ordered
    positive/negative pairs, ties counted as half."""
    pos, neg = _split_by_class(scores, labels)
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


def compute_report(scores, labels, threshold: float = 0.5) -> MetricsReport:
    cm = confusion(scores, labels, threshold)
    return MetricsReport(
        accuracy=accuracy(cm),
        precision=precision(cm),
        recall=recall(cm),
        f1=f1(cm),
        auc=auc(scores, labels),
    )


def report_csv_row(model: str, embedding: str, split: str, report: MetricsReport) -> str:
    """One CSV row in the layout (model, embedding, split, auc, f1, acc)."""
    return f"{model},{embedding},{split},{report.auc!r},{report.f1!r},{report.accuracy!r}"
