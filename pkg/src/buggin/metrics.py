"""Confusion-matrix metrics and the rank-statistic AUC-ROC.

Zero-denominator convention: the affected metric returns 0.0 and is listed
by degenerate_metrics() so reports stay renderable while flagging the
degeneracy instead of hiding it behind a NaN.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, UndefinedMetricError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


def confusion(y_true, y_pred):
    """Counts with Intrinsic (1) as the positive class."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape or y_true.ndim != 1 or y_true.size < 1:
        raise DimensionMismatchError(
            f"y_true {y_true.shape} and y_pred {y_pred.shape} must be equal-length 1-D"
        )
    tp = int(((y_true == 1) & (y_pred == 1)).sum())
    fp = int(((y_true == 0) & (y_pred == 1)).sum())
    tn = int(((y_true == 0) & (y_pred == 0)).sum())
    fn = int(((y_true == 1) & (y_pred == 0)).sum())
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def precision(c):
    return c.tp / (c.tp + c.fp) if (c.tp + c.fp) else 0.0


def recall(c):
    return c.tp / (c.tp + c.fn) if (c.tp + c.fn) else 0.0


def accuracy(c):
    return (c.tp + c.tn) / c.total if c.total else 0.0


def f1(c):
    denom = 2 * c.tp + c.fp + c.fn
    return 2 * c.tp / denom if denom else 0.0


def degenerate_metrics(c):
    """Names of metrics whose denominator is zero for these counts."""
    flags = []
    if c.tp + c.fp == 0:
        flags.append("precision")
    if c.tp + c.fn == 0:
        flags.append("recall")
    if 2 * c.tp + c.fp + c.fn == 0:
        flags.append("f1")
    return tuple(flags)


def auc_roc(y_true, scores):
    """AUC as the midrank statistic, exact under ties.

    AUC = (R_pos - n_pos(n_pos+1)/2) / (n_pos * n_neg) where R_pos is the
    midrank sum of the positive-class scores. O(n log n).
    """
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=np.float64)
    if y_true.shape != scores.shape:
        raise DimensionMismatchError("y_true and scores must have equal length")
    n_pos = int((y_true == 1).sum())
    n_neg = int((y_true == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC is undefined when only one class is present")
    order = np.argsort(scores, kind="mergesort")
    sorted_scores = scores[order]
    ranks = np.empty(scores.size, dtype=np.float64)
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        # 1-based midrank shared by the whole tie group [i, j].
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    rank_sum_pos = ranks[y_true == 1].sum()
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def holdout_metrics(y_true, y_pred, scores):
    """The five reported metrics plus degeneracy flags, as one dict."""
    counts = confusion(y_true, y_pred)
    return {
        "precision": float(precision(counts)),
        "recall": float(recall(counts)),
        "f1": float(f1(counts)),
        "accuracy": float(accuracy(counts)),
        "auc": float(auc_roc(y_true, scores)),
        "degenerate": list(degenerate_metrics(counts)),
    }
