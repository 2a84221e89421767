"""Class weighting for the loss-weighted learners (SVM, logistic regression).

Modes: None (uniform), "balanced" (n / (2 * n_c)), or an explicit mapping
{0: w0, 1: w1} such as {0: 0.4, 1: 0.6} for weighting Intrinsic over
NonIntrinsic.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import TrainingError


def class_weights(mode, labels):
    """Resolve a weighting mode to the per-class pair (w0, w1)."""
    y = np.asarray(labels)
    n0, n1 = int((y == 0).sum()), int((y == 1).sum())
    if n0 == 0 or n1 == 0:
        raise TrainingError("class weights need both classes present")
    if mode is None:
        return 1.0, 1.0
    if mode == "balanced":
        n = n0 + n1
        return n / (2.0 * n0), n / (2.0 * n1)
    if isinstance(mode, dict):
        try:
            return float(mode[0]), float(mode[1])
        except KeyError as exc:
            raise ValueError(f"class_weight mapping must have keys 0 and 1: {mode!r}") from exc
    raise ValueError(f"unsupported class_weight mode {mode!r}")


def sample_weights(mode, labels):
    """Per-sample weights, indexing the class weights by label."""
    w0, w1 = class_weights(mode, labels)
    y = np.asarray(labels)
    return np.where(y == 1, w1, w0).astype(np.float64)
