"""SMOTE oversampling of the minority class.

Synthetic rows are convex interpolations x + u * (x_nn - x) between a
minority sample and one of its k nearest minority neighbors (Euclidean),
with u drawn uniformly from [0, 1). Base samples are cycled round-robin
until the class counts are equal. Sparse rows are interpolated in sparse
form (union of supports) and are deliberately not re-normalized: synthetic
points live between the originals, exactly as the formula says.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .base import BaseEstimator
from .exceptions import BalanceError, InsufficientMinorityError
from .features import FeatureMatrix


@dataclass(frozen=True)
class SmoteConfig:
    k_neighbors: int = 5
    seed: int = 0
    target: str = "equalize"

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if self.target != "equalize":
            raise ValueError(f"unsupported target {self.target!r}")


def _pairwise_sq_dists(X):
    if sp.issparse(X):
        gram = (X @ X.T).toarray()
    else:
        gram = X @ X.T
    norms = np.diag(gram).copy()
    d2 = norms[:, None] + norms[None, :] - 2.0 * gram
    np.maximum(d2, 0.0, out=d2)
    return d2


class SmoteOversampler(BaseEstimator):
    """Equalize class counts by synthesizing minority rows.

    Deterministic for a fixed seed; original rows are passed through
    unchanged and in order, synthetic rows are appended with fresh ids.
    """

    def __init__(self, k_neighbors=5, seed=0):
        self.k_neighbors = k_neighbors
        self.seed = seed

    def fit_resample(self, matrix):
        y = matrix.labels
        n0, n1 = int((y == 0).sum()), int((y == 1).sum())
        if n0 == 0 or n1 == 0:
            raise BalanceError("both classes must be present to balance")
        if n0 == n1:
            return matrix
        minority = 0 if n0 < n1 else 1
        minority_idx = np.flatnonzero(y == minority)
        m = minority_idx.size
        if m < 2:
            raise InsufficientMinorityError(
                f"minority class has {m} sample(s); need at least 2 to interpolate"
            )
        k = min(self.k_neighbors, m - 1)
        needed = abs(n0 - n1)

        X_min = matrix.values[minority_idx]
        d2 = _pairwise_sq_dists(X_min)
        np.fill_diagonal(d2, np.inf)
        # Stable argsort so neighbor order (and thus the draw) is reproducible.
        neighbor_order = np.argsort(d2, axis=1, kind="stable")[:, :k]

        rng = np.random.default_rng(self.seed)
        synth_rows = []
        synth_ids = []
        existing = set(matrix.row_ids)
        for s in range(needed):
            base = s % m
            nn = neighbor_order[base, rng.integers(0, k)]
            u = rng.random()
            x = X_min[base]
            x_nn = X_min[nn]
            synth_rows.append(x + u * (x_nn - x))
            synth_id = f"synthetic:{s + 1:04d}"
            while synth_id in existing:
                synth_id += "+"
            existing.add(synth_id)
            synth_ids.append(synth_id)

        if sp.issparse(matrix.values):
            values = sp.vstack([matrix.values] + synth_rows, format="csr")
        else:
            values = np.vstack([matrix.values] + [np.asarray(r) for r in synth_rows])
        labels = np.concatenate(
            [matrix.labels, np.full(needed, minority, dtype=np.int64)]
        )
        return FeatureMatrix(
            row_ids=matrix.row_ids + tuple(synth_ids), values=values, labels=labels
        )


def smote(matrix, config):
    """Functional form of SmoteOversampler for one-off calls."""
    return SmoteOversampler(k_neighbors=config.k_neighbors, seed=config.seed).fit_resample(
        matrix
    )
