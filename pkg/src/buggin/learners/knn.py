"""k-nearest-neighbors classifier with euclidean/manhattan metrics.

Distances are computed in row chunks so large sparse matrices never
densify wholesale. Exact-zero distances dominate under distance weighting,
and prediction ties go to the class of the single nearest neighbor.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

from ..base import (
    BaseEstimator,
    check_X_y,
    check_is_fitted,
    check_matrix,
    check_n_features,
)
from ..exceptions import ConfigError

_CHUNK = 256


def _euclidean_chunk(A, B):
    dots = A @ B.T
    dots = dots.toarray() if sp.issparse(dots) else np.asarray(dots)
    if sp.issparse(A):
        a2 = np.asarray(A.multiply(A).sum(axis=1)).ravel()
        b2 = np.asarray(B.multiply(B).sum(axis=1)).ravel()
    else:
        a2 = (A * A).sum(axis=1)
        b2 = (B * B).sum(axis=1)
    d2 = a2[:, None] + b2[None, :] - 2.0 * dots
    np.maximum(d2, 0.0, out=d2)
    return np.sqrt(d2)


def _manhattan_chunk(A, B):
    A = A.toarray() if sp.issparse(A) else np.asarray(A)
    B = B.toarray() if sp.issparse(B) else np.asarray(B)
    return cdist(A, B, metric="cityblock")


class KNeighborsClassifier(BaseEstimator):
    def __init__(self, n_neighbors=3, metric="euclidean", weights="uniform"):
        self.n_neighbors = n_neighbors
        self.metric = metric
        self.weights = weights

    def fit(self, X, y):
        if self.metric not in ("euclidean", "manhattan"):
            raise ConfigError(f"unknown metric {self.metric!r}")
        if self.weights not in ("uniform", "distance"):
            raise ConfigError(f"unknown weights {self.weights!r}")
        X, y = check_X_y(X, y)
        if X.shape[0] < self.n_neighbors:
            raise ConfigError(
                f"n_neighbors={self.n_neighbors} exceeds {X.shape[0]} training rows"
            )
        self._X = X
        self._y = y
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        return self

    def kneighbors(self, X):
        """Distances and training indices of the k nearest rows, nearest
        first; distance ties resolve to the lowest training index."""
        check_is_fitted(self, "_X")
        X = check_matrix(X)
        check_n_features(self, X)
        k = self.n_neighbors
        dist_fn = _euclidean_chunk if self.metric == "euclidean" else _manhattan_chunk
        all_dists = np.empty((X.shape[0], k))
        all_idx = np.empty((X.shape[0], k), dtype=np.int64)
        for start in range(0, X.shape[0], _CHUNK):
            chunk = X[start : start + _CHUNK]
            d = dist_fn(chunk, self._X)
            order = np.argsort(d, axis=1, kind="stable")[:, :k]
            all_idx[start : start + _CHUNK] = order
            all_dists[start : start + _CHUNK] = np.take_along_axis(d, order, axis=1)
        return all_dists, all_idx

    def decision_scores(self, X):
        """(Weighted) fraction of Intrinsic labels among the k neighbors."""
        if X.shape[0] == 0:
            return np.empty(0)
        dists, idx = self.kneighbors(X)
        labels = self._y[idx].astype(np.float64)
        if self.weights == "uniform":
            return labels.mean(axis=1)
        scores = np.empty(X.shape[0])
        for i in range(X.shape[0]):
            zero = dists[i] == 0.0
            if zero.any():
                scores[i] = labels[i, zero].mean()
            else:
                w = 1.0 / dists[i]
                scores[i] = (w * labels[i]).sum() / w.sum()
        return scores

    def predict(self, X):
        """Majority (or weighted) vote; ties go to the nearest neighbor."""
        if X.shape[0] == 0:
            return np.empty(0, dtype=np.int64)
        dists, idx = self.kneighbors(X)
        labels = self._y[idx].astype(np.float64)
        if self.weights == "uniform":
            scores = labels.mean(axis=1)
        else:
            scores = self.decision_scores(X)
        out = np.where(scores > 0.5, 1, 0).astype(np.int64)
        tied = scores == 0.5
        if tied.any():
            out[tied] = self._y[idx[tied, 0]]
        return out
