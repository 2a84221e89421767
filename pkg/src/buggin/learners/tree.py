"""CART decision tree: binary threshold splits at midpoints of consecutive
sorted unique feature values, chosen by maximal impurity gain.

Ties are broken toward the lowest feature index, then the lowest threshold.
Features are scanned in fixed-size blocks (densified per block for sparse
input) so description-sized vocabularies never materialize a full dense
matrix.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..base import (
    BaseEstimator,
    check_X_y,
    check_is_fitted,
    check_matrix,
    check_n_features,
)
from ..exceptions import ConfigError, TrainingError

_BLOCK = 1024


def _impurity(pos, total, criterion):
    """Vectorized impurity of node(s) with `pos` positives out of `total`."""
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(total > 0, pos / np.maximum(total, 1), 0.0)
    if criterion == "gini":
        return 2.0 * p * (1.0 - p)
    q = 1.0 - p
    logp = np.where(p > 0, np.log2(np.maximum(p, 1e-300)), 0.0)
    logq = np.where(q > 0, np.log2(np.maximum(q, 1e-300)), 0.0)
    return -(p * logp + q * logq)


def best_split_in_block(values, y, criterion, min_samples_leaf):
    """Best (gain, column, threshold) over the dense feature block `values`.

    Returns (gain, col_in_block, threshold) or None when no valid split
    exists. Scanning is ascending in both column and threshold, and only a
    strictly larger gain replaces the incumbent, which realizes the
    documented tie-break.
    """
    m, f = values.shape
    order = np.argsort(values, axis=0, kind="stable")
    sorted_vals = np.take_along_axis(values, order, axis=0)
    sorted_y = y[order]
    pos_cum = np.cumsum(sorted_y, axis=0)
    total_pos = pos_cum[-1]

    n_left = np.arange(1, m, dtype=np.float64)[:, None]
    n_right = m - n_left
    pos_left = pos_cum[:-1].astype(np.float64)
    pos_right = total_pos[None, :] - pos_left

    valid = sorted_vals[1:] != sorted_vals[:-1]
    if min_samples_leaf > 1:
        k = min_samples_leaf
        valid = valid & (n_left >= k) & (n_right >= k)
    if not valid.any():
        return None

    parent = _impurity(total_pos.astype(np.float64), np.full(f, float(m)), criterion)
    child = (n_left / m) * _impurity(pos_left, n_left, criterion) + (
        n_right / m
    ) * _impurity(pos_right, n_right, criterion)
    gains = np.where(valid, parent[None, :] - child, -np.inf)

    best = None
    for col in range(f):
        col_gains = gains[:, col]
        idx = int(np.argmax(col_gains))
        gain = col_gains[idx]
        if gain == -np.inf:
            continue
        if best is None or gain > best[0]:
            threshold = (sorted_vals[idx, col] + sorted_vals[idx + 1, col]) / 2.0
            best = (float(gain), col, float(threshold))
    return best


class DecisionTreeClassifier(BaseEstimator):
    """CART classifier for 0/1 labels.

    Parameters
    ----------
    criterion : 'gini' | 'entropy'
    max_depth : int or None for unbounded.
    min_samples_leaf : both children of a split must keep at least this
        many samples.
    min_samples_split : nodes smaller than this become leaves; must be >= 2.
    max_features : None (all), 'sqrt', or an int; the number of feature
        candidates drawn per split (used by the forest).
    random_state : seed for the per-split feature draw; irrelevant when
        max_features is None.
    """

    def __init__(
        self,
        criterion="gini",
        max_depth=None,
        min_samples_leaf=1,
        min_samples_split=2,
        max_features=None,
        random_state=None,
    ):
        self.criterion = criterion
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.random_state = random_state

    def _n_candidate_features(self, d):
        if self.max_features is None:
            return d
        if self.max_features == "sqrt":
            return max(1, int(np.ceil(np.sqrt(d))))
        return min(int(self.max_features), d)

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if self.criterion not in ("gini", "entropy"):
            raise ConfigError(f"unknown criterion {self.criterion!r}")
        if self.min_samples_split < 2:
            raise ConfigError("min_samples_split must be >= 2")
        if X.shape[0] == 0:
            raise TrainingError("cannot fit a tree on an empty matrix")
        self._rng = np.random.default_rng(self.random_state)
        self._nodes = []
        self._grow(X, y, np.arange(X.shape[0]), depth=0)
        self.feature_ = np.array([n["feature"] for n in self._nodes], dtype=np.int64)
        self.threshold_ = np.array([n["threshold"] for n in self._nodes])
        self.left_ = np.array([n["left"] for n in self._nodes], dtype=np.int64)
        self.right_ = np.array([n["right"] for n in self._nodes], dtype=np.int64)
        self.value_ = np.array([n["value"] for n in self._nodes])
        self.n_node_samples_ = np.array(
            [n["n_samples"] for n in self._nodes], dtype=np.int64
        )
        del self._nodes, self._rng
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        return self

    def _grow(self, X, y, idx, depth):
        node_id = len(self._nodes)
        y_node = y[idx]
        n = idx.size
        pos = int(y_node.sum())
        node = {
            "feature": -1,
            "threshold": np.nan,
            "left": -1,
            "right": -1,
            "value": pos / n,
            "n_samples": n,
        }
        self._nodes.append(node)

        if (
            (self.max_depth is not None and depth >= self.max_depth)
            or n < self.min_samples_split
            or pos == 0
            or pos == n
        ):
            return node_id

        d = X.shape[1]
        n_candidates = self._n_candidate_features(d)
        if n_candidates < d:
            features = np.sort(
                self._rng.choice(d, size=n_candidates, replace=False)
            )
        else:
            features = np.arange(d)

        best = None  # (gain, feature, threshold)
        X_node = X[idx]
        for start in range(0, features.size, _BLOCK):
            cols = features[start : start + _BLOCK]
            block = X_node[:, cols]
            block = block.toarray() if sp.issparse(block) else np.asarray(block)
            found = best_split_in_block(
                block, y_node, self.criterion, self.min_samples_leaf
            )
            if found is None:
                continue
            gain, col, threshold = found
            feature = int(cols[col])
            if best is None or gain > best[0]:
                best = (gain, feature, threshold)

        if best is None or best[0] <= 0.0:
            return node_id
        _, feature, threshold = best
        col = X[idx][:, [feature]]
        col = col.toarray().ravel() if sp.issparse(col) else np.asarray(col).ravel()
        go_left = col <= threshold
        left_id = self._grow(X, y, idx[go_left], depth + 1)
        right_id = self._grow(X, y, idx[~go_left], depth + 1)
        node["feature"] = feature
        node["threshold"] = threshold
        node["left"] = left_id
        node["right"] = right_id
        return node_id

    def apply(self, X):
        """Leaf index reached by every row."""
        check_is_fitted(self, "feature_")
        X = check_matrix(X)
        check_n_features(self, X)
        n = X.shape[0]
        nodes = np.zeros(n, dtype=np.int64)
        active = np.arange(n)
        while active.size:
            current = nodes[active]
            internal = self.feature_[current] >= 0
            active = active[internal]
            if not active.size:
                break
            current = nodes[active]
            feats = self.feature_[current]
            if sp.issparse(X):
                col = np.asarray(X[active, feats]).ravel()
            else:
                col = X[active, feats]
            go_left = col <= self.threshold_[current]
            nodes[active] = np.where(
                go_left, self.left_[current], self.right_[current]
            )
        return nodes

    def decision_scores(self, X):
        """Fraction of Intrinsic training samples in the reached leaf."""
        if X.shape[0] == 0:
            return np.empty(0)
        return self.value_[self.apply(X)]

    def predict(self, X):
        return (self.decision_scores(X) >= 0.5).astype(np.int64)
