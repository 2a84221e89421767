"""Random forest over the CART trees.

Each tree trains on a bootstrap sample of size n and considers ceil(sqrt(d))
features per split; per-tree seeds are spawned deterministically from the
forest's random_state. Scores are the mean of the trees' leaf fractions,
so a single tree with bootstrap disabled and max_features=None reproduces
the plain decision tree exactly.
"""

from __future__ import annotations

import numpy as np

from ..base import BaseEstimator, check_X_y, check_is_fitted
from .tree import DecisionTreeClassifier


class RandomForestClassifier(BaseEstimator):
    def __init__(
        self,
        n_estimators=100,
        criterion="gini",
        max_depth=None,
        min_samples_leaf=1,
        min_samples_split=2,
        max_features="sqrt",
        bootstrap=True,
        random_state=0,
    ):
        self.n_estimators = n_estimators
        self.criterion = criterion
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        n = X.shape[0]
        seed_seq = np.random.SeedSequence(self.random_state)
        children = seed_seq.spawn(self.n_estimators)
        self.estimators_ = []
        self.bootstrap_seeds_ = []
        for child in children:
            rng = np.random.default_rng(child)
            tree_seed = int(rng.integers(0, 2**31 - 1))
            self.bootstrap_seeds_.append(tree_seed)
            if self.bootstrap:
                sample = rng.integers(0, n, size=n)
            else:
                sample = np.arange(n)
            tree = DecisionTreeClassifier(
                criterion=self.criterion,
                max_depth=self.max_depth,
                min_samples_leaf=self.min_samples_leaf,
                min_samples_split=self.min_samples_split,
                max_features=self.max_features,
                random_state=tree_seed,
            )
            tree.fit(X[sample], y[sample])
            self.estimators_.append(tree)
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        return self

    def decision_scores(self, X):
        """Mean of the trees' Intrinsic leaf fractions."""
        check_is_fitted(self, "estimators_")
        if X.shape[0] == 0:
            return np.empty(0)
        scores = np.zeros(X.shape[0])
        for tree in self.estimators_:
            scores += tree.decision_scores(X)
        return scores / len(self.estimators_)

    def predict(self, X):
        return (self.decision_scores(X) >= 0.5).astype(np.int64)
