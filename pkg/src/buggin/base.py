"""Estimator base class and shared validation helpers.

Every learner in this package follows the scikit-learn estimator protocol:
constructor arguments are stored verbatim, ``fit`` computes state into
trailing-underscore attributes, and ``get_params``/``set_params`` expose the
constructor arguments so the estimators compose with the wider ecosystem
(cloning, grid drivers, pipelines).
"""

from __future__ import annotations

import hashlib
import inspect

import numpy as np
import scipy.sparse as sp

from .exceptions import DimensionMismatchError


class BaseEstimator:
    """Parameter bookkeeping shared by all estimators.

    Subclasses must accept all hyperparameters as explicit keyword
    arguments in ``__init__`` and assign them to attributes of the same
    name, nothing else.
    """

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return sorted(
            name
            for name, p in sig.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        )

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"invalid parameter {name!r} for {type(self).__name__}"
                )
            setattr(self, name, value)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in sorted(self.get_params().items()))
        return f"{type(self).__name__}({args})"


def check_matrix(X):
    """Coerce X to a 2-D float ndarray or CSR matrix, without copying CSR input."""
    if sp.issparse(X):
        return X.tocsr()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-D matrix, got ndim={X.ndim}")
    return X


def check_X_y(X, y):
    X = check_matrix(X)
    y = np.asarray(y)
    if y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DimensionMismatchError(
            f"X has {X.shape[0]} rows but y has shape {y.shape}"
        )
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0/1 encoded")
    return X, y.astype(np.int64)


def check_n_features(est, X):
    expected = getattr(est, "n_features_in_", None)
    if expected is not None and X.shape[1] != expected:
        raise DimensionMismatchError(
            f"{type(est).__name__} was fitted with {expected} features, "
            f"got {X.shape[1]}"
        )


def check_is_fitted(est, attr):
    if not hasattr(est, attr):
        raise ValueError(
            f"{type(est).__name__} is not fitted yet; call fit() first"
        )


def as_dense(X):
    return X.toarray() if sp.issparse(X) else np.asarray(X)


def stable_seed(seed, label):
    """Derive a child seed from (seed, label) via a stable hash.

    Used so that every random stage of a run draws from its own stream
    while all randomness still flows from one user-facing seed.
    """
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
