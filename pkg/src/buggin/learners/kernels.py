"""Kernel functions and gamma resolution shared by the SVM trainer."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..exceptions import DimensionMismatchError

KERNELS = ("linear", "poly", "rbf", "sigmoid")


def _dot_matrix(A, B):
    result = A @ B.T
    return result.toarray() if sp.issparse(result) else np.asarray(result)


def _row_sq_norms(X):
    if sp.issparse(X):
        return np.asarray(X.multiply(X).sum(axis=1)).ravel()
    return (X * X).sum(axis=1)


def kernel_matrix(kind, A, B, gamma=None, degree=3, coef0=0.0):
    """Pairwise kernel values between the rows of A and B."""
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatchError(
            f"kernel inputs have {A.shape[1]} and {B.shape[1]} columns"
        )
    dots = _dot_matrix(A, B)
    if kind == "linear":
        return dots
    if gamma is None or gamma <= 0:
        raise ValueError(f"kernel {kind!r} requires gamma > 0, got {gamma}")
    if kind == "rbf":
        d2 = _row_sq_norms(A)[:, None] + _row_sq_norms(B)[None, :] - 2.0 * dots
        np.maximum(d2, 0.0, out=d2)
        return np.exp(-gamma * d2)
    if kind == "poly":
        return (gamma * dots + coef0) ** degree
    if kind == "sigmoid":
        return np.tanh(gamma * dots + coef0)
    raise ValueError(f"unknown kernel {kind!r}")


def kernel_eval(kind, x, x2, gamma=None, degree=3, coef0=0.0):
    """Kernel value for a single pair of vectors."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    x2 = np.atleast_2d(np.asarray(x2, dtype=np.float64))
    return float(kernel_matrix(kind, x, x2, gamma=gamma, degree=degree, coef0=coef0)[0, 0])


def resolve_gamma(mode, X):
    """Resolve 'auto'/'scale' to a concrete gamma for the given matrix.

    auto -> 1/d. scale -> 1/(d * Var) with Var the population variance over
    all n*d entries (implicit zeros of sparse rows included); a constant
    matrix falls back to auto.
    """
    if isinstance(mode, (int, float)) and not isinstance(mode, bool):
        return float(mode)
    d = X.shape[1]
    if d < 1:
        raise ValueError("matrix must have at least one column")
    if mode == "auto":
        return 1.0 / d
    if mode == "scale":
        total = X.shape[0] * d
        if sp.issparse(X):
            s1 = X.sum()
            s2 = X.multiply(X).sum()
        else:
            s1 = float(np.sum(X))
            s2 = float(np.sum(X * X))
        var = s2 / total - (s1 / total) ** 2
        if var <= 0:
            return 1.0 / d
        return 1.0 / (d * var)
    raise ValueError(f"gamma mode must be 'auto', 'scale', or a number, got {mode!r}")
