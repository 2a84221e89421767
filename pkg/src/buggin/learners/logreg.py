"""Regularized logistic regression with two solvers.

l2 is minimized with a limited-memory quasi-Newton method on the weighted
negative log-likelihood; l1 uses cyclic coordinate descent with
soft-thresholding (per-coordinate Newton steps on the smooth part). The
penalty is 1/C, the intercept is never penalized, and class weights enter
as per-sample loss weights.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize

from ..base import (
    BaseEstimator,
    check_X_y,
    check_is_fitted,
    check_matrix,
    check_n_features,
)
from ..exceptions import ConfigError, ConvergenceError, TrainingError
from .weights import sample_weights

_EPS = 1e-12


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softplus(z):
    # log(1 + e^z), stable for any magnitude.
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def nll_loss_grad(params, X, y, weights, penalty, C):
    """Weighted NLL objective and its gradient at params = [w..., b].

    The per-sample loss is written in softplus form, y*softplus(-z) +
    (1-y)*softplus(z), so the value and the gradient stay consistent to
    machine precision at extreme margins. For l1 the returned gradient is
    the smooth part plus (1/C) * sign(w), which equals the true gradient
    wherever no coordinate sits at zero.
    """
    w, b = params[:-1], params[-1]
    z = (X @ w) + b
    p = _sigmoid(z)
    loss = np.sum(weights * (y * _softplus(-z) + (1 - y) * _softplus(z)))
    residual = weights * (p - y)
    grad_w = X.T @ residual
    if sp.issparse(X):
        grad_w = np.asarray(grad_w).ravel()
    grad_b = residual.sum()
    if penalty == "l2":
        loss += (w @ w) / (2.0 * C)
        grad_w = grad_w + w / C
    elif penalty == "l1":
        loss += np.abs(w).sum() / C
        grad_w = grad_w + np.sign(w) / C
    else:
        raise ConfigError(f"unknown penalty {penalty!r}")
    return loss, np.concatenate([grad_w, [grad_b]])


class LogisticRegression(BaseEstimator):
    """Binary logistic regression.

    Parameters
    ----------
    C : float, inverse regularization strength.
    penalty : 'l1' | 'l2'; l1 requires the coordinate_descent solver.
    solver : 'lbfgs' | 'coordinate_descent'
    class_weight : None | 'balanced' | {0: w0, 1: w1}
    tol, max_iter : stopping controls; exceeding max_iter raises
        ConvergenceError carrying the final residual.
    """

    def __init__(
        self,
        C=1.0,
        penalty="l2",
        solver="lbfgs",
        class_weight=None,
        tol=1e-4,
        max_iter=1000,
    ):
        self.C = C
        self.penalty = penalty
        self.solver = solver
        self.class_weight = class_weight
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if len(np.unique(y)) < 2:
            raise TrainingError("logistic regression needs both classes")
        if self.penalty == "l1" and self.solver != "coordinate_descent":
            raise ConfigError("penalty='l1' requires solver='coordinate_descent'")
        if self.solver not in ("lbfgs", "coordinate_descent"):
            raise ConfigError(f"unknown solver {self.solver!r}")
        weights = sample_weights(self.class_weight, y)
        if self.solver == "lbfgs":
            w, b, n_iter = self._fit_lbfgs(X, y, weights)
        else:
            w, b, n_iter = self._fit_coordinate_descent(X, y, weights)
        self.coef_ = w
        self.intercept_ = float(b)
        self.n_iter_ = n_iter
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        return self

    def _fit_lbfgs(self, X, y, weights):
        x0 = np.zeros(X.shape[1] + 1)
        result = minimize(
            nll_loss_grad,
            x0,
            args=(X, y, weights, self.penalty, self.C),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": self.max_iter, "gtol": self.tol, "ftol": 1e-12},
        )
        grad_norm = float(np.max(np.abs(result.jac)))
        if not result.success and grad_norm > 10 * self.tol:
            raise ConvergenceError(
                f"lbfgs failed to converge: {result.message} "
                f"(gradient norm {grad_norm:.3e})",
                residual=grad_norm,
            )
        return result.x[:-1], result.x[-1], int(result.nit)

    def _fit_coordinate_descent(self, X, y, weights):
        n, d = X.shape
        X_csc = X.tocsc() if sp.issparse(X) else None
        lam = 1.0 / self.C
        w = np.zeros(d)
        b = 0.0
        z = np.zeros(n)
        max_delta = np.inf
        for cycle in range(1, self.max_iter + 1):
            max_delta = 0.0
            p = _sigmoid(z)
            for j in range(d):
                if X_csc is not None:
                    start, end = X_csc.indptr[j], X_csc.indptr[j + 1]
                    rows = X_csc.indices[start:end]
                    col = X_csc.data[start:end]
                else:
                    col = X[:, j]
                    rows = None
                if rows is not None:
                    pj = p[rows]
                    wj = weights[rows]
                    g = np.dot(wj * (pj - y[rows]), col)
                    h = np.dot(wj * pj * (1.0 - pj), col * col)
                else:
                    g = np.dot(weights * (p - y), col)
                    h = np.dot(weights * p * (1.0 - p), col * col)
                if self.penalty == "l2":
                    g += w[j] * lam
                    h += lam
                    if h <= _EPS:
                        continue
                    delta = -g / h
                    new_wj = w[j] + delta
                else:
                    if h <= _EPS:
                        continue
                    # Newton step on the smooth part, soft-thresholded at lam.
                    u = h * w[j] - g
                    new_wj = np.sign(u) * max(abs(u) - lam, 0.0) / h
                    delta = new_wj - w[j]
                if delta == 0.0:
                    continue
                w[j] = new_wj
                if rows is not None:
                    z[rows] += delta * col
                    p[rows] = _sigmoid(z[rows])
                else:
                    z += delta * col
                    p = _sigmoid(z)
                max_delta = max(max_delta, abs(delta))
            # Unpenalized Newton step for the intercept.
            p = _sigmoid(z)
            g_b = np.dot(weights, p - y)
            h_b = np.dot(weights, p * (1.0 - p))
            if h_b > _EPS:
                delta_b = -g_b / h_b
                b += delta_b
                z += delta_b
                max_delta = max(max_delta, abs(delta_b))
            if max_delta <= self.tol:
                return w, b, cycle
        raise ConvergenceError(
            f"coordinate descent hit the {self.max_iter}-cycle cap "
            f"(last max step {max_delta:.3e})",
            residual=max_delta,
        )

    def decision_scores(self, X):
        """Probability of the Intrinsic class, sigma(w.x + b)."""
        check_is_fitted(self, "coef_")
        X = check_matrix(X)
        check_n_features(self, X)
        if X.shape[0] == 0:
            return np.empty(0)
        z = X @ self.coef_ + self.intercept_
        return _sigmoid(np.asarray(z).ravel())

    def predict(self, X):
        return (self.decision_scores(X) >= 0.5).astype(np.int64)
