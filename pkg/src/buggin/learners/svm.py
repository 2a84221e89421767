"""Kernel SVM trained with SMO-style dual coordinate ascent.

The working pair is chosen by maximal KKT violation (most-violating pair):
i maximizes -y_t * grad_t over the "up" set, j minimizes it over the "down"
set, and optimization stops when the gap drops below ``tol``. The full
kernel matrix is cached up front, which is fine at the corpus sizes this
package targets.
"""

from __future__ import annotations

import numpy as np

from ..base import (
    BaseEstimator,
    check_X_y,
    check_is_fitted,
    check_matrix,
    check_n_features,
)
from ..exceptions import ConvergenceError, TrainingError
from .kernels import kernel_matrix, resolve_gamma
from .weights import class_weights


class KernelSVC(BaseEstimator):
    """Binary kernel SVM (labels 0/1, trained internally as -1/+1).

    Parameters
    ----------
    C : float, base box constraint; the effective per-sample bound is C
        scaled by the sample's class weight.
    kernel : 'linear' | 'poly' | 'rbf' | 'sigmoid'
    gamma : 'auto' | 'scale' | float, kernel coefficient for the
        non-linear kernels, resolved against the training matrix at fit.
    degree, coef0 : polynomial/sigmoid kernel shape.
    class_weight : None | 'balanced' | {0: w0, 1: w1}
    tol : KKT violation gap required to declare convergence.
    max_iter : cap on working-pair update passes before raising
        ConvergenceError (the error carries the final residual).
    """

    def __init__(
        self,
        C=1.0,
        kernel="rbf",
        gamma="scale",
        degree=3,
        coef0=0.0,
        class_weight=None,
        tol=1e-3,
        max_iter=10_000,
    ):
        self.C = C
        self.kernel = kernel
        self.gamma = gamma
        self.degree = degree
        self.coef0 = coef0
        self.class_weight = class_weight
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X, y01 = check_X_y(X, y)
        if len(np.unique(y01)) < 2:
            raise TrainingError("SVM needs both classes in the training data")
        n = X.shape[0]
        y_pm = np.where(y01 == 1, 1.0, -1.0)

        self.gamma_ = (
            resolve_gamma(self.gamma, X) if self.kernel != "linear" else None
        )
        w0, w1 = class_weights(self.class_weight, y01)
        C_per = self.C * np.where(y01 == 1, w1, w0)

        K = kernel_matrix(
            self.kernel, X, X, gamma=self.gamma_, degree=self.degree, coef0=self.coef0
        )

        alpha = np.zeros(n)
        f = np.zeros(n)  # sum_j alpha_j y_j K_ij, decision values without bias
        neg_E = None
        residual = np.inf
        it = 0
        for it in range(1, self.max_iter + 1):
            neg_E = y_pm - f
            up = ((y_pm > 0) & (alpha < C_per - 1e-12)) | ((y_pm < 0) & (alpha > 1e-12))
            low = ((y_pm < 0) & (alpha < C_per - 1e-12)) | ((y_pm > 0) & (alpha > 1e-12))
            if not up.any() or not low.any():
                residual = 0.0
                break
            up_vals = np.where(up, neg_E, -np.inf)
            low_vals = np.where(low, neg_E, np.inf)
            i = int(np.argmax(up_vals))
            j = int(np.argmin(low_vals))
            residual = up_vals[i] - low_vals[j]
            if residual <= self.tol:
                break

            # Analytic two-variable solve on (i, j) with box clipping.
            if y_pm[i] != y_pm[j]:
                lo = max(0.0, alpha[j] - alpha[i])
                hi = min(C_per[j], C_per[i] + alpha[j] - alpha[i])
            else:
                lo = max(0.0, alpha[i] + alpha[j] - C_per[i])
                hi = min(C_per[j], alpha[i] + alpha[j])
            eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
            eta = max(eta, 1e-12)
            E_i = f[i] - y_pm[i]
            E_j = f[j] - y_pm[j]
            alpha_j_new = np.clip(alpha[j] + y_pm[j] * (E_i - E_j) / eta, lo, hi)
            delta_j = alpha_j_new - alpha[j]
            if abs(delta_j) < 1e-14:
                # Numerically stuck pair; the gap is the honest residual.
                break
            alpha_i_new = alpha[i] + y_pm[i] * y_pm[j] * (alpha[j] - alpha_j_new)
            delta_i = alpha_i_new - alpha[i]
            alpha[i] = alpha_i_new
            alpha[j] = alpha_j_new
            f += delta_i * y_pm[i] * K[i] + delta_j * y_pm[j] * K[j]
        else:
            raise ConvergenceError(
                f"SMO hit the {self.max_iter}-pass cap (KKT residual {residual:.3e})",
                residual=residual,
            )
        if residual > self.tol:
            raise ConvergenceError(
                f"SMO stalled with KKT residual {residual:.3e} > tol {self.tol}",
                residual=residual,
            )

        # Bias from the free support vectors when there are any, otherwise
        # the midpoint of the violation interval.
        free = (alpha > 1e-8) & (alpha < C_per - 1e-8)
        if free.any():
            b = float(np.mean(y_pm[free] - f[free]))
        else:
            neg_E = y_pm - f
            up_vals = np.where(
                ((y_pm > 0) & (alpha < C_per - 1e-12)) | ((y_pm < 0) & (alpha > 1e-12)),
                neg_E,
                -np.inf,
            )
            low_vals = np.where(
                ((y_pm < 0) & (alpha < C_per - 1e-12)) | ((y_pm > 0) & (alpha > 1e-12)),
                neg_E,
                np.inf,
            )
            b = float((np.max(up_vals) + np.min(low_vals)) / 2.0)

        sv = alpha > 1e-12
        self.support_ = np.flatnonzero(sv)
        self.support_vectors_ = X[self.support_]
        self.dual_coef_ = (alpha * y_pm)[self.support_]
        self.intercept_ = b
        self.alpha_ = alpha
        self.box_constraints_ = C_per
        self.kkt_residual_ = float(max(residual, 0.0))
        self.n_iter_ = it
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        return self

    def decision_function(self, X):
        """Signed kernel margin sum_i alpha_i y_i k(x_i, x) + b."""
        check_is_fitted(self, "dual_coef_")
        X = check_matrix(X)
        check_n_features(self, X)
        if X.shape[0] == 0:
            return np.empty(0)
        K = kernel_matrix(
            self.kernel,
            X,
            self.support_vectors_,
            gamma=self.gamma_,
            degree=self.degree,
            coef0=self.coef0,
        )
        return K @ self.dual_coef_ + self.intercept_

    def predict(self, X):
        return (self.decision_function(X) >= 0.0).astype(np.int64)
