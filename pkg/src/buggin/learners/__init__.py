"""Native implementations of the five classifier families.

All estimators follow the fit/predict protocol with scikit-learn style
parameter handling; `config.train` / `config.predict` /
`config.decision_scores` provide the family-dispatched functional surface
used by the tuning and pipeline layers.
"""

from .config import (
    FAMILIES,
    ModelConfig,
    TrainedModel,
    build_estimator,
    decision_scores,
    model_from_json,
    model_to_json,
    predict,
    train,
)
from .forest import RandomForestClassifier
from .kernels import kernel_eval, kernel_matrix, resolve_gamma
from .knn import KNeighborsClassifier
from .logreg import LogisticRegression, nll_loss_grad
from .svm import KernelSVC
from .tree import DecisionTreeClassifier
from .weights import class_weights, sample_weights

__all__ = [
    "FAMILIES",
    "ModelConfig",
    "TrainedModel",
    "build_estimator",
    "decision_scores",
    "model_from_json",
    "model_to_json",
    "predict",
    "train",
    "RandomForestClassifier",
    "kernel_eval",
    "kernel_matrix",
    "resolve_gamma",
    "KNeighborsClassifier",
    "LogisticRegression",
    "nll_loss_grad",
    "KernelSVC",
    "DecisionTreeClassifier",
    "class_weights",
    "sample_weights",
]
