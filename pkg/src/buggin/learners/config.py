"""Model configuration, family dispatch, and TrainedModel serialization.

A ModelConfig names one hyperparameter assignment for one family; only the
fields relevant to that family are accepted. TrainedModel wraps a fitted
estimator together with its config for the CLI train/evaluate handoff,
serialized as versioned JSON with the parameter arrays inline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..exceptions import ConfigError, TrainingError
from .forest import RandomForestClassifier
from .knn import KNeighborsClassifier
from .logreg import LogisticRegression
from .svm import KernelSVC
from .tree import DecisionTreeClassifier

MODEL_SCHEMA_VERSION = 1

FAMILIES = ("svm", "logreg", "dtree", "rforest", "knn")

_ALLOWED_PARAMS = {
    "svm": {"kernel", "gamma", "class_weight", "C", "degree", "coef0"},
    "logreg": {"C", "class_weight", "penalty", "solver"},
    "dtree": {"criterion", "max_depth", "min_samples_leaf", "min_samples_split"},
    "rforest": {
        "criterion",
        "max_depth",
        "min_samples_leaf",
        "min_samples_split",
        "n_estimators",
        "max_features",
        "bootstrap",
    },
    "knn": {"metric", "n_neighbors", "weights"},
}


def _normalize_class_weight(value):
    if value is None or value == "balanced":
        return value
    if isinstance(value, dict):
        try:
            return {0: float(value[0 if 0 in value else "0"]), 1: float(value[1 if 1 in value else "1"])}
        except KeyError as exc:
            raise ConfigError(f"class_weight mapping needs keys 0 and 1: {value!r}") from exc
    raise ConfigError(f"invalid class_weight {value!r}")


@dataclass(frozen=True)
class ModelConfig:
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        allowed = _ALLOWED_PARAMS[self.family]
        params = dict(self.params)
        extra = set(params) - allowed
        if extra:
            raise ConfigError(
                f"family {self.family!r} does not accept parameter(s) "
                + ", ".join(sorted(extra))
            )
        if "class_weight" in params:
            params["class_weight"] = _normalize_class_weight(params["class_weight"])
        if self.family == "logreg":
            if params.get("penalty") == "l1" and params.get("solver") == "lbfgs":
                raise ConfigError("penalty='l1' is incompatible with solver='lbfgs'")
        if params.get("min_samples_split", 2) < 2:
            raise ConfigError("min_samples_split must be >= 2")
        object.__setattr__(self, "params", params)

    def to_dict(self):
        params = {}
        for key, value in self.params.items():
            if key == "class_weight" and isinstance(value, dict):
                value = {str(k): v for k, v in value.items()}
            params[key] = value
        return {"family": self.family, "params": params}

    @classmethod
    def from_dict(cls, data):
        return cls(family=data["family"], params=dict(data.get("params", {})))

    def label(self):
        """Compact human-readable id used in report tables."""
        parts = []
        for key in sorted(self.params):
            value = self.params[key]
            if key == "class_weight" and isinstance(value, dict):
                value = f"{value[0]:g}/{value[1]:g}"
            parts.append(f"{key}={value}")
        return f"{self.family}({', '.join(parts)})"


def build_estimator(config, seed=0):
    """Construct the estimator named by a config; randomness uses `seed`."""
    params = dict(config.params)
    if config.family == "svm":
        return KernelSVC(
            C=params.get("C", 1.0),
            kernel=params.get("kernel", "rbf"),
            gamma=params.get("gamma", "scale"),
            degree=params.get("degree", 3),
            coef0=params.get("coef0", 0.0),
            class_weight=params.get("class_weight"),
        )
    if config.family == "logreg":
        return LogisticRegression(
            C=params.get("C", 1.0),
            penalty=params.get("penalty", "l2"),
            solver=params.get("solver", "lbfgs"),
            class_weight=params.get("class_weight"),
        )
    if config.family == "dtree":
        return DecisionTreeClassifier(
            criterion=params.get("criterion", "gini"),
            max_depth=params.get("max_depth"),
            min_samples_leaf=params.get("min_samples_leaf", 1),
            min_samples_split=params.get("min_samples_split", 2),
        )
    if config.family == "rforest":
        return RandomForestClassifier(
            n_estimators=params.get("n_estimators", 100),
            criterion=params.get("criterion", "gini"),
            max_depth=params.get("max_depth"),
            min_samples_leaf=params.get("min_samples_leaf", 1),
            min_samples_split=params.get("min_samples_split", 2),
            max_features=params.get("max_features", "sqrt"),
            bootstrap=params.get("bootstrap", True),
            random_state=seed,
        )
    if config.family == "knn":
        return KNeighborsClassifier(
            n_neighbors=params.get("n_neighbors", 3),
            metric=params.get("metric", "euclidean"),
            weights=params.get("weights", "uniform"),
        )
    raise ConfigError(f"unknown family {config.family!r}")


@dataclass
class TrainedModel:
    family: str
    config: ModelConfig
    estimator: object
    n_features: int


def train(config, matrix, seed=0):
    """Fit one configuration on a FeatureMatrix; deterministic given seed."""
    y = matrix.labels
    if (y == 0).sum() < 2 or (y == 1).sum() < 2:
        raise TrainingError("training requires at least 2 samples of each class")
    estimator = build_estimator(config, seed=seed)
    estimator.fit(matrix.values, y)
    return TrainedModel(
        family=config.family,
        config=config,
        estimator=estimator,
        n_features=matrix.n_cols,
    )


def predict(model, matrix):
    return model.estimator.predict(matrix.values)


def decision_scores(model, matrix):
    """Probability-like score (or signed margin for SVM) per row."""
    est = model.estimator
    if isinstance(est, KernelSVC):
        return est.decision_function(matrix.values)
    return est.decision_scores(matrix.values)


def _tree_arrays(tree):
    return {
        "feature": tree.feature_.tolist(),
        "threshold": tree.threshold_.tolist(),
        "left": tree.left_.tolist(),
        "right": tree.right_.tolist(),
        "value": tree.value_.tolist(),
        "n_node_samples": tree.n_node_samples_.tolist(),
    }


def _restore_tree(data, params, n_features):
    tree = DecisionTreeClassifier(**params)
    tree.feature_ = np.asarray(data["feature"], dtype=np.int64)
    tree.threshold_ = np.asarray(data["threshold"], dtype=np.float64)
    tree.left_ = np.asarray(data["left"], dtype=np.int64)
    tree.right_ = np.asarray(data["right"], dtype=np.int64)
    tree.value_ = np.asarray(data["value"], dtype=np.float64)
    tree.n_node_samples_ = np.asarray(data["n_node_samples"], dtype=np.int64)
    tree.n_features_in_ = n_features
    tree.classes_ = np.array([0, 1])
    return tree


def model_to_json(model):
    est = model.estimator
    if model.family == "svm":
        parameters = {
            "support_vectors": np.asarray(
                est.support_vectors_.toarray()
                if sp.issparse(est.support_vectors_)
                else est.support_vectors_
            ).tolist(),
            "dual_coef": est.dual_coef_.tolist(),
            "intercept": est.intercept_,
            "gamma": est.gamma_,
        }
    elif model.family == "logreg":
        parameters = {"coef": est.coef_.tolist(), "intercept": est.intercept_}
    elif model.family == "dtree":
        parameters = _tree_arrays(est)
    elif model.family == "rforest":
        parameters = {
            "trees": [_tree_arrays(t) for t in est.estimators_],
            "bootstrap_seeds": est.bootstrap_seeds_,
        }
    elif model.family == "knn":
        X = est._X
        parameters = {
            "train_matrix": (X.toarray() if sp.issparse(X) else X).tolist(),
            "train_labels": est._y.tolist(),
        }
    else:
        raise ConfigError(f"unknown family {model.family!r}")
    return json.dumps(
        {
            "schema_version": MODEL_SCHEMA_VERSION,
            "family": model.family,
            "config": model.config.to_dict(),
            "n_features": model.n_features,
            "parameters": parameters,
        },
        indent=2,
        sort_keys=True,
    )


def model_from_json(text):
    data = json.loads(text)
    if data.get("schema_version") != MODEL_SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported model schema version {data.get('schema_version')!r}"
        )
    config = ModelConfig.from_dict(data["config"])
    n_features = int(data["n_features"])
    parameters = data["parameters"]
    family = data["family"]
    est = build_estimator(config)
    if family == "svm":
        est.support_vectors_ = np.asarray(parameters["support_vectors"])
        est.dual_coef_ = np.asarray(parameters["dual_coef"])
        est.intercept_ = float(parameters["intercept"])
        est.gamma_ = parameters["gamma"]
        est.n_features_in_ = n_features
        est.classes_ = np.array([0, 1])
    elif family == "logreg":
        est.coef_ = np.asarray(parameters["coef"])
        est.intercept_ = float(parameters["intercept"])
        est.n_features_in_ = n_features
        est.classes_ = np.array([0, 1])
    elif family == "dtree":
        est = _restore_tree(dict(parameters), est.get_params(), n_features)
    elif family == "rforest":
        forest_params = est.get_params()
        tree_params = {
            k: forest_params[k]
            for k in (
                "criterion",
                "max_depth",
                "min_samples_leaf",
                "min_samples_split",
                "max_features",
            )
        }
        est.estimators_ = [
            _restore_tree(t, dict(tree_params, random_state=seed), n_features)
            for t, seed in zip(parameters["trees"], parameters["bootstrap_seeds"])
        ]
        est.bootstrap_seeds_ = list(parameters["bootstrap_seeds"])
        est.n_features_in_ = n_features
        est.classes_ = np.array([0, 1])
    elif family == "knn":
        est._X = np.asarray(parameters["train_matrix"])
        est._y = np.asarray(parameters["train_labels"], dtype=np.int64)
        est.n_features_in_ = n_features
        est.classes_ = np.array([0, 1])
    else:
        raise ConfigError(f"unknown family {family!r}")
    return TrainedModel(
        family=family, config=config, estimator=est, n_features=n_features
    )
