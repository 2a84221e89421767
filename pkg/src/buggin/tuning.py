"""Stratified k-fold cross-validation and exhaustive grid search.

Fold assignment shuffles within each class and then deals samples
round-robin, with the dealing position carried over between classes so
both invariants hold at once: per-class fold counts differ by at most one,
and total fold sizes differ by at most one.

Grid search evaluates every configuration over the k folds, records
mean/std of precision, recall, F1, accuracy, and AUC, and picks the argmax
of the mean selection metric; enumeration order breaks ties and failed
(non-converging) configurations are recorded but never abort the search.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field

import numpy as np

from .base import stable_seed
from .exceptions import (
    ConvergenceError,
    GridSearchError,
    StratificationError,
    TrainingError,
)
from .learners import ModelConfig, decision_scores, predict, train
from .metrics import holdout_metrics

METRIC_NAMES = ("precision", "recall", "f1", "accuracy", "auc")


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    fold_of: np.ndarray

    def __len__(self):
        return self.fold_of.shape[0]

    def iter_folds(self):
        for fold in range(self.k):
            val = np.flatnonzero(self.fold_of == fold)
            trn = np.flatnonzero(self.fold_of != fold)
            yield trn, val


def stratified_kfold(labels, k, seed):
    """Deterministic stratified fold assignment for 0/1 labels.

    A class smaller than k is allowed (its samples spread over a subset of
    folds, staying within the one-sample bound); an absent class is not.
    """
    y = np.asarray(labels, dtype=np.int64)
    if k < 2:
        raise StratificationError(f"k must be >= 2, got {k}")
    if k > y.shape[0]:
        raise StratificationError(f"k={k} exceeds the {y.shape[0]} samples")
    fold_of = np.full(y.shape[0], -1, dtype=np.int64)
    rng = np.random.default_rng(seed)
    position = 0
    for c in (0, 1):
        idx = np.flatnonzero(y == c)
        if idx.size == 0:
            raise StratificationError(f"class {c} is absent; cannot stratify")
        shuffled = rng.permutation(idx)
        for sample in shuffled:
            fold_of[sample] = position % k
            position += 1
    return FoldPlan(k=k, seed=seed, fold_of=fold_of)


_CLASS_WEIGHT_GRID = ("balanced", {0: 0.4, 1: 0.6}, {0: 0.6, 1: 0.4})
_DEPTH_GRID = (1, 2, 3)
_LEAF_GRID = (1, 2, 3)
# min_samples_split is nominally {1, 2, 3}, but a 1-sample split is
# meaningless; the invalid value is dropped during expansion.
_SPLIT_GRID = (1, 2, 3)


def grid_expand(family):
    """The full hyperparameter grid of a family, invalid combos removed.

    Enumeration order is the documented field order below and is stable
    across runs; it is the tie-break order for best-config selection.
    """
    configs = []
    if family == "svm":
        for kernel in ("linear", "poly", "rbf", "sigmoid"):
            for class_weight in _CLASS_WEIGHT_GRID:
                for gamma in ("auto", "scale"):
                    configs.append(
                        ModelConfig(
                            "svm",
                            {"kernel": kernel, "class_weight": class_weight, "gamma": gamma},
                        )
                    )
    elif family == "logreg":
        for C in (1.0, 0.1):
            for class_weight in _CLASS_WEIGHT_GRID:
                for penalty in ("l1", "l2"):
                    for solver in ("coordinate_descent", "lbfgs"):
                        if penalty == "l1" and solver == "lbfgs":
                            continue
                        configs.append(
                            ModelConfig(
                                "logreg",
                                {
                                    "C": C,
                                    "class_weight": class_weight,
                                    "penalty": penalty,
                                    "solver": solver,
                                },
                            )
                        )
    elif family in ("dtree", "rforest"):
        for criterion in ("gini", "entropy"):
            for max_depth in _DEPTH_GRID:
                for min_samples_leaf in _LEAF_GRID:
                    for min_samples_split in _SPLIT_GRID:
                        if min_samples_split < 2:
                            continue
                        configs.append(
                            ModelConfig(
                                family,
                                {
                                    "criterion": criterion,
                                    "max_depth": max_depth,
                                    "min_samples_leaf": min_samples_leaf,
                                    "min_samples_split": min_samples_split,
                                },
                            )
                        )
    elif family == "knn":
        for metric in ("euclidean", "manhattan"):
            for n_neighbors in (1, 2, 3):
                for weights in ("uniform", "distance"):
                    configs.append(
                        ModelConfig(
                            "knn",
                            {
                                "metric": metric,
                                "n_neighbors": n_neighbors,
                                "weights": weights,
                            },
                        )
                    )
    else:
        raise ValueError(f"unknown family {family!r}")
    return configs


@dataclass
class ConfigResult:
    config: ModelConfig
    status: str = "ok"
    error: str | None = None
    fold_metrics: dict = field(default_factory=dict)

    def mean(self, name):
        return float(np.mean(self.fold_metrics[name]))

    def std(self, name):
        return float(np.std(self.fold_metrics[name]))

    def summary(self):
        if self.status != "ok":
            return {"status": self.status, "error": self.error}
        return {
            "status": self.status,
            "metrics": {
                name: {"mean": self.mean(name), "std": self.std(name)}
                for name in METRIC_NAMES
            },
        }


@dataclass
class GridResult:
    family: str
    selection_metric: str
    results: list
    best_index: int

    @property
    def best_config(self):
        return self.results[self.best_index].config

    @property
    def best_result(self):
        return self.results[self.best_index]


def _evaluate_config(args):
    matrix, config, plan, seed, cfg_index, fold_resampler = args
    fold_metrics = {name: [] for name in METRIC_NAMES}
    try:
        for fold, (trn, val) in enumerate(plan.iter_folds()):
            train_matrix = matrix.take(trn)
            if fold_resampler is not None:
                train_matrix = fold_resampler(train_matrix, fold)
            val_matrix = matrix.take(val)
            model = train(
                config, train_matrix, seed=stable_seed(seed, f"cfg{cfg_index}-fold{fold}")
            )
            y_pred = predict(model, val_matrix)
            scores = decision_scores(model, val_matrix)
            for name, value in holdout_metrics(
                val_matrix.labels, y_pred, scores
            ).items():
                if name in fold_metrics:
                    fold_metrics[name].append(value)
        return ConfigResult(config=config, status="ok", fold_metrics=fold_metrics)
    except (ConvergenceError, TrainingError) as exc:
        return ConfigResult(config=config, status="failed", error=str(exc))


def grid_search(
    matrix,
    family,
    plan,
    selection_metric="f1",
    grids=None,
    seed=0,
    jobs=1,
    fold_resampler=None,
):
    """Evaluate a family's grid under the fold plan and pick the best config.

    fold_resampler, when given, is applied to each training fold before
    fitting (SMOTE-inside-CV placement); it must be a picklable callable
    (train_matrix, fold_index) -> FeatureMatrix.
    """
    if selection_metric not in METRIC_NAMES:
        raise ValueError(f"unknown selection metric {selection_metric!r}")
    configs = list(grids) if grids is not None else grid_expand(family)
    if not configs:
        raise GridSearchError(f"empty grid for family {family!r}")
    tasks = [
        (matrix, config, plan, seed, index, fold_resampler)
        for index, config in enumerate(configs)
    ]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_config, tasks))
    else:
        results = [_evaluate_config(task) for task in tasks]

    best_index = -1
    best_value = -np.inf
    for index, result in enumerate(results):
        if result.status != "ok":
            continue
        value = result.mean(selection_metric)
        if value > best_value:
            best_value = value
            best_index = index
    if best_index < 0:
        raise GridSearchError(
            f"all {len(results)} configuration(s) failed for family {family!r}"
        )
    return GridResult(
        family=family,
        selection_metric=selection_metric,
        results=results,
        best_index=best_index,
    )
