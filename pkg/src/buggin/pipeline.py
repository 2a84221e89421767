"""End-to-end experiment pipeline.

Stage order follows the study procedure: load -> label -> preprocess ->
embed -> stratified 80/20 split -> SMOTE on the training side -> grid
search under stratified k-fold -> refit the best config -> holdout
evaluation. All randomness flows from the single run seed; each stage
derives its own stream by stable hashing of (seed, stage name).

Stage failures are wrapped in StageError with the stage name, and whatever
artifacts exist by then are dumped into a quarantine subdirectory of the
output directory for post-mortems.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import os
import time
import traceback
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .balance import SmoteOversampler
from .base import stable_seed
from .corpus import load_corpus, stratified_holdout
from .exceptions import BugginError, ConfigError, StageError
from .features import TfidfVectorizer, assemble_matrix, import_dense
from .learners import FAMILIES, ModelConfig, decision_scores, predict, train
from .metrics import holdout_metrics
from .report import EvalReport, emit_report
from .textprep import (
    ProjectContext,
    Document,
    get_default_lemmatizer,
    load_projects,
    load_stopwords,
    preprocess,
)
from .tuning import grid_search, stratified_kfold

CACHE_ENV_VAR = "BUGGIN_CACHE"

FAMILY_ALIASES = {
    "svm": "svm",
    "lr": "logreg",
    "logreg": "logreg",
    "dt": "dtree",
    "dtree": "dtree",
    "rf": "rforest",
    "rforest": "rforest",
    "knn": "knn",
}


@dataclass
class RunConfig:
    corpus_path: str
    out_dir: str
    corpus_format: str | None = None
    text_field: str = "title"
    embedding: str = "tfidf"
    manifest_path: str | None = None
    families: tuple = ("all",)
    folds: int = 5
    seed: int = 0
    holdout_ratio: float = 0.8
    smote_k: int = 5
    smote_per_fold: bool = False
    fit_scope: str = "full"
    select_metric: str = "f1"
    jobs: int = 1
    projects_file: str | None = None
    grid_override: str | None = None
    cache_dir: str | None = None

    def resolved_families(self):
        requested = []
        for name in self.families:
            if name == "all":
                return list(FAMILIES)
            if name not in FAMILY_ALIASES:
                raise ConfigError(f"unknown family {name!r}")
            requested.append(FAMILY_ALIASES[name])
        return requested

    def validate(self):
        """Check everything that can fail before any compute starts."""
        if not Path(self.corpus_path).exists():
            raise ConfigError(f"corpus file does not exist: {self.corpus_path}")
        if self.text_field not in ("title", "description"):
            raise ConfigError(f"text_field must be title|description, got {self.text_field!r}")
        if self.embedding not in ("tfidf", "dense"):
            raise ConfigError(f"embedding must be tfidf|dense, got {self.embedding!r}")
        if self.embedding == "dense":
            if not self.manifest_path:
                raise ConfigError("embedding='dense' requires --manifest")
            if not Path(self.manifest_path).exists():
                raise ConfigError(f"manifest does not exist: {self.manifest_path}")
        if self.fit_scope not in ("full", "train"):
            raise ConfigError(f"fit_scope must be full|train, got {self.fit_scope!r}")
        if self.select_metric not in ("f1", "auc"):
            raise ConfigError(f"select_metric must be f1|auc, got {self.select_metric!r}")
        if not 0.0 < self.holdout_ratio < 1.0:
            raise ConfigError("holdout_ratio must be in (0, 1)")
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if self.projects_file and not Path(self.projects_file).exists():
            raise ConfigError(f"projects file does not exist: {self.projects_file}")
        if self.grid_override and not Path(self.grid_override).exists():
            raise ConfigError(f"grid override file does not exist: {self.grid_override}")
        self.resolved_families()

    def echo(self):
        return {
            "corpus_path": str(self.corpus_path),
            "corpus_format": self.corpus_format,
            "text_field": self.text_field,
            "embedding": self.embedding,
            "manifest_path": str(self.manifest_path) if self.manifest_path else None,
            "families": list(self.resolved_families()),
            "folds": self.folds,
            "seed": self.seed,
            "holdout_ratio": self.holdout_ratio,
            "smote_k": self.smote_k,
            "smote_placement": "per-fold" if self.smote_per_fold else "once-before-cv",
            "fit_scope": self.fit_scope,
            "select_metric": self.select_metric,
            "split_strategy": "stratified+seeded",
        }


def _fixture_digest():
    from .textprep import default_fixture

    hasher = hashlib.sha256()
    for name in ("stopwords.txt", "lemma_exceptions.tsv", "lemma_rules.tsv"):
        hasher.update(Path(default_fixture(name)).read_bytes())
    return hasher.hexdigest()[:16]


def preprocess_corpus(corpus, text_field, projects_file=None, cache_dir=None):
    """Preprocess every report; results are cached under BUGGIN_CACHE."""
    known = set(load_projects(projects_file)) if projects_file else set(load_projects())
    known |= {r.project for r in corpus.reports}
    stoplist = load_stopwords()
    lemmatizer = get_default_lemmatizer()

    cache_dir = cache_dir if cache_dir is not None else os.environ.get(CACHE_ENV_VAR)
    cache_path = None
    if cache_dir:
        key = f"{corpus.fingerprint}-{text_field}-{_fixture_digest()}"
        cache_path = Path(cache_dir) / f"docs-{key}.json"
        if cache_path.exists():
            cached = json.loads(cache_path.read_text(encoding="utf-8"))
            return [
                Document(bug_id=d["bug_id"], source_field=text_field, tokens=tuple(d["tokens"]))
                for d in cached
            ]

    docs = []
    for report in corpus.reports:
        ctx = ProjectContext(own_project=report.project, known_projects=frozenset(known))
        docs.append(preprocess(report, text_field, ctx, stoplist, lemmatizer))

    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        cache_path.write_text(
            json.dumps(
                [{"bug_id": d.bug_id, "tokens": list(d.tokens)} for d in docs]
            ),
            encoding="utf-8",
        )
    return docs


def load_grid_override(path):
    """Read a JSON grid replacement: {family: [{param: value, ...}, ...]}."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    grids = {}
    for family, entries in data.items():
        if family not in FAMILIES:
            raise ConfigError(f"grid override names unknown family {family!r}")
        grids[family] = [ModelConfig(family, dict(entry)) for entry in entries]
    return grids


@dataclass
class _Artifacts:
    """What each stage has produced so far, for quarantine dumps."""

    items: dict = field(default_factory=dict)

    def put(self, name, value):
        self.items[name] = value


def _quarantine(out_dir, stage, exc, artifacts):
    qdir = Path(out_dir) / "quarantine"
    qdir.mkdir(parents=True, exist_ok=True)
    (qdir / "error.json").write_text(
        json.dumps(
            {
                "stage": stage,
                "error": str(exc),
                "traceback": traceback.format_exc(),
            },
            indent=2,
        ),
        encoding="utf-8",
    )
    for name, value in artifacts.items.items():
        try:
            (qdir / f"{name}.json").write_text(
                json.dumps(value, indent=2, default=str), encoding="utf-8"
            )
        except TypeError:
            continue
    return qdir


def run_experiment(config):
    """Execute the full pipeline and persist the report. Returns EvalReport."""
    config.validate()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = _Artifacts()
    started = time.perf_counter()
    stage = "load"
    try:
        corpus = load_corpus(config.corpus_path, format=config.corpus_format)
        n0, n1 = corpus.class_counts()
        artifacts.put("corpus", {"fingerprint": corpus.fingerprint, "n": len(corpus)})

        stage = "split"
        split_seed = stable_seed(config.seed, "split")
        plan = stratified_holdout(corpus, config.holdout_ratio, seed=split_seed)
        artifacts.put(
            "split",
            {"train": len(plan.train_indices), "test": len(plan.test_indices)},
        )

        stage = "embed"
        labels = corpus.label_array()
        if config.embedding == "tfidf":
            stage = "preprocess"
            docs = preprocess_corpus(
                corpus,
                config.text_field,
                projects_file=config.projects_file,
                cache_dir=config.cache_dir,
            )
            stage = "embed"
            vectorizer = TfidfVectorizer()
            if config.fit_scope == "train":
                vectorizer.fit([docs[i] for i in plan.train_indices])
            else:
                vectorizer.fit(docs)
            full = assemble_matrix(vectorizer, docs, labels)
            embedding_info = {
                "source": "tfidf",
                "fit_scope": config.fit_scope,
                "vocabulary_size": len(vectorizer.vocabulary_),
            }
        else:
            table = import_dense(config.manifest_path)
            full = assemble_matrix(table, corpus.bug_ids(), labels)
            embedding_info = {
                "source": f"dense:{table.model_name}",
                "fit_scope": "imported",
                "dimension": table.dimension,
            }

        train_matrix = full.take(list(plan.train_indices))
        test_matrix = full.take(list(plan.test_indices))

        stage = "balance"
        smote_seed = stable_seed(config.seed, "smote")
        fold_resampler = None
        if config.smote_per_fold:
            smote_k = config.smote_k
            fold_resampler = _FoldResampler(smote_k, smote_seed)
            cv_matrix = train_matrix
        else:
            cv_matrix = SmoteOversampler(
                k_neighbors=config.smote_k, seed=smote_seed
            ).fit_resample(train_matrix)

        stage = "tune"
        cv_seed = stable_seed(config.seed, "cv")
        fold_plan = stratified_kfold(cv_matrix.labels, config.folds, seed=cv_seed)
        grids = load_grid_override(config.grid_override) if config.grid_override else {}
        families_payload = {}
        predictions = []
        refit_matrix = (
            SmoteOversampler(k_neighbors=config.smote_k, seed=smote_seed).fit_resample(
                train_matrix
            )
            if config.smote_per_fold
            else cv_matrix
        )
        for family in config.resolved_families():
            result = grid_search(
                cv_matrix,
                family,
                fold_plan,
                selection_metric=config.select_metric,
                grids=grids.get(family),
                seed=stable_seed(config.seed, f"grid-{family}"),
                jobs=config.jobs,
                fold_resampler=fold_resampler,
            )
            stage = "refit"
            model = train(
                result.best_config,
                refit_matrix,
                seed=stable_seed(config.seed, f"refit-{family}"),
            )
            stage = "evaluate"
            y_pred = predict(model, test_matrix)
            scores = decision_scores(model, test_matrix)
            holdout = holdout_metrics(test_matrix.labels, y_pred, scores)
            families_payload[family] = {
                "grid": [
                    dict(config=r.config.to_dict(), **r.summary())
                    for r in result.results
                ],
                "best_config": result.best_config.to_dict(),
                "cv_best": result.best_result.summary(),
                "holdout": holdout,
            }
            for bug_id, yt, yp, score in zip(
                test_matrix.row_ids, test_matrix.labels, y_pred, scores
            ):
                predictions.append(
                    {
                        "family": family,
                        "bug_id": bug_id,
                        "y_true": int(yt),
                        "y_pred": int(yp),
                        "score": float(score),
                    }
                )
            stage = "tune"

        stage = "report"
        train_labels = train_matrix.labels
        report = EvalReport(
            run_config=config.echo(),
            corpus={
                "fingerprint": corpus.fingerprint,
                "n_reports": len(corpus),
                "class_counts": {"non_intrinsic": n0, "intrinsic": n1},
            },
            split={
                "train": len(plan.train_indices),
                "test": len(plan.test_indices),
                "train_class_counts": {
                    "non_intrinsic": int((train_labels == 0).sum()),
                    "intrinsic": int((train_labels == 1).sum()),
                },
                "cv_rows_after_balance": int(cv_matrix.n_rows)
                if not config.smote_per_fold
                else int(train_matrix.n_rows),
                "derived_seed": split_seed,
            },
            embedding=embedding_info,
            families=families_payload,
            predictions=predictions,
            tool_version=__version__,
            created_at=_dt.datetime.now(_dt.timezone.utc).isoformat(),
            wall_clock_seconds=time.perf_counter() - started,
        )
        emit_report(report, out_dir)
        return report
    except BugginError as exc:
        qdir = _quarantine(out_dir, stage, exc, artifacts)
        if isinstance(exc, StageError):
            raise
        raise StageError(stage, f"{exc} (partial outputs in {qdir})") from exc


class _FoldResampler:
    """Picklable SMOTE-per-fold callback with per-fold derived seeds."""

    def __init__(self, k_neighbors, seed):
        self.k_neighbors = k_neighbors
        self.seed = seed

    def __call__(self, train_matrix, fold):
        return SmoteOversampler(
            k_neighbors=self.k_neighbors, seed=stable_seed(self.seed, f"fold{fold}")
        ).fit_resample(train_matrix)
