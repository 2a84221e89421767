"""Batch command line: stage-by-stage subcommands plus the end-to-end run.

Every stage can also consume the previous stage's persisted output, which
keeps long experiments debuggable: ingest -> preprocess -> embed -> train
-> evaluate, or just `buggin run` for the whole pipeline.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .corpus import load_corpus, save_corpus, stratified_holdout
from .exceptions import BugginError
from .features import TfidfVectorizer, assemble_matrix, import_dense, load_matrix, save_matrix
from .learners import ModelConfig, decision_scores, model_from_json, model_to_json, predict, train
from .metrics import holdout_metrics
from .pipeline import RunConfig, preprocess_corpus, run_experiment
from .report import render_markdown, report_from_json
from .textprep import Document

_FAMILY_CHOICES = ("svm", "lr", "dt", "rf", "knn", "all")


@click.group()
@click.version_option(version=__version__)
def main():
    """Intrinsic-bug classification toolkit."""


def _fail(exc):
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--format", "corpus_format", type=click.Choice(["csv", "jsonl"]), default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
def ingest(corpus_path, corpus_format, out_path):
    """Validate a corpus file and write the normalized JSONL twin."""
    try:
        corpus = load_corpus(corpus_path, format=corpus_format)
        save_corpus(corpus, out_path, format="jsonl")
    except BugginError as exc:
        _fail(exc)
    n0, n1 = corpus.class_counts()
    click.echo(
        f"ingested {len(corpus)} reports ({n1} intrinsic / {n0} non-intrinsic), "
        f"fingerprint {corpus.fingerprint[:12]}"
    )


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--format", "corpus_format", type=click.Choice(["csv", "jsonl"]), default=None)
@click.option("--text-field", type=click.Choice(["title", "description"]), default="title")
@click.option("--projects-file", type=click.Path(), default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
def preprocess(corpus_path, corpus_format, text_field, projects_file, out_path):
    """Clean, tokenize, and lemmatize one text field into documents JSONL."""
    try:
        corpus = load_corpus(corpus_path, format=corpus_format)
        docs = preprocess_corpus(corpus, text_field, projects_file=projects_file)
    except BugginError as exc:
        _fail(exc)
    with open(out_path, "w", encoding="utf-8") as fh:
        for doc, label in zip(docs, corpus.labels):
            fh.write(
                json.dumps(
                    {
                        "bug_id": doc.bug_id,
                        "field": doc.source_field,
                        "tokens": list(doc.tokens),
                        "label": int(label),
                    }
                )
                + "\n"
            )
    click.echo(f"wrote {len(docs)} documents to {out_path}")


def _read_documents(path):
    docs, labels = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            docs.append(
                Document(
                    bug_id=record["bug_id"],
                    source_field=record["field"],
                    tokens=tuple(record["tokens"]),
                )
            )
            labels.append(int(record["label"]))
    return docs, labels


@main.command()
@click.option("--docs", "docs_path", type=click.Path(), default=None,
              help="Documents JSONL from the preprocess stage (tfidf source).")
@click.option("--embedding", type=click.Choice(["tfidf", "dense"]), default="tfidf")
@click.option("--manifest", "manifest_path", type=click.Path(), default=None)
@click.option("--corpus", "corpus_path", type=click.Path(), default=None,
              help="Corpus file providing ids/labels for the dense source.")
@click.option("--format", "corpus_format", type=click.Choice(["csv", "jsonl"]), default=None)
@click.option("--out", "out_dir", required=True, type=click.Path())
def embed(docs_path, embedding, manifest_path, corpus_path, corpus_format, out_dir):
    """Build a feature matrix artifact from documents or imported vectors."""
    try:
        if embedding == "tfidf":
            if not docs_path:
                _fail("embedding=tfidf requires --docs")
            docs, labels = _read_documents(docs_path)
            vectorizer = TfidfVectorizer().fit(docs)
            matrix = assemble_matrix(vectorizer, docs, labels)
        else:
            if not manifest_path or not corpus_path:
                _fail("embedding=dense requires --manifest and --corpus")
            corpus = load_corpus(corpus_path, format=corpus_format)
            table = import_dense(manifest_path)
            matrix = assemble_matrix(table, corpus.bug_ids(), corpus.label_array())
        save_matrix(matrix, out_dir)
    except BugginError as exc:
        _fail(exc)
    click.echo(f"wrote {matrix.n_rows}x{matrix.n_cols} {matrix.kind} matrix to {out_dir}")


@main.command(name="train")
@click.option("--matrix", "matrix_dir", required=True, type=click.Path())
@click.option("--family", required=True, type=click.Choice(_FAMILY_CHOICES[:-1]))
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON file with the hyperparameters; defaults apply otherwise.")
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", required=True, type=click.Path())
def train_cmd(matrix_dir, family, config_path, seed, out_path):
    """Fit one configuration on a matrix artifact and save the model JSON."""
    from .pipeline import FAMILY_ALIASES

    try:
        matrix = load_matrix(matrix_dir)
        params = {}
        if config_path:
            params = json.loads(Path(config_path).read_text(encoding="utf-8"))
        config = ModelConfig(FAMILY_ALIASES[family], params)
        model = train(config, matrix, seed=seed)
        Path(out_path).write_text(model_to_json(model), encoding="utf-8")
    except BugginError as exc:
        _fail(exc)
    click.echo(f"trained {config.label()} -> {out_path}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--matrix", "matrix_dir", required=True, type=click.Path())
@click.option("--out", "out_path", type=click.Path(), default=None)
def evaluate(model_path, matrix_dir, out_path):
    """Score a saved model against a matrix artifact."""
    try:
        model = model_from_json(Path(model_path).read_text(encoding="utf-8"))
        matrix = load_matrix(matrix_dir)
        y_pred = predict(model, matrix)
        scores = decision_scores(model, matrix)
        result = holdout_metrics(matrix.labels, y_pred, scores)
    except BugginError as exc:
        _fail(exc)
    text = json.dumps(result, indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
    click.echo(text)


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--format", "corpus_format", type=click.Choice(["csv", "jsonl"]), default=None)
@click.option("--text-field", type=click.Choice(["title", "description"]), default="title")
@click.option("--embedding", type=click.Choice(["tfidf", "dense"]), default="tfidf")
@click.option("--manifest", "manifest_path", type=click.Path(), default=None)
@click.option("--family", "families", multiple=True, default=("all",),
              type=click.Choice(_FAMILY_CHOICES))
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--holdout-ratio", type=float, default=0.8, show_default=True)
@click.option("--smote-k", type=int, default=5, show_default=True)
@click.option("--smote-per-fold", is_flag=True, default=False,
              help="Apply SMOTE inside each CV training fold instead of once up front.")
@click.option("--fit-scope", type=click.Choice(["full", "train"]), default="full",
              show_default=True,
              help="full fits TF-IDF before the split (reference procedure); train is leakage-free.")
@click.option("--select-metric", type=click.Choice(["f1", "auc"]), default="f1", show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--projects-file", type=click.Path(), default=None)
@click.option("--grid-override", type=click.Path(), default=None)
@click.option("--out", "out_dir", required=True, type=click.Path())
def run(**kwargs):
    """Run the full train/tune/evaluate pipeline and write the report."""
    out_dir = kwargs.pop("out_dir")
    families = kwargs.pop("families")
    config = RunConfig(
        corpus_path=kwargs.pop("corpus_path"),
        out_dir=out_dir,
        families=tuple(families),
        **kwargs,
    )
    try:
        report = run_experiment(config)
    except BugginError as exc:
        _fail(exc)
    for family, payload in report.families.items():
        holdout = payload["holdout"]
        click.echo(
            f"{family}: F1 {holdout['f1']:.3f} AUC {holdout['auc']:.3f} "
            f"(best: {payload['best_config']['params']})"
        )
    click.echo(f"report written to {out_dir}")


@main.command(name="report")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["json", "markdown"]), default="markdown")
@click.option("--out", "out_path", type=click.Path(), default=None)
def report_cmd(in_path, fmt, out_path):
    """Re-render a persisted report.json."""
    try:
        report = report_from_json(Path(in_path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        _fail(exc)
    if fmt == "markdown":
        text = render_markdown(report)
    else:
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text)


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--format", "corpus_format", type=click.Choice(["csv", "jsonl"]), default=None)
@click.option("--holdout-ratio", type=float, default=0.8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def split(corpus_path, corpus_format, holdout_ratio, seed):
    """Print the stratified holdout split for a corpus (sanity tool)."""
    try:
        corpus = load_corpus(corpus_path, format=corpus_format)
        plan = stratified_holdout(corpus, holdout_ratio, seed)
    except BugginError as exc:
        _fail(exc)
    y = corpus.label_array()
    train_y = y[list(plan.train_indices)]
    click.echo(
        json.dumps(
            {
                "train": len(plan.train_indices),
                "test": len(plan.test_indices),
                "train_intrinsic": int(train_y.sum()),
                "train_non_intrinsic": int((train_y == 0).sum()),
            }
        )
    )


if __name__ == "__main__":
    main()
