"""Row-aligned feature matrices: native TF-IDF and imported dense vectors.

TF-IDF uses the smoothed convention idf = ln((1+N)/(1+df)) + 1 with L2 row
normalization. The convention is centralized here on purpose: swapping in an
alternative is a one-line change.

Dense embeddings are consumed, never computed, through a manifest + JSONL
contract: ``manifest.json`` declares ``model_name``, ``dimension`` and
``count``; a sibling ``vectors.jsonl`` holds one ``{"id": ..., "v": [...]}``
object per row.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .base import BaseEstimator, check_is_fitted
from .exceptions import (
    EmbeddingFormatError,
    EmbeddingLookupError,
    EmbeddingValidationError,
    EmptyVocabularyError,
)

VECTORS_FILENAME = "vectors.jsonl"


@dataclass
class FeatureMatrix:
    """Features plus aligned labels and row ids.

    ``values`` is a CSR matrix for TF-IDF features and a dense ndarray for
    imported embeddings; code downstream dispatches on ``kind``.
    """

    row_ids: tuple
    values: object
    labels: np.ndarray

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.row_ids) != self.values.shape[0] or len(self.row_ids) != len(
            self.labels
        ):
            raise ValueError("row_ids, values, and labels must be index-aligned")
        self.row_ids = tuple(self.row_ids)

    @property
    def kind(self):
        return "sparse" if sp.issparse(self.values) else "dense"

    @property
    def n_rows(self):
        return self.values.shape[0]

    @property
    def n_cols(self):
        return self.values.shape[1]

    def take(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return FeatureMatrix(
            row_ids=tuple(self.row_ids[i] for i in indices),
            values=self.values[indices],
            labels=self.labels[indices],
        )


class TfidfVectorizer(BaseEstimator):
    """TF-IDF vectorizer over token documents.

    Vocabulary columns are assigned in first-occurrence order across the
    fitted documents; every term is kept (min document frequency 1).

    Attributes
    ----------
    vocabulary_ : dict mapping term -> column index
    idf_ : ndarray of shape (n_terms,)
    n_docs_fitted_ : int
    fitted_ids_ : tuple of the bug_ids the model was fitted on
    """

    def fit(self, docs):
        docs = list(docs)
        if not docs:
            raise EmptyVocabularyError("cannot fit on an empty document list")
        vocabulary = {}
        df = Counter()
        for doc in docs:
            for term in doc.tokens:
                if term not in vocabulary:
                    vocabulary[term] = len(vocabulary)
            df.update(set(doc.tokens))
        if not vocabulary:
            raise EmptyVocabularyError(
                "all documents are empty; vocabulary would be empty"
            )
        n_docs = len(docs)
        idf = np.empty(len(vocabulary), dtype=np.float64)
        for term, col in vocabulary.items():
            idf[col] = np.log((1.0 + n_docs) / (1.0 + df[term])) + 1.0
        self.vocabulary_ = vocabulary
        self.idf_ = idf
        self.n_docs_fitted_ = n_docs
        self.fitted_ids_ = tuple(doc.bug_id for doc in docs)
        return self

    def transform(self, docs):
        """Raw term count x idf per in-vocabulary token, then L2 per row.

        Out-of-vocabulary tokens are ignored; an empty or no-overlap
        document maps to the zero row.
        """
        check_is_fitted(self, "vocabulary_")
        docs = list(docs)
        data, indices, indptr = [], [], [0]
        for doc in docs:
            counts = Counter(doc.tokens)
            col_value = {
                self.vocabulary_[t]: counts[t] * self.idf_[self.vocabulary_[t]]
                for t in counts
                if t in self.vocabulary_
            }
            cols = sorted(col_value)
            values = np.array([col_value[c] for c in cols], dtype=np.float64)
            norm = np.sqrt((values**2).sum())
            if norm > 0:
                values = values / norm
            data.extend(values.tolist())
            indices.extend(cols)
            indptr.append(len(indices))
        matrix = sp.csr_matrix(
            (np.array(data, dtype=np.float64), np.array(indices, dtype=np.int32), np.array(indptr, dtype=np.int32)),
            shape=(len(docs), len(self.vocabulary_)),
        )
        return matrix

    def fit_transform(self, docs):
        return self.fit(docs).transform(docs)


@dataclass(frozen=True)
class EmbeddingTable:
    """Imported dense vectors keyed by bug_id."""

    dimension: int
    model_name: str
    vectors: dict

    def __len__(self):
        return len(self.vectors)


def import_dense(manifest_path):
    """Load and validate a manifest + vectors.jsonl embedding export."""
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise EmbeddingFormatError(f"manifest does not exist: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise EmbeddingFormatError(f"manifest is not valid JSON: {exc}") from exc
    for key in ("model_name", "dimension", "count"):
        if key not in manifest:
            raise EmbeddingFormatError(f"manifest missing key {key!r}")
    dimension = manifest["dimension"]
    if not isinstance(dimension, int) or dimension < 1:
        raise EmbeddingFormatError(f"dimension must be a positive int, got {dimension!r}")

    vectors_path = manifest_path.parent / VECTORS_FILENAME
    if not vectors_path.exists():
        raise EmbeddingFormatError(f"vector file does not exist: {vectors_path}")
    vectors = {}
    with vectors_path.open(encoding="utf-8") as fh:
        for row, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise EmbeddingFormatError(f"vector row {row}: invalid JSON") from exc
            if "id" not in record or "v" not in record:
                raise EmbeddingFormatError(f"vector row {row}: needs 'id' and 'v'")
            bug_id = str(record["id"])
            vector = np.asarray(record["v"], dtype=np.float64)
            if vector.ndim != 1 or vector.shape[0] != dimension:
                raise EmbeddingFormatError(
                    f"bug_id {bug_id!r}: expected {dimension} components, "
                    f"got {vector.shape}"
                )
            if not np.isfinite(vector).all():
                raise EmbeddingValidationError(
                    f"bug_id {bug_id!r}: vector has non-finite components"
                )
            if bug_id in vectors:
                raise EmbeddingFormatError(f"duplicate vector rows for bug_id {bug_id!r}")
            vectors[bug_id] = vector
    if len(vectors) != manifest["count"]:
        raise EmbeddingFormatError(
            f"manifest declares count={manifest['count']} but vector file has "
            f"{len(vectors)} rows"
        )
    return EmbeddingTable(
        dimension=dimension, model_name=str(manifest["model_name"]), vectors=vectors
    )


def assemble_matrix(source, docs_or_ids, labels):
    """Build a FeatureMatrix from a fitted vectorizer or an embedding table.

    Rows come out in the given order, labels aligned; the storage kind
    follows the source (sparse for TF-IDF, dense for embeddings).
    """
    labels = np.asarray(labels, dtype=np.int64)
    if isinstance(source, TfidfVectorizer):
        docs = list(docs_or_ids)
        values = source.transform(docs)
        row_ids = tuple(doc.bug_id for doc in docs)
    elif isinstance(source, EmbeddingTable):
        ids = [str(i) for i in docs_or_ids]
        missing = [i for i in ids if i not in source.vectors]
        if missing:
            raise EmbeddingLookupError(
                f"{len(missing)} bug_id(s) missing from embedding table: "
                + ", ".join(missing[:10])
            )
        if ids:
            values = np.stack([source.vectors[i] for i in ids])
        else:
            values = np.empty((0, source.dimension), dtype=np.float64)
        row_ids = tuple(ids)
    else:
        raise TypeError(f"unsupported feature source: {type(source).__name__}")
    return FeatureMatrix(row_ids=row_ids, values=values, labels=labels)


def save_matrix(matrix, out_dir):
    """Persist a FeatureMatrix as meta.json plus an npz/npy values file."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = {
        "kind": matrix.kind,
        "row_ids": list(matrix.row_ids),
        "labels": matrix.labels.tolist(),
        "shape": [int(matrix.n_rows), int(matrix.n_cols)],
    }
    (out_dir / "meta.json").write_text(json.dumps(meta, indent=2), encoding="utf-8")
    if matrix.kind == "sparse":
        sp.save_npz(out_dir / "values.npz", matrix.values)
    else:
        np.save(out_dir / "values.npy", matrix.values)
    return out_dir


def load_matrix(in_dir):
    in_dir = Path(in_dir)
    meta = json.loads((in_dir / "meta.json").read_text(encoding="utf-8"))
    if meta["kind"] == "sparse":
        values = sp.load_npz(in_dir / "values.npz")
    else:
        values = np.load(in_dir / "values.npy")
    return FeatureMatrix(
        row_ids=tuple(meta["row_ids"]),
        values=values,
        labels=np.asarray(meta["labels"], dtype=np.int64),
    )
