import json
import math

import numpy as np
import pytest

from buggin.exceptions import (
    EmbeddingFormatError,
    EmbeddingLookupError,
    EmbeddingValidationError,
    EmptyVocabularyError,
)
from buggin.features import (
    EmbeddingTable,
    FeatureMatrix,
    TfidfVectorizer,
    assemble_matrix,
    import_dense,
    load_matrix,
    save_matrix,
)

from conftest import make_docs


def brute_force_tfidf(fit_token_lists, transform_token_lists):
    """Independent oracle: recount everything from scratch, dense."""
    vocab = []
    for toks in fit_token_lists:
        for t in toks:
            if t not in vocab:
                vocab.append(t)
    n = len(fit_token_lists)
    df = {t: sum(1 for toks in fit_token_lists if t in toks) for t in vocab}
    idf = {t: math.log((1 + n) / (1 + df[t])) + 1.0 for t in vocab}
    rows = []
    for toks in transform_token_lists:
        row = [toks.count(t) * idf[t] for t in vocab]
        norm = math.sqrt(sum(v * v for v in row))
        rows.append([v / norm for v in row] if norm > 0 else row)
    return np.array(rows)


def test_idf_formula_example():
    v = TfidfVectorizer().fit(make_docs([["a", "b"], ["a"]]))
    assert v.vocabulary_ == {"a": 0, "b": 1}
    np.testing.assert_allclose(v.idf_[0], 1.0, atol=1e-12)
    np.testing.assert_allclose(v.idf_[1], math.log(3 / 2) + 1.0, atol=1e-12)
    assert v.n_docs_fitted_ == 2


def test_idf_single_doc():
    v = TfidfVectorizer().fit(make_docs([["x"]]))
    np.testing.assert_allclose(v.idf_, [1.0])


def test_df_counts_documents_not_occurrences():
    v1 = TfidfVectorizer().fit(make_docs([["a", "a", "a"], ["b"]]))
    v2 = TfidfVectorizer().fit(make_docs([["a"], ["b"]]))
    np.testing.assert_allclose(v1.idf_, v2.idf_)


def test_transform_worked_example():
    # Frozen from the closed-form oracle: unnormalized (1.0, 2*idf_b).
    v = TfidfVectorizer().fit(make_docs([["a", "b"], ["a"]]))
    row = v.transform(make_docs([["a", "b", "b"]])).toarray()[0]
    idf_b = math.log(3 / 2) + 1.0
    expected = np.array([1.0, 2 * idf_b])
    expected /= np.linalg.norm(expected)
    np.testing.assert_allclose(row, expected, atol=1e-12)
    np.testing.assert_allclose(row, [0.3351757430256345, 0.9421556150574975], atol=1e-12)


def test_transform_oov_gives_zero_row():
    v = TfidfVectorizer().fit(make_docs([["a", "b"], ["a"]]))
    row = v.transform(make_docs([["z"]])).toarray()[0]
    np.testing.assert_array_equal(row, [0.0, 0.0])


def test_transform_single_axis():
    v = TfidfVectorizer().fit(make_docs([["a", "b"], ["a"]]))
    row = v.transform(make_docs([["a"]])).toarray()[0]
    np.testing.assert_allclose(row, [1.0, 0.0], atol=1e-12)


def test_all_empty_docs_rejected():
    with pytest.raises(EmptyVocabularyError):
        TfidfVectorizer().fit(make_docs([[], []]))


def test_tfidf_matches_brute_force_oracle(rng):
    terms = [f"t{i}" for i in range(15)]
    for _ in range(25):
        n_docs = int(rng.integers(1, 21))
        fit_lists = [
            list(rng.choice(terms, size=rng.integers(0, 12)))
            for _ in range(n_docs)
        ]
        if not any(fit_lists):
            fit_lists[0] = ["t0"]
        query_lists = [
            list(rng.choice(terms + ["oov"], size=rng.integers(0, 12)))
            for _ in range(4)
        ]
        v = TfidfVectorizer().fit(make_docs(fit_lists))
        got = v.transform(make_docs(query_lists)).toarray()
        expected = brute_force_tfidf(fit_lists, query_lists)
        # Align oracle columns (first-occurrence order matches by construction).
        np.testing.assert_allclose(got, expected, atol=1e-12)


def test_row_norms_are_zero_or_one(rng):
    terms = [f"w{i}" for i in range(10)]
    lists = [list(rng.choice(terms, size=rng.integers(0, 8))) for _ in range(30)]
    if not any(lists):
        lists[0] = ["w0"]
    v = TfidfVectorizer().fit(make_docs(lists))
    norms = np.sqrt(np.asarray(v.transform(make_docs(lists)).multiply(v.transform(make_docs(lists))).sum(axis=1))).ravel()
    for norm in norms:
        assert norm == pytest.approx(0.0, abs=1e-12) or norm == pytest.approx(1.0, abs=1e-12)


def test_fit_is_order_stable_up_to_column_permutation(rng):
    terms = [f"w{i}" for i in range(12)]
    lists = [list(rng.choice(terms, size=rng.integers(1, 8))) for _ in range(12)]
    docs = make_docs(lists)
    perm = rng.permutation(len(docs))
    v1 = TfidfVectorizer().fit(docs)
    v2 = TfidfVectorizer().fit([docs[i] for i in perm])
    m1 = v1.transform(docs).toarray()
    m2 = v2.transform(docs).toarray()
    realign = [v2.vocabulary_[t] for t in sorted(v1.vocabulary_, key=v1.vocabulary_.get)]
    np.testing.assert_allclose(m1, m2[:, realign], atol=1e-12)


def _write_manifest(tmp_path, rows, dimension=None, count=None, model="m"):
    dim = dimension if dimension is not None else (len(rows[0]["v"]) if rows else 4)
    manifest = {
        "model_name": model,
        "dimension": dim,
        "count": count if count is not None else len(rows),
    }
    (tmp_path / "manifest.json").write_text(json.dumps(manifest))
    with (tmp_path / "vectors.jsonl").open("w") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return tmp_path / "manifest.json"


def test_import_dense_happy_path(tmp_path):
    path = _write_manifest(
        tmp_path,
        [{"id": "a", "v": [1.0, 2.0, 3.0, 4.0]}, {"id": "b", "v": [0.0, 0.0, 0.0, 1.0]}],
    )
    table = import_dense(path)
    assert table.dimension == 4 and len(table) == 2
    np.testing.assert_array_equal(table.vectors["a"], [1.0, 2.0, 3.0, 4.0])


def test_import_dense_dimension_mismatch(tmp_path):
    path = _write_manifest(tmp_path, [{"id": "a", "v": [1.0, 2.0, 3.0]}], dimension=4)
    with pytest.raises(EmbeddingFormatError) as err:
        import_dense(path)
    assert "a" in str(err.value)


def test_import_dense_nan_rejected(tmp_path):
    path = _write_manifest(tmp_path, [{"id": "a", "v": [1.0, float("nan"), 0.0, 0.0]}])
    with pytest.raises(EmbeddingValidationError):
        import_dense(path)


def test_import_dense_duplicate_id_rejected(tmp_path):
    path = _write_manifest(
        tmp_path,
        [{"id": "a", "v": [1.0, 0.0, 0.0, 0.0]}, {"id": "a", "v": [0.0, 1.0, 0.0, 0.0]}],
        count=2,
    )
    with pytest.raises(EmbeddingFormatError) as err:
        import_dense(path)
    assert "duplicate" in str(err.value)


def test_import_dense_count_mismatch(tmp_path):
    path = _write_manifest(tmp_path, [{"id": "a", "v": [1.0, 0.0, 0.0, 0.0]}], count=3)
    with pytest.raises(EmbeddingFormatError):
        import_dense(path)


def test_assemble_tfidf_counts():
    docs = make_docs([["a", "b"], ["a"], ["b"]])
    v = TfidfVectorizer().fit(docs)
    matrix = assemble_matrix(v, docs, [1, 0, 1])
    assert matrix.kind == "sparse"
    assert matrix.n_rows == 3 and matrix.n_cols == 2
    assert matrix.row_ids == ("D0", "D1", "D2")
    np.testing.assert_array_equal(matrix.labels, [1, 0, 1])


def test_assemble_zero_rows_valid():
    docs = make_docs([["a"]])
    v = TfidfVectorizer().fit(docs)
    matrix = assemble_matrix(v, [], [])
    assert matrix.n_rows == 0


def test_assemble_dense_missing_id(tmp_path):
    table = EmbeddingTable(dimension=2, model_name="m", vectors={"a": np.zeros(2)})
    with pytest.raises(EmbeddingLookupError) as err:
        assemble_matrix(table, ["a", "ghost"], [1, 0])
    assert "ghost" in str(err.value)


def test_matrix_artifact_round_trip(tmp_path, rng):
    docs = make_docs([["a", "b"], ["a"], ["c"]])
    v = TfidfVectorizer().fit(docs)
    matrix = assemble_matrix(v, docs, [1, 0, 1])
    save_matrix(matrix, tmp_path / "art")
    loaded = load_matrix(tmp_path / "art")
    assert loaded.kind == "sparse"
    assert loaded.row_ids == matrix.row_ids
    np.testing.assert_array_equal(loaded.labels, matrix.labels)
    np.testing.assert_allclose(loaded.values.toarray(), matrix.values.toarray())

    dense = FeatureMatrix(("x", "y"), rng.normal(size=(2, 3)), np.array([0, 1]))
    save_matrix(dense, tmp_path / "art2")
    loaded2 = load_matrix(tmp_path / "art2")
    np.testing.assert_allclose(loaded2.values, dense.values)
