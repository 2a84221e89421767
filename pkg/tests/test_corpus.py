import itertools

import numpy as np
import pytest

from buggin.corpus import (
    Corpus,
    Label,
    derive_label,
    load_corpus,
    save_corpus,
    stratified_holdout,
)
from buggin.exceptions import (
    DuplicateIdError,
    ParseError,
    SchemaError,
    StratificationError,
)

from conftest import make_corpus, make_report

CSV_HEADER = "bug_id,project,is_bug,has_bic,title,description\n"


def test_derive_label_table():
    assert derive_label(True, True) is Label.INTRINSIC
    assert derive_label(True, False) is Label.NON_INTRINSIC
    assert derive_label(False, True) is Label.NON_INTRINSIC
    assert derive_label(False, False) is Label.NON_INTRINSIC


def test_label_logic_exhaustive_and_encoding():
    # Exactly one of the four combinations maps to the positive class.
    outcomes = [derive_label(a, b) for a, b in itertools.product((0, 1), repeat=2)]
    assert sum(int(lab) for lab in outcomes) == 1
    assert int(Label.INTRINSIC) == 1 and int(Label.NON_INTRINSIC) == 0


def test_load_csv_round_trip(tmp_path):
    corpus = make_corpus(6, 4)
    for fmt in ("csv", "jsonl"):
        path = tmp_path / f"corpus.{fmt}"
        save_corpus(corpus, path, format=fmt)
        loaded = load_corpus(path, format=fmt)
        assert loaded.reports == corpus.reports
        assert loaded.labels == corpus.labels
        assert loaded.fingerprint == corpus.fingerprint


def test_load_infers_format(tmp_path):
    corpus = make_corpus(3, 3)
    save_corpus(corpus, tmp_path / "c.jsonl")
    assert load_corpus(tmp_path / "c.jsonl").fingerprint == corpus.fingerprint


def test_empty_file_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(CSV_HEADER)
    corpus = load_corpus(path)
    assert len(corpus) == 0
    with pytest.raises(StratificationError):
        stratified_holdout(corpus, 0.8, seed=0)


def test_missing_field_names_row_and_field(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"bug_id": "a", "project": "nova", "is_bug": 1}\n')
    with pytest.raises(SchemaError) as err:
        load_corpus(path)
    assert "row 0" in str(err.value) and "has_bic" in str(err.value)


def test_non_boolean_flag_is_parse_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(CSV_HEADER + 'x,nova,1,maybe,t,d\n')
    with pytest.raises(ParseError) as err:
        load_corpus(path)
    assert "row 0" in str(err.value) and "has_bic" in str(err.value)


def test_duplicate_bug_id_rejected(tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text(CSV_HEADER + "x,nova,1,1,t,d\nx,nova,0,0,t,d\n")
    with pytest.raises(DuplicateIdError):
        load_corpus(path)


def test_fingerprint_changes_iff_records_change():
    base = make_corpus(3, 2)
    same = Corpus.from_reports(base.reports)
    assert same.fingerprint == base.fingerprint
    tweaked_reports = list(base.reports)
    tweaked_reports[0] = make_report(0, title="different title")
    assert Corpus.from_reports(tweaked_reports).fingerprint != base.fingerprint


def test_unset_flags_rejected():
    with pytest.raises(ParseError):
        Corpus.from_reports([make_report(0, is_bug=None)])


def test_holdout_paper_counts():
    # 1880 reports (1120/760) at 0.8 must give 1504 train (896/608).
    y = np.array([1] * 1120 + [0] * 760)
    plan = stratified_holdout(y, 0.8, seed=123)
    train = np.asarray(plan.train_indices)
    test = np.asarray(plan.test_indices)
    assert train.size == 1504 and test.size == 376
    assert y[train].sum() == 896 and (y[train] == 0).sum() == 608
    assert y[test].sum() == 224 and (y[test] == 0).sum() == 152


def test_holdout_small_even_case():
    y = np.array([1] * 5 + [0] * 5)
    plan = stratified_holdout(y, 0.5, seed=9)
    train = np.asarray(plan.train_indices)
    counts = (int((y[train] == 0).sum()), int(y[train].sum()))
    assert train.size == 5
    assert counts in ((2, 3), (3, 2))


def test_holdout_deterministic():
    corpus = make_corpus(12, 8)
    a = stratified_holdout(corpus, 0.8, seed=77)
    b = stratified_holdout(corpus, 0.8, seed=77)
    assert a == b
    c = stratified_holdout(corpus, 0.8, seed=78)
    assert a != c


def test_holdout_partition_and_ratio_bounds():
    assert_bounds_over_random_corpora(n_seeds=200)


def assert_bounds_over_random_corpora(n_seeds):
    rng = np.random.default_rng(2024)
    for trial in range(n_seeds):
        n = int(rng.integers(2, 501))
        y = rng.integers(0, 2, size=n)
        if y.sum() == 0:
            y[rng.integers(0, n)] = 1
        if (y == 0).sum() == 0:
            y[rng.integers(0, n)] = 0
        ratio = float(rng.uniform(0.1, 0.9))
        plan = stratified_holdout(y, ratio, seed=int(rng.integers(0, 2**32)))
        train = np.asarray(plan.train_indices, dtype=np.int64)
        test = np.asarray(plan.test_indices, dtype=np.int64)
        union = np.concatenate([train, test])
        assert union.size == n and np.array_equal(np.sort(union), np.arange(n))
        for c in (0, 1):
            n_c = int((y == c).sum())
            got = int((y[train] == c).sum())
            assert abs(got - ratio * n_c) <= 1.0 + 1e-9


def test_holdout_rejects_single_class():
    with pytest.raises(StratificationError):
        stratified_holdout(np.ones(10, dtype=int), 0.8, seed=0)


def test_holdout_rejects_bad_ratio():
    with pytest.raises(ValueError):
        stratified_holdout(np.array([0, 1]), 1.0, seed=0)
