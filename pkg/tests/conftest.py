import numpy as np
import pytest

from buggin.corpus import BugReport, Corpus
from buggin.features import FeatureMatrix
from buggin.textprep import Document


def make_report(i, is_bug=True, has_bic=True, project="nova", title=None, description=""):
    return BugReport(
        bug_id=f"BUG-{i:04d}",
        project=project,
        title=title if title is not None else f"instance {i} fails to boot",
        description=description,
        is_bug=is_bug,
        has_bic=has_bic,
    )


def make_corpus(n_intrinsic, n_non):
    reports = [make_report(i) for i in range(n_intrinsic)]
    reports += [
        make_report(n_intrinsic + i, is_bug=bool(i % 2), has_bic=False)
        for i in range(n_non)
    ]
    return Corpus.from_reports(reports)


def make_docs(token_lists, prefix="D"):
    return [
        Document(bug_id=f"{prefix}{i}", source_field="title", tokens=tuple(toks))
        for i, toks in enumerate(token_lists)
    ]


def dense_matrix(X, y, prefix="R"):
    X = np.asarray(X, dtype=np.float64)
    return FeatureMatrix(
        row_ids=tuple(f"{prefix}{i}" for i in range(X.shape[0])),
        values=X,
        labels=np.asarray(y, dtype=np.int64),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
