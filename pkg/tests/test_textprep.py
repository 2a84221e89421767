import re

import numpy as np
import pytest

from buggin.corpus import BugReport
from buggin.textprep import (
    SENTINELS,
    Document,
    Lemmatizer,
    ProjectContext,
    clean_text,
    load_projects,
    load_stopwords,
    preprocess,
    remove_stopwords,
    tokenize,
)

CTX = ProjectContext("nova", frozenset({"nova", "keystone"}))
URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
HEX_RE = re.compile(r"\b(?=[0-9a-fA-F]*\d)[0-9a-fA-F]{7,40}\b")
NUM_RE = re.compile(r"\d")


def test_url_consumes_project_name_first():
    out = clean_text("Fix https://bugs.launchpad.net/nova/+bug/1 now", CTX)
    assert out == "fix <url> now"
    assert "<internal project>" not in out


def test_hex_ids_deleted():
    assert clean_text("commit a1b2c3d4e5f broke the gate", CTX) == "commit broke the gate"


def test_word_without_digit_survives_hex_rule():
    assert "decade" in clean_text("a decade of defaced caches", CTX)


def test_project_sentinels():
    out = clean_text("nova fails after keystone upgrade", CTX)
    assert out == "<internal project> fails after <external project> upgrade"


def test_traceback_block_removed():
    raw = (
        "boot broken\n"
        "Traceback (most recent call last):\n"
        "  File nova/compute.py, line 3, in boot\n"
        "  raise ValueError\n"
        "still broken afterwards"
    )
    out = clean_text(raw, CTX)
    assert "traceback" not in out
    assert "file" not in out
    assert out.startswith("boot broken") and out.endswith("still broken afterwards")


def test_numerals_and_specials_removed():
    out = clean_text("error 500 in v2.0 rpc-api (50% of calls)!", CTX)
    assert not NUM_RE.search(out)
    assert out == "error in v rpc-api of calls"


def test_tokenize_cases():
    assert tokenize("fix <url> now") == ["fix", "<url>", "now"]
    assert tokenize("") == []
    assert tokenize("<internal project> down") == ["<internal_project>", "down"]
    assert tokenize("<external project> flaky") == ["<external_project>", "flaky"]


def test_remove_stopwords():
    stop = frozenset({"the", "is"})
    assert remove_stopwords(["the", "gate", "is", "down"], stop) == ["gate", "down"]
    assert remove_stopwords([], stop) == []
    assert remove_stopwords(["<url>"], frozenset({"<url>"})) == ["<url>"]


@pytest.fixture(scope="module")
def lemmatizer():
    return Lemmatizer.from_files()


@pytest.mark.parametrize(
    "word,expected",
    [
        ("failures", "failure"),
        ("failing", "fail"),
        ("gas", "gas"),
        ("ran", "run"),
        ("classes", "class"),
        ("crashes", "crash"),
        ("fixes", "fix"),
        ("goes", "go"),
        ("stories", "story"),
        ("dependencies", "dependency"),
        ("running", "run"),
        ("stopped", "stop"),
        ("falling", "fall"),
        ("passed", "pass"),
        ("caused", "cause"),
        ("status", "status"),
        ("analysis", "analysis"),
        ("updated", "update"),
        ("executed", "execute"),
        ("<url>", "<url>"),
        ("<internal_project>", "<internal_project>"),
    ],
)
def test_lemma_cases(lemmatizer, word, expected):
    assert lemmatizer.lemma(word) == expected


def test_lemma_unknown_passthrough(lemmatizer):
    assert lemmatizer.lemma("qzxv") == "qzxv"


def test_preprocess_composition_and_determinism():
    report = BugReport(
        bug_id="b1",
        project="nova",
        title="nova instances failing after keystone 2.0 upgrade https://x.io/y",
        description="",
        is_bug=True,
        has_bic=True,
    )
    stop = load_stopwords()
    doc1 = preprocess(report, "title", CTX, stop)
    doc2 = preprocess(report, "title", CTX, stop)
    assert doc1 == doc2
    assert doc1.tokens == (
        "<internal_project>",
        "instance",
        "fail",
        "<external_project>",
        "upgrade",
        "<url>",
    )


def test_preprocess_empty_field_gives_empty_document():
    report = BugReport("b2", "nova", "t", "", is_bug=True, has_bic=True)
    doc = preprocess(report, "description", CTX, load_stopwords())
    assert doc.tokens == ()
    assert doc.source_field == "description"


def _random_noisy_string(rng):
    pieces = []
    for _ in range(int(rng.integers(3, 12))):
        kind = rng.integers(0, 6)
        if kind == 0:
            pieces.append("https://example.com/" + "".join(rng.choice(list("abc123/"), 8)))
        elif kind == 1:
            pieces.append("".join(rng.choice(list("0123456789abcdef"), int(rng.integers(7, 41)))))
        elif kind == 2:
            pieces.append(str(rng.integers(0, 10**9)))
        elif kind == 3:
            pieces.append("".join(rng.choice(list("abcdefghijklmnopqrstuvwxyz"), int(rng.integers(1, 10)))))
        elif kind == 4:
            pieces.append("".join(rng.choice(list("!@#$%^&*()[]{};:'\",.?/\\|`~+="), int(rng.integers(1, 6)))))
        else:
            pieces.append("nova" if rng.random() < 0.5 else "keystone")
    return " ".join(pieces)


def test_no_output_token_matches_noise_patterns():
    rng = np.random.default_rng(99)
    stop = load_stopwords()
    for _ in range(1000):
        raw = _random_noisy_string(rng)
        report = BugReport("x", "nova", raw, "", is_bug=True, has_bic=True)
        doc = preprocess(report, "title", CTX, stop)
        for token in doc.tokens:
            assert not URL_RE.search(token), (raw, token)
            assert not HEX_RE.search(token), (raw, token)
            assert not NUM_RE.search(token), (raw, token)
            assert token in SENTINELS or not any(c.isupper() for c in token)


def test_pipeline_idempotence_on_noisy_strings():
    rng = np.random.default_rng(7)
    stop = load_stopwords()
    known = frozenset(load_projects())
    ctx = ProjectContext("nova", known)
    for _ in range(300):
        raw = _random_noisy_string(rng)
        report = BugReport("x", "nova", raw, "", is_bug=True, has_bic=True)
        first = preprocess(report, "title", ctx, stop)
        report2 = BugReport(
            "x", "nova", " ".join(first.tokens), "", is_bug=True, has_bic=True
        )
        second = preprocess(report2, "title", ctx, stop)
        assert second.tokens == first.tokens, raw


def test_document_charset_invariant():
    stop = load_stopwords()
    report = BugReport(
        "x", "nova", "WARNING: [BUG] #501 Quota_exceeded on re-try!!", "",
        is_bug=True, has_bic=True,
    )
    doc = preprocess(report, "title", CTX, stop)
    allowed = set("abcdefghijklmnopqrstuvwxyz<>_-")
    for token in doc.tokens:
        assert set(token) <= allowed
