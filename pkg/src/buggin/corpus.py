"""Bug-report corpus: loading, validation, labeling, and the holdout split.

A corpus file carries six fields per record (``bug_id``, ``project``,
``is_bug``, ``has_bic``, ``title``, ``description``) either as CSV with that
exact header or as JSONL with the same keys. The class label is derived, not
stored: a report is Intrinsic exactly when both boolean flags are set, and
NonIntrinsic otherwise (extrinsic bugs and non-bugs are folded together).
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from .exceptions import (
    DuplicateIdError,
    ParseError,
    SchemaError,
    StratificationError,
)

FIELD_ORDER = ("bug_id", "project", "is_bug", "has_bic", "title", "description")

_TRUE = {"1", "true"}
_FALSE = {"0", "false"}


class Label(IntEnum):
    """Binary target. Intrinsic is the positive class everywhere downstream."""

    NON_INTRINSIC = 0
    INTRINSIC = 1


def derive_label(is_bug, has_bic):
    """Map the two manual flags to a label: (1,1) is Intrinsic, rest is not."""
    return Label.INTRINSIC if (bool(is_bug) and bool(has_bic)) else Label.NON_INTRINSIC


@dataclass(frozen=True)
class BugReport:
    """One issue-tracker record.

    ``is_bug``/``has_bic`` may be None on freshly scraped reports; corpus
    assembly rejects unset flags.
    """

    bug_id: str
    project: str
    title: str
    description: str
    is_bug: bool | None = None
    has_bic: bool | None = None


@dataclass(frozen=True)
class Corpus:
    reports: tuple
    labels: tuple
    fingerprint: str

    def __len__(self):
        return len(self.reports)

    def label_array(self):
        return np.array([int(lab) for lab in self.labels], dtype=np.int64)

    def class_counts(self):
        y = self.label_array()
        return int((y == 0).sum()), int((y == 1).sum())

    def bug_ids(self):
        return tuple(r.bug_id for r in self.reports)

    @classmethod
    def from_reports(cls, reports):
        reports = tuple(reports)
        seen = {}
        for row, report in enumerate(reports):
            if not report.bug_id:
                raise SchemaError(f"row {row}: empty bug_id")
            if report.bug_id in seen:
                raise DuplicateIdError(
                    f"duplicate bug_id {report.bug_id!r} at rows "
                    f"{seen[report.bug_id]} and {row}"
                )
            seen[report.bug_id] = row
            for flag in ("is_bug", "has_bic"):
                if not isinstance(getattr(report, flag), bool):
                    raise ParseError(f"row {row}: {flag} is unset or non-boolean")
        labels = tuple(derive_label(r.is_bug, r.has_bic) for r in reports)
        return cls(reports=reports, labels=labels, fingerprint=_fingerprint(reports))


def _fingerprint(reports):
    hasher = hashlib.sha256()
    for report in reports:
        record = {
            "bug_id": report.bug_id,
            "project": report.project,
            "is_bug": int(report.is_bug),
            "has_bic": int(report.has_bic),
            "title": report.title,
            "description": report.description,
        }
        hasher.update(json.dumps(record, sort_keys=True, ensure_ascii=False).encode())
        hasher.update(b"\n")
    return hasher.hexdigest()


def _parse_flag(value, row, field):
    if isinstance(value, bool):
        return value
    if isinstance(value, int) and value in (0, 1):
        return bool(value)
    if isinstance(value, str):
        lowered = value.strip().lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
    raise ParseError(f"row {row}: field {field!r} must be boolean, got {value!r}")


def _record_to_report(record, row):
    missing = [f for f in FIELD_ORDER if f not in record or record[f] is None]
    if missing:
        raise SchemaError(f"row {row}: missing field(s) {', '.join(missing)}")
    return BugReport(
        bug_id=str(record["bug_id"]),
        project=str(record["project"]),
        title=str(record["title"]),
        description=str(record["description"]),
        is_bug=_parse_flag(record["is_bug"], row, "is_bug"),
        has_bic=_parse_flag(record["has_bic"], row, "has_bic"),
    )


def infer_format(path):
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix in (".jsonl", ".ndjson"):
        return "jsonl"
    raise SchemaError(f"cannot infer corpus format from {path}; pass format=")


def load_corpus(path, format=None):
    """Load and validate a corpus file; row order is preserved.

    Raises SchemaError / ParseError / DuplicateIdError with the offending
    row number on malformed input.
    """
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"corpus file does not exist: {path}")
    format = format or infer_format(path)
    reports = []
    if format == "csv":
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise SchemaError(f"{path}: empty file, expected a CSV header")
            header_missing = [f for f in FIELD_ORDER if f not in reader.fieldnames]
            if header_missing:
                raise SchemaError(
                    f"{path}: header missing field(s) {', '.join(header_missing)}"
                )
            for row, record in enumerate(reader):
                reports.append(_record_to_report(record, row))
    elif format == "jsonl":
        with path.open(encoding="utf-8") as fh:
            for row, line in enumerate(fh):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"row {row}: invalid JSON ({exc})") from exc
                reports.append(_record_to_report(record, row))
    else:
        raise SchemaError(f"unknown corpus format {format!r}")
    return Corpus.from_reports(reports)


def save_corpus(corpus, path, format=None):
    """Write a corpus back to disk; load_corpus(save_corpus(c)) == c."""
    path = Path(path)
    format = format or infer_format(path)
    if format == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(FIELD_ORDER)
            for r in corpus.reports:
                writer.writerow(
                    [r.bug_id, r.project, int(r.is_bug), int(r.has_bic), r.title, r.description]
                )
    elif format == "jsonl":
        with path.open("w", encoding="utf-8") as fh:
            for r in corpus.reports:
                record = {
                    "bug_id": r.bug_id,
                    "project": r.project,
                    "is_bug": int(r.is_bug),
                    "has_bic": int(r.has_bic),
                    "title": r.title,
                    "description": r.description,
                }
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    else:
        raise SchemaError(f"unknown corpus format {format!r}")


@dataclass(frozen=True)
class SplitPlan:
    """Index sets of a stratified holdout split."""

    train_indices: tuple
    test_indices: tuple
    ratio: float
    seed: int


def stratified_holdout(corpus_or_labels, ratio, seed):
    """Deterministic stratified train/test split.

    Within each class the indices are shuffled with a seeded PCG64 stream;
    the train set takes ceil(ratio * n_c) from each non-largest class and the
    largest class absorbs the rounding so the total train size is
    ceil(ratio * n), clamped to leave at least one test row.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    if isinstance(corpus_or_labels, Corpus):
        y = corpus_or_labels.label_array()
    else:
        y = np.asarray(corpus_or_labels, dtype=np.int64)
    n = y.shape[0]
    class_indices = {c: np.flatnonzero(y == c) for c in (0, 1)}
    for c, idx in class_indices.items():
        if idx.size == 0:
            raise StratificationError(f"class {c} is absent; cannot stratify")

    rng = np.random.default_rng(seed)
    shuffled = {c: rng.permutation(class_indices[c]) for c in (0, 1)}

    counts = {c: class_indices[c].size for c in (0, 1)}
    largest = max((0, 1), key=lambda c: (counts[c], -c))
    target_total = min(math.ceil(ratio * n), n - 1) if n > 1 else 1
    target_total = max(target_total, 1)

    take = {}
    for c in (0, 1):
        if c != largest:
            take[c] = min(math.ceil(ratio * counts[c]), counts[c])
    take[largest] = target_total - sum(take.values())
    take[largest] = min(max(take[largest], 0), counts[largest])

    train, test = [], []
    for c in (0, 1):
        train.extend(shuffled[c][: take[c]].tolist())
        test.extend(shuffled[c][take[c] :].tolist())
    return SplitPlan(
        train_indices=tuple(sorted(train)),
        test_indices=tuple(sorted(test)),
        ratio=ratio,
        seed=seed,
    )
