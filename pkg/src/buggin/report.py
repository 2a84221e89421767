"""Evaluation reports: versioned JSON, a markdown table, and raw predictions.

The markdown table mirrors the usual per-model layout with
Precision/Recall/F1/AUC-ROC columns, percentages rendered to one decimal
with banker's rounding. Every number in the table is recomputable from the
raw predictions persisted next to the report.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

REPORT_SCHEMA_VERSION = 1
VOLATILE_KEYS = ("created_at", "wall_clock_seconds")

_TABLE_COLUMNS = (("precision", "Precision"), ("recall", "Recall"), ("f1", "F1 Score"), ("auc", "AUC-ROC"))

FAMILY_TITLES = {
    "svm": "Support Vector Machine",
    "logreg": "Logistic Regression",
    "dtree": "Decision Tree",
    "knn": "KNearest Neighbor",
    "rforest": "Random Forest",
}


@dataclass
class EvalReport:
    run_config: dict
    corpus: dict
    split: dict
    embedding: dict
    families: dict
    predictions: list = field(default_factory=list)
    tool_version: str = ""
    created_at: str = ""
    wall_clock_seconds: float = 0.0
    schema_version: int = REPORT_SCHEMA_VERSION

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def format_percent(value):
    """Render a [0,1] metric as a one-decimal percentage, half-to-even."""
    quantized = (Decimal(repr(float(value))) * 100).quantize(
        Decimal("0.1"), rounding=ROUND_HALF_EVEN
    )
    return f"{quantized}%"


def report_to_json(report):
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)


def report_from_json(text):
    return EvalReport.from_dict(json.loads(text))


def canonical_json(report, exclude_volatile=True):
    """JSON form used for byte-for-byte run comparisons.

    The timestamp and wall clock are excluded from the comparison canon;
    everything else must reproduce exactly for identical run configs.
    """
    data = report.to_dict() if isinstance(report, EvalReport) else dict(report)
    if exclude_volatile:
        for key in VOLATILE_KEYS:
            data.pop(key, None)
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)


def render_markdown(report):
    """One table per embedding source with a row per model family."""
    source = report.embedding.get("source", "tfidf")
    field_name = report.run_config.get("text_field", "title")
    lines = [
        f"# Evaluation report ({source}, {field_name})",
        "",
        f"- corpus fingerprint: `{report.corpus['fingerprint']}`",
        f"- seed: {report.run_config.get('seed')}",
        f"- fit scope: {report.embedding.get('fit_scope', 'n/a')}"
        f" | smote: {report.run_config.get('smote_placement', 'once-before-cv')}",
        "",
        f"## {source}",
        "",
        "| Models | " + " | ".join(title for _, title in _TABLE_COLUMNS) + " |",
        "|" + "---|" * (len(_TABLE_COLUMNS) + 1),
    ]
    for family, payload in report.families.items():
        holdout = payload["holdout"]
        cells = [format_percent(holdout[key]) for key, _ in _TABLE_COLUMNS]
        degenerate = holdout.get("degenerate") or []
        suffix = f" (degenerate: {', '.join(degenerate)})" if degenerate else ""
        lines.append(
            "| " + FAMILY_TITLES.get(family, family) + suffix + " | " + " | ".join(cells) + " |"
        )
    lines.append("")
    return "\n".join(lines)


def _atomic_write(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_predictions_csv(report, path):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["family", "bug_id", "y_true", "y_pred", "score"])
        for row in report.predictions:
            writer.writerow(
                [row["family"], row["bug_id"], row["y_true"], row["y_pred"], repr(row["score"])]
            )
    return path


def emit_report(report, out_dir, formats=("json", "markdown")):
    """Persist the report artifacts atomically; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {}
    if "json" in formats:
        path = out_dir / "report.json"
        _atomic_write(path, report_to_json(report) + "\n")
        written["json"] = path
    if "markdown" in formats:
        path = out_dir / "report.md"
        _atomic_write(path, render_markdown(report))
        written["markdown"] = path
    written["predictions"] = write_predictions_csv(report, out_dir / "predictions.csv")
    return written
