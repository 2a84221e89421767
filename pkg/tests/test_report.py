import json
from decimal import ROUND_HALF_EVEN, Decimal

import pytest

from buggin.report import (
    EvalReport,
    canonical_json,
    emit_report,
    format_percent,
    render_markdown,
    report_from_json,
    report_to_json,
)


def _tiny_report():
    return EvalReport(
        run_config={"seed": 3, "text_field": "title", "smote_placement": "once-before-cv"},
        corpus={"fingerprint": "abc123", "n_reports": 10, "class_counts": {"non_intrinsic": 4, "intrinsic": 6}},
        split={"train": 8, "test": 2},
        embedding={"source": "tfidf", "fit_scope": "full", "vocabulary_size": 5},
        families={
            "dtree": {
                "grid": [],
                "best_config": {"family": "dtree", "params": {"max_depth": 3}},
                "cv_best": {"status": "ok", "metrics": {}},
                "holdout": {
                    "precision": 0.638,
                    "recall": 0.96,
                    "f1": 0.78125,
                    "accuracy": 0.7,
                    "auc": 0.615,
                    "degenerate": [],
                },
            }
        },
        predictions=[
            {"family": "dtree", "bug_id": "a", "y_true": 1, "y_pred": 1, "score": 0.9},
            {"family": "dtree", "bug_id": "b", "y_true": 0, "y_pred": 1, "score": 0.7},
        ],
        tool_version="0.1.0",
        created_at="2024-01-01T00:00:00+00:00",
        wall_clock_seconds=1.5,
    )


@pytest.mark.parametrize(
    "value,expected",
    [
        (0.638, "63.8%"),
        (0.9595, "96.0%"),   # 95.95 -> half-to-even -> 96.0
        (0.78125, "78.1%"),  # 78.125 -> half-to-even -> 78.1 not 78.2
        (1.0, "100.0%"),
        (0.0, "0.0%"),
    ],
)
def test_format_percent_half_to_even(value, expected):
    assert format_percent(value) == expected


def test_markdown_has_one_row_per_family_and_columns():
    report = _tiny_report()
    report.families["svm"] = report.families["dtree"]
    md = render_markdown(report)
    rows = [l for l in md.splitlines() if l.startswith("| ")]
    assert rows[0] == "| Models | Precision | Recall | F1 Score | AUC-ROC |"
    assert len(rows) == 1 + 2
    assert "| Decision Tree | 63.8% | 96.0% | 78.1% | 61.5% |" in md


def test_markdown_values_equal_json_rounded_half_even():
    report = _tiny_report()
    md = render_markdown(report)
    loaded = json.loads(report_to_json(report))
    holdout = loaded["families"]["dtree"]["holdout"]
    for key in ("precision", "recall", "f1", "auc"):
        expected = (Decimal(repr(float(holdout[key]))) * 100).quantize(
            Decimal("0.1"), rounding=ROUND_HALF_EVEN
        )
        assert f"{expected}%" in md


def test_json_round_trip_byte_identical():
    report = _tiny_report()
    text1 = report_to_json(report)
    text2 = report_to_json(report_from_json(text1))
    assert text1 == text2


def test_canonical_json_excludes_volatile_fields():
    a = _tiny_report()
    b = _tiny_report()
    b.created_at = "2030-12-31T23:59:59+00:00"
    b.wall_clock_seconds = 99.0
    assert canonical_json(a) == canonical_json(b)
    assert report_to_json(a) != report_to_json(b)


def test_emit_report_writes_all_artifacts(tmp_path):
    report = _tiny_report()
    written = emit_report(report, tmp_path / "out")
    assert written["json"].exists()
    assert written["markdown"].exists()
    assert written["predictions"].exists()
    lines = written["predictions"].read_text().splitlines()
    assert lines[0] == "family,bug_id,y_true,y_pred,score"
    assert len(lines) == 3


def test_rendered_numbers_recomputable_from_predictions(tmp_path):
    # The table's numbers must be derivable from the persisted predictions.
    from buggin.metrics import holdout_metrics

    report = _tiny_report()
    y_true = [p["y_true"] for p in report.predictions]
    y_pred = [p["y_pred"] for p in report.predictions]
    scores = [p["score"] for p in report.predictions]
    recomputed = holdout_metrics(y_true, y_pred, scores)
    assert recomputed["recall"] == 1.0
    assert recomputed["precision"] == 0.5
