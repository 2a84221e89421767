"""Deterministic synthetic corpora bundled with the repository.

The original study corpus (OpenStack bug reports with manual labels) is not
redistributable here, so the replication corpus is a generated stand-in
with the same shape: 1880 reports, 1120 intrinsic (is_bug=1, has_bic=1),
212 extrinsic (1, 0) and 548 non-bugs (0, x). Title text carries
class-correlated marker tokens at calibrated rates so the shallow-tree
models land near the reference F1 band; descriptions add the messy parts
(tracebacks, URLs, commit hashes) that preprocessing has to strip.

Regenerate the committed files with:  python -m buggin.datasets data/
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from .corpus import BugReport, Corpus, save_corpus
from .features import VECTORS_FILENAME

PROJECTS = (
    "nova",
    "neutron",
    "cinder",
    "keystone",
    "glance",
    "swift",
    "horizon",
    "heat",
    "ironic",
    "trove",
)

_COMMON = (
    "instance boot volume attach detach network port subnet router dhcp "
    "image snapshot backup server node agent scheduler compute api request "
    "response token auth policy quota flavor resize live migration console "
    "log message error warning state status pending active deleted stale "
    "cache database record table query lock race deadlock thread worker "
    "service daemon restart config option flag default value parse driver "
    "backend storage object container tenant user admin role group host "
    "cluster interface bridge tunnel packet security firewall rule "
    "floating address dns metadata cloud init boot disk partition mount "
    "filesystem path file directory permission denied timeout retry slow "
    "memory leak cpu load spike usage limit exceeded capacity full empty "
    "missing invalid unexpected fails failure failed failing broken start "
    "stop create delete update list show detail report test check verify"
).split()

# Marker tokens with class-conditional injection rates (intrinsic rate,
# non-intrinsic rate). Calibrated so the shallow-tree models land near the
# reference F1 band on titles: weak intrinsic markers keep the no-marker
# default leaning intrinsic, moderate non-intrinsic markers carve out part
# of the negative class; see tests/test_acceptance.py.
_INTRINSIC_MARKERS = (
    ("regression", 0.12, 0.03),
    ("incorrect", 0.10, 0.03),
    ("wrong", 0.08, 0.02),
)
_NONINTRINSIC_MARKERS = (
    ("gate", 0.02, 0.14),
    ("dependency", 0.02, 0.12),
    ("upgrade", 0.02, 0.10),
    ("mirror", 0.015, 0.08),
    ("question", 0.01, 0.06),
)

_TRACEBACK = (
    "Traceback (most recent call last):\n"
    "    File nova/compute/manager.py, line 214, in _build_instance\n"
    "    File nova/virt/driver.py, line 88, in spawn\n"
    "ValueError: unexpected vif state\n"
)


def _title_tokens(rng, label):
    tokens = list(rng.choice(_COMMON, size=rng.integers(5, 9)))
    for word, p_intr, p_non in _INTRINSIC_MARKERS + _NONINTRINSIC_MARKERS:
        p = p_intr if label == 1 else p_non
        if rng.random() < p:
            tokens.insert(int(rng.integers(0, len(tokens) + 1)), word)
    return tokens


def _description(rng, label, project):
    sentences = []
    for _ in range(int(rng.integers(2, 5))):
        words = list(rng.choice(_COMMON, size=rng.integers(8, 16)))
        sentences.append(" ".join(words) + ".")
    for word, p_intr, p_non in _INTRINSIC_MARKERS + _NONINTRINSIC_MARKERS:
        p = p_intr if label == 1 else p_non
        if rng.random() < p:
            sentences.insert(
                int(rng.integers(0, len(sentences) + 1)),
                f"the {word} shows up after every deploy.",
            )
    body = " ".join(sentences)
    if rng.random() < 0.25:
        bug_no = rng.integers(10000, 99999)
        body += f" see https://bugs.launchpad.net/{project}/+bug/{bug_no} for details"
    if rng.random() < 0.20:
        sha = "".join(rng.choice(list("0123456789abcdef"), size=10))
        body += f" bisected to commit {sha}"
    if rng.random() < 0.15:
        body = _TRACEBACK + body
    if rng.random() < 0.20:
        other = str(rng.choice([p for p in PROJECTS if p != project]))
        body += f" started after the {other} rollout"
    return body


def _build_reports(rng, flag_pairs, prefix):
    reports = []
    for i, (is_bug, has_bic) in enumerate(flag_pairs):
        label = 1 if (is_bug and has_bic) else 0
        project = str(rng.choice(PROJECTS))
        title = " ".join(_title_tokens(rng, label))
        if rng.random() < 0.3:
            title = f"{project} {title}"
        reports.append(
            BugReport(
                bug_id=f"{prefix}-{i + 1:06d}",
                project=project,
                title=title,
                description=_description(rng, label, project),
                is_bug=bool(is_bug),
                has_bic=bool(has_bic),
            )
        )
    return reports


def make_replication_corpus(seed=20230801):
    """1880 reports: 1120 intrinsic, 212 extrinsic, 548 non-bugs."""
    rng = np.random.default_rng(seed)
    flag_pairs = (
        [(1, 1)] * 1120
        + [(1, 0)] * 212
        + [(0, int(rng.random() < 0.1)) for _ in range(548)]
    )
    order = rng.permutation(len(flag_pairs))
    flag_pairs = [flag_pairs[i] for i in order]
    return Corpus.from_reports(_build_reports(rng, flag_pairs, "OS"))


_SEP_INTRINSIC = ("nullpointer", "offbyone", "typo", "overflow")
_SEP_NONINTRINSIC = ("outage", "thirdparty", "infra", "vendor")


def make_separable_corpus(n=240, seed=7):
    """Small corpus whose classes are token-disjoint, hence separable."""
    rng = np.random.default_rng(seed)
    n_intrinsic = int(round(n * 0.6))
    flag_pairs = [(1, 1)] * n_intrinsic + [
        (1, 0) if rng.random() < 0.3 else (0, 0) for _ in range(n - n_intrinsic)
    ]
    order = rng.permutation(len(flag_pairs))
    flag_pairs = [flag_pairs[i] for i in order]
    reports = []
    for i, (is_bug, has_bic) in enumerate(flag_pairs):
        label = 1 if (is_bug and has_bic) else 0
        markers = _SEP_INTRINSIC if label == 1 else _SEP_NONINTRINSIC
        project = str(rng.choice(PROJECTS))
        tokens = list(rng.choice(_COMMON, size=rng.integers(4, 7)))
        tokens.insert(
            int(rng.integers(0, len(tokens) + 1)), str(rng.choice(markers))
        )
        reports.append(
            BugReport(
                bug_id=f"SYN-{i + 1:04d}",
                project=project,
                title=" ".join(tokens),
                description=_description(rng, label, project),
                is_bug=bool(is_bug),
                has_bic=bool(has_bic),
            )
        )
    return Corpus.from_reports(reports)


def make_embedding_fixture(corpus, out_dir, dim=16, seed=0, model_name="synthetic-gaussian"):
    """Write a manifest + vectors.jsonl fixture with class-shifted vectors.

    Stands in for an external transformer export so the dense path runs
    without the real exporter.
    """
    import json

    rng = np.random.default_rng(seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    shift = rng.normal(size=dim)
    shift /= np.linalg.norm(shift)
    rows = []
    for report, label in zip(corpus.reports, corpus.labels):
        vec = rng.normal(size=dim) + (1.2 * shift if int(label) == 1 else -1.2 * shift)
        rows.append({"id": report.bug_id, "v": [round(float(v), 6) for v in vec]})
    manifest = {
        "model_name": model_name,
        "dimension": dim,
        "count": len(rows),
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    with (out_dir / VECTORS_FILENAME).open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return manifest_path


def main(argv=None):
    argv = argv if argv is not None else sys.argv[1:]
    out_dir = Path(argv[0]) if argv else Path("data")
    out_dir.mkdir(parents=True, exist_ok=True)
    save_corpus(make_replication_corpus(), out_dir / "replication.csv", format="csv")
    save_corpus(
        make_separable_corpus(), out_dir / "synthetic_separable.csv", format="csv"
    )
    print(f"wrote corpora under {out_dir}")


if __name__ == "__main__":
    main()
