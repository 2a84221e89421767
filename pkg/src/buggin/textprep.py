"""Turn raw bug-report text into a cleaned, tokenized, lemmatized Document.

The cleanup applies, in this order: traceback-block removal, URL
replacement, hex-id deletion, project-name sentinel replacement, special
character and numeral removal, lowercasing. Rule order is observable: a
project name inside a URL is consumed by the URL rule and never becomes a
project sentinel.

All fixtures (stopword list, lemma rules and exceptions, project names) are
frozen files shipped with the package so runs are reproducible; they are
declared approximations of the usual library defaults.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

SENTINEL_URL = "<url>"
SENTINEL_INTERNAL = "<internal_project>"
SENTINEL_EXTERNAL = "<external_project>"
SENTINELS = frozenset({SENTINEL_URL, SENTINEL_INTERNAL, SENTINEL_EXTERNAL})

DEFAULT_TRACEBACK_HEADERS = ("Traceback (most recent call last):",)

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
# Hex runs of length 7-40 with at least one digit: SHA prefixes and commit
# ids, but not ordinary words like "decade".
_HEX_ID_RE = re.compile(r"\b(?=[0-9a-fA-F]*\d)[0-9a-fA-F]{7,40}\b")
_STRIP_RE = re.compile(r"[^A-Za-z<>_\-\s]+")
_VOWELS = frozenset("aeiou")


@dataclass(frozen=True)
class ProjectContext:
    """The report's own project plus every project name we know about."""

    own_project: str
    known_projects: frozenset

    def __post_init__(self):
        known = frozenset(p.lower() for p in self.known_projects)
        if self.own_project.lower() not in known:
            known = known | {self.own_project.lower()}
        object.__setattr__(self, "known_projects", known)
        object.__setattr__(self, "own_project", self.own_project.lower())


@dataclass(frozen=True)
class Document:
    bug_id: str
    source_field: str
    tokens: tuple


def _strip_tracebacks(text, headers):
    for header in headers:
        pattern = re.compile(
            r"^" + re.escape(header) + r"[^\n]*\n?(?:[ \t]+[^\n]*\n?)*",
            re.MULTILINE,
        )
        text = pattern.sub(" ", text)
    return text


def clean_text(raw, ctx, traceback_headers=DEFAULT_TRACEBACK_HEADERS):
    """Apply the ordered cleanup rules; total function, never raises."""
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8", errors="replace")
    text = _strip_tracebacks(raw, traceback_headers)
    text = _URL_RE.sub(" <URL> ", text)
    text = _HEX_ID_RE.sub(" ", text)
    if ctx.known_projects:
        names = sorted(ctx.known_projects, key=len, reverse=True)
        project_re = re.compile(
            r"\b(?:" + "|".join(re.escape(n) for n in names) + r")\b",
            re.IGNORECASE,
        )

        def _sentinel(match):
            if match.group(0).lower() == ctx.own_project:
                return " <internal project> "
            return " <external project> "

        text = project_re.sub(_sentinel, text)
    text = _STRIP_RE.sub(" ", text)
    return " ".join(text.lower().split())


def tokenize(cleaned):
    """Whitespace split with multi-word sentinels normalized to one token."""
    cleaned = cleaned.replace("<internal project>", SENTINEL_INTERNAL)
    cleaned = cleaned.replace("<external project>", SENTINEL_EXTERNAL)
    return cleaned.split()


def remove_stopwords(tokens, stoplist):
    """Order-preserving filter; sentinel tokens are never dropped."""
    return [t for t in tokens if t in SENTINELS or t not in stoplist]


@dataclass(frozen=True)
class _Rule:
    suffix: str
    replacement: str
    min_word_len: int
    plural_guard: bool = False
    vowel_stem: bool = False
    not_ee: bool = False
    repair: bool = False


def _repair_stem(stem):
    # Doubled final consonant from -ing/-ed inflection (running -> run);
    # ll/ss/zz/ff stay doubled (falling -> fall, passing -> pass).
    if len(stem) >= 4 and stem[-1] == stem[-2] and stem[-1] in "bdgmnprt":
        return stem[:-1]
    if stem[-1] in "vuc":
        return stem + "e"
    if stem[-1] == "s" and stem[-2:] != "ss":
        return stem + "e"
    if stem[-2:] in ("at", "ut"):
        return stem + "e"
    return stem


class Lemmatizer:
    """Deterministic rule-based English lemmatizer.

    Exception dictionary first, then ordered suffix rules; anything else
    passes through unchanged. Sentinel tokens are untouched.
    """

    def __init__(self, exceptions, rules):
        self.exceptions = dict(exceptions)
        self.rules = tuple(rules)

    @classmethod
    def from_files(cls, exceptions_path=None, rules_path=None):
        exceptions_path = exceptions_path or default_fixture("lemma_exceptions.tsv")
        rules_path = rules_path or default_fixture("lemma_rules.tsv")
        exceptions = {}
        for line in _fixture_lines(exceptions_path):
            word, lemma = line.split("\t")
            exceptions[word] = lemma
        rules = []
        for line in _fixture_lines(rules_path):
            parts = line.split("\t")
            suffix, replacement, min_len = parts[0], parts[1], int(parts[2])
            flags = set(parts[3].split(",")) if len(parts) > 3 and parts[3] else set()
            rules.append(
                _Rule(
                    suffix=suffix,
                    replacement=replacement,
                    min_word_len=min_len,
                    plural_guard="plural_guard" in flags,
                    vowel_stem="vowel_stem" in flags,
                    not_ee="not_ee" in flags,
                    repair="repair" in flags,
                )
            )
        return cls(exceptions, rules)

    def lemma(self, word):
        if word in SENTINELS or word.startswith("<"):
            return word
        if word in self.exceptions:
            return self.exceptions[word]
        for rule in self.rules:
            if len(word) < rule.min_word_len or not word.endswith(rule.suffix):
                continue
            if rule.plural_guard and word[-2:] in ("ss", "us", "is"):
                continue
            stem = word[: len(word) - len(rule.suffix)]
            if rule.not_ee and stem.endswith("e"):
                continue
            if rule.vowel_stem and (
                len(stem) < 3 or not any(ch in _VOWELS for ch in stem)
            ):
                continue
            result = stem + rule.replacement
            if rule.repair:
                result = _repair_stem(result)
            return result
        return word

    def __call__(self, tokens):
        return [self.lemma(t) for t in tokens]


_default_lemmatizer = None


def get_default_lemmatizer():
    global _default_lemmatizer
    if _default_lemmatizer is None:
        _default_lemmatizer = Lemmatizer.from_files()
    return _default_lemmatizer


def lemmatize(tokens, lemmatizer=None):
    return (lemmatizer or get_default_lemmatizer())(tokens)


def preprocess(report, field, ctx, stoplist, lemmatizer=None):
    """Full pipeline for one report field; an empty Document is valid."""
    if field not in ("title", "description"):
        raise ValueError(f"field must be 'title' or 'description', got {field!r}")
    raw = getattr(report, field)
    tokens = lemmatize(
        remove_stopwords(tokenize(clean_text(raw, ctx)), stoplist), lemmatizer
    )
    return Document(bug_id=report.bug_id, source_field=field, tokens=tuple(tokens))


def _fixture_lines(path):
    text = Path(path).read_text(encoding="utf-8")
    for line in text.splitlines():
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield line


def default_fixture(name):
    return resources.files("buggin.fixtures") / name


def load_stopwords(path=None):
    path = path or default_fixture("stopwords.txt")
    return frozenset(_fixture_lines(path))


def load_projects(path=None):
    path = path or default_fixture("projects.txt")
    return tuple(_fixture_lines(path))
