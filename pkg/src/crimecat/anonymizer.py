"""PII redaction and text normalization.

Entities are replaced with fixed placeholder tokens. Phone numbers, emails
and websites are found with patterns; person names, addresses and monetary
values go through a pluggable recognizer (a statistical-NER backend when
available, with a pattern-only fallback for money).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Optional, Protocol, Sequence

from .corpus import Complaint
from .textnorm import lemmatize_token, stopwords

PLACEHOLDERS: dict[str, str] = {
    "PERSON": "<PERSON>",
    "PHONE": "<PHONE>",
    "EMAIL": "<EMAIL>",
    "ADDRESS": "<ADDRESS>",
    "WEBSITE": "<WEBSITE>",
    "MONEY": "<MONEY>",
}

# Detection strategy per kind; pattern kinds are matched before recognizer
# kinds, and earlier matches mask their range from later detectors.
PATTERN_KINDS = ("EMAIL", "WEBSITE", "PHONE")
RECOGNIZER_KINDS = ("PERSON", "ADDRESS", "MONEY")

_PLACEHOLDER_RE = re.compile("|".join(re.escape(p) for p in PLACEHOLDERS.values()))

_EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")

# Scheme/www URLs, or bare domains with a common TLD ("XYZ.com" style).
_WEBSITE_RE = re.compile(
    r"(?:https?://|www\.)[^\s<>\"']*[^\s<>\"'.,;:!?]"
    r"|\b(?:[A-Za-z0-9-]+\.)+"
    r"(?:com|net|org|in|co|io|info|biz|gov|edu|xyz|online|site|app|shop|me)\b"
    r"(?:/[^\s<>\"']*)?",
    re.IGNORECASE,
)

# Indian mobile context: 10 digits, optional +91/0 prefix, optional single
# space/hyphen separators. Lookarounds keep us out of longer digit runs.
_PHONE_RE = re.compile(r"(?<!\d)(?:\+91[-\s]?|0)?(?:\d[-\s]?){9}\d(?!\d)")

# Pattern fallback for money mentions; recognizer recall on code-mixed
# money strings is poor.
_MONEY_RE = re.compile(
    r"(?:₹|Rs\.?|INR)\s?\d[\d,]*(?:\.\d+)?|\b\d[\d,]*(?:\.\d+)?\s?(?:rupees|rupaye)\b",
    re.IGNORECASE,
)

_PATTERN_RES = {"EMAIL": _EMAIL_RE, "WEBSITE": _WEBSITE_RE, "PHONE": _PHONE_RE}


class RecognizerUnavailableError(RuntimeError):
    """The configured recognizer backend cannot be constructed."""


class Recognizer(Protocol):
    """Detector for PERSON/ADDRESS/MONEY spans.

    Implementations may hold internal state and must not be shared across
    threads; batch callers create one instance per worker.
    """

    def detect(self, text: str) -> list[tuple[int, int, str]]:
        """Return (start, end, kind) spans; kind in RECOGNIZER_KINDS."""
        ...


class PatternRecognizer:
    """Degraded default: detects MONEY by pattern, no PERSON/ADDRESS."""

    def detect(self, text: str) -> list[tuple[int, int, str]]:
        return [(m.start(), m.end(), "MONEY") for m in _MONEY_RE.finditer(text)]


class SpacyRecognizer:
    """Statistical-NER backend; requires spacy and an installed model."""

    _ENT_MAP = {"PERSON": "PERSON", "GPE": "ADDRESS", "LOC": "ADDRESS", "FAC": "ADDRESS", "MONEY": "MONEY"}

    def __init__(self, model: str = "en_core_web_sm"):
        try:
            import spacy  # type: ignore

            self._nlp = spacy.load(model)
        except Exception as exc:  # missing package or model
            raise RecognizerUnavailableError(
                f"spacy backend unavailable ({exc}); use PatternRecognizer for "
                "degraded pattern-only operation or install the model for full NER"
            ) from exc

    def detect(self, text: str) -> list[tuple[int, int, str]]:
        spans = []
        money = {(m.start(), m.end()) for m in _MONEY_RE.finditer(text)}
        for ent in self._nlp(text).ents:
            kind = self._ENT_MAP.get(ent.label_)
            if kind:
                spans.append((ent.start_char, ent.end_char, kind))
        for start, end in money:
            spans.append((start, end, "MONEY"))
        return spans


def build_recognizer(name: str = "pattern") -> Recognizer:
    if name == "pattern":
        return PatternRecognizer()
    if name == "spacy":
        return SpacyRecognizer()
    raise ValueError(f"unknown recognizer {name!r}")


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    kind: str
    surface: Optional[str] = None  # retained only in audit mode


@dataclass
class RedactionResult:
    text: str
    spans: list[Span]
    audit_mode: bool = False


@dataclass(frozen=True)
class NormalizationConfig:
    remove_stopwords: bool = True
    lemmatize: bool = True
    stopword_list_id: str = "hinglish"
    # placeholders are never stopword-removed or lemmatized
    preserve_placeholders: bool = True


def _claim(claimed: list[tuple[int, int]], start: int, end: int) -> bool:
    """Record [start,end) unless it overlaps an already-claimed range."""
    for s, e in claimed:
        if start < e and s < end:
            return False
    claimed.append((start, end))
    return True


def redact(
    text: str,
    audit_mode: bool = False,
    recognizer: Optional[Recognizer] = None,
) -> RedactionResult:
    """Replace detected entities with placeholder tokens.

    Pattern detectors run first (EMAIL, WEBSITE, PHONE), then recognizer
    kinds; earlier matches mask their character range from later detectors.
    Already-present placeholders are left untouched, which makes redaction
    idempotent.
    """
    if not text:
        raise ValueError("redact: text is empty")
    if recognizer is None:
        recognizer = PatternRecognizer()

    claimed: list[tuple[int, int]] = [
        (m.start(), m.end()) for m in _PLACEHOLDER_RE.finditer(text)
    ]
    spans: list[Span] = []
    for kind in PATTERN_KINDS:
        for m in _PATTERN_RES[kind].finditer(text):
            if _claim(claimed, m.start(), m.end()):
                spans.append(Span(m.start(), m.end(), kind, m.group() if audit_mode else None))
    for start, end, kind in recognizer.detect(text):
        if kind not in RECOGNIZER_KINDS:
            raise ValueError(f"recognizer returned unknown kind {kind!r}")
        if _claim(claimed, start, end):
            spans.append(Span(start, end, kind, text[start:end] if audit_mode else None))

    spans.sort(key=lambda s: s.start)
    pieces: list[str] = []
    cursor = 0
    for span in spans:
        pieces.append(text[cursor : span.start])
        pieces.append(PLACEHOLDERS[span.kind])
        cursor = span.end
    pieces.append(text[cursor:])
    return RedactionResult(text="".join(pieces), spans=spans, audit_mode=audit_mode)


def reconstruct_redacted(original: str, spans: Sequence[Span]) -> str:
    """Rebuild the redacted text from the original plus spans (audit check)."""
    pieces, cursor = [], 0
    for span in spans:
        pieces.append(original[cursor : span.start])
        pieces.append(PLACEHOLDERS[span.kind])
        cursor = span.end
    pieces.append(original[cursor:])
    return "".join(pieces)


_EDGE_PUNCT = re.compile(r"^\W+|\W+$", re.UNICODE)


def normalize(text: str, config: NormalizationConfig = NormalizationConfig()) -> str:
    """Stopword removal + lemmatization over whitespace tokens.

    Placeholder tokens pass through verbatim; everything else is
    lowercased, stripped of edge punctuation, filtered against the
    configured stopword list and reduced to a base form. Token order is
    preserved. Output may legitimately be empty.
    """
    stop = stopwords(config.stopword_list_id) if config.remove_stopwords else frozenset()
    out: list[str] = []
    for token in text.split():
        embedded = _PLACEHOLDER_RE.findall(token)
        if embedded:
            # placeholder possibly carrying edge punctuation: keep the
            # placeholder itself verbatim, drop the punctuation
            out.extend(embedded)
            continue
        word = _EDGE_PUNCT.sub("", token).lower()
        if not word:
            continue
        if config.remove_stopwords and word in stop:
            continue
        if config.lemmatize:
            word = lemmatize_token(word)
        out.append(word)
    return " ".join(out)


@dataclass
class RedactionStats:
    counts: dict[str, int] = field(default_factory=dict)
    errors: list[tuple[str, str]] = field(default_factory=list)  # (complaint id, message)

    def add(self, spans: Sequence[Span]) -> None:
        for span in spans:
            self.counts[span.kind] = self.counts.get(span.kind, 0) + 1


def anonymize_corpus(
    complaints: Sequence[Complaint],
    norm_config: NormalizationConfig = NormalizationConfig(),
    recognizer: Optional[Recognizer] = None,
    fail_fast: bool = False,
    skip_normalize: bool = False,
) -> tuple[list[Complaint], RedactionStats]:
    """redact + normalize every complaint; per-item failures don't abort
    the batch unless fail_fast is set."""
    stats = RedactionStats()
    out: list[Complaint] = []
    for c in complaints:
        try:
            result = redact(c.text, recognizer=recognizer)
            stats.add(result.spans)
            new_text = result.text if skip_normalize else normalize(result.text, norm_config)
            if not new_text.strip():
                # fully stopword-removed text: keep the redacted form so the
                # complaint stays non-empty; flagged via stats
                new_text = result.text
            out.append(replace(c, text=new_text))
        except Exception as exc:
            if fail_fast:
                raise
            stats.errors.append((c.id, str(exc)))
    return out, stats
