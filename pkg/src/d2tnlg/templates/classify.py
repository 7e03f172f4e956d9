"""Surface-pattern classification of a text as Template 1, 2 or a combination."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from ..corpus.tokenize import detokenize


class TemplateLabel(str, Enum):
    T1 = "T1"
    T2 = "T2"
    COMBO_T1_OPEN_T2_ORDER = "COMBO_T1_OPEN_T2_ORDER"
    COMBO_T2_OPEN_T1_ORDER = "COMBO_T2_OPEN_T1_ORDER"
    OTHER = "OTHER"

    @property
    def is_combo(self):
        return self.name.startswith("COMBO")


@dataclass(frozen=True)
class TemplateClassification:
    label: TemplateLabel
    opening: str | None  # "T1", "T2" or None
    order: str | None  # "T1", "T2" or None when rating/location is not both present


_IS_A = re.compile(r"\bis an?\b")
_SERVES = re.compile(r"\bserves\b")
_RATING = re.compile(r"\bhas an?\b|\bcustomer rating\b|\brating\b")
_LOCATION = re.compile(r"\blocated\b")
_SENT_SPLIT = re.compile(r"(?<=[.!?])\s+")


def normalise(text):
    """Lowercase; re-attach tokenised punctuation so both raw and tokenised
    texts are handled alike."""
    return detokenize(text.split()).lower()


def _opening(first):
    m_is, m_serves = _IS_A.search(first), _SERVES.search(first)
    if m_is and (m_serves is None or m_is.start() < m_serves.start()):
        return "T1"
    if first.startswith("the ") and m_serves and (m_is is None or m_serves.start() < m_is.start()):
        return "T2"
    return None


def _first_hit(pattern, sentences):
    for i, s in enumerate(sentences):
        m = pattern.search(s)
        if m:
            return i, m.start()
    return None


def classify(text) -> TemplateClassification:
    sentences = _SENT_SPLIT.split(normalise(text).strip())
    if not sentences or not sentences[0]:
        return TemplateClassification(TemplateLabel.OTHER, None, None)
    opening = _opening(sentences[0])
    rating = _first_hit(_RATING, sentences[1:])
    location = _first_hit(_LOCATION, sentences[1:])
    order = None
    if rating and location:
        order = "T2" if location[0] < rating[0] else "T1"
    if opening is None:
        return TemplateClassification(TemplateLabel.OTHER, None, order)
    if order is None or order == opening:
        return TemplateClassification(TemplateLabel(opening), opening, order)
    label = TemplateLabel.COMBO_T1_OPEN_T2_ORDER if opening == "T1" else TemplateLabel.COMBO_T2_OPEN_T1_ORDER
    return TemplateClassification(label, opening, order)
