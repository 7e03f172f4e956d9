"""Rule-based reranking by verbatim attribute-value matches.

A hypothesis earns one error point per MR attribute whose value is not
mentioned (omission) and one per attribute mentioned with a value the MR does
not have (addition). Phrase variants are matched longest first and matched
spans are claimed, so "not family-friendly" does not also count as
"family-friendly".
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus.mr import E2E_ATTRIBUTES, MeaningRepresentation
from .templates.classify import normalise
from .templates.lexicon import AttributeLexicon, default_lexicon


@dataclass(frozen=True)
class ErrorScore:
    omissions: int
    additions: int

    @property
    def total(self):
        return self.omissions + self.additions


def _find(text, phrase, claimed):
    pat = re.compile(r"(?<![\w-])" + re.escape(phrase.lower()) + r"(?![\w-])")
    for m in pat.finditer(text):
        span = range(m.start(), m.end())
        if not any(i in claimed for i in span):
            return span
    return None


def mentioned_values(text, mr: MeaningRepresentation, lexicon: AttributeLexicon):
    """``{(attribute, value)}`` whose surface form occurs in ``text``."""
    text = normalise(text)
    d = mr.as_dict()
    candidates = []
    for attr in E2E_ATTRIBUTES:
        values = dict.fromkeys(lexicon.values(attr))
        if d.get(attr):
            values[d[attr]] = None
        for value in values:
            for variant in lexicon.variants(attr, value):
                candidates.append((len(variant), variant, attr, value))
    candidates.sort(key=lambda c: (-c[0], c[1]))
    claimed: set[int] = set()
    found = set()
    for _, variant, attr, value in candidates:
        while True:
            span = _find(text, variant, claimed)
            if span is None:
                break
            claimed.update(span)
            found.add((attr, value))
    return found


def score(mr: MeaningRepresentation, text: str, lexicon: AttributeLexicon | None = None) -> ErrorScore:
    lexicon = lexicon or default_lexicon()
    d = mr.as_dict()
    found = mentioned_values(text, mr, lexicon)
    omissions = sum(1 for attr, value in d.items() if (attr, value) not in found)
    added_attrs = {attr for attr, value in found if d.get(attr) != value}
    return ErrorScore(omissions, len(added_attrs))


def rerank(mr, hypotheses, text_of=str, lexicon=None):
    """Stable sort of ``hypotheses`` (already in model order) by error total.

    ``text_of`` maps a hypothesis to its text.
    """
    lexicon = lexicon or default_lexicon()
    scored = [(score(mr, text_of(h), lexicon).total, i, h) for i, h in enumerate(hypotheses)]
    scored.sort(key=lambda x: (x[0], x[1]))
    return [h for _, _, h in scored]
