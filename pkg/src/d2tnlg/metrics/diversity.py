"""Output diversity: n-gram entropy, unique sentences/words, novelty."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

from .overlap import ngrams, tokens

_SENT_END = re.compile(r"(?<=[.!?])(?:\s+|$)")


def ngram_distribution(texts, orders=(1,)):
    """Pooled frequencies of all n-grams of the given orders (per text, no
    n-grams across text boundaries)."""
    dist = Counter()
    for t in texts:
        toks = t if isinstance(t, list) else tokens(t)
        for n in orders:
            dist.update(ngrams(toks, n))
    return dist


def entropy(dist):
    total = sum(dist.values())
    if total == 0:
        raise ValueError("entropy of an empty distribution")
    h = -sum((c / total) * math.log2(c / total) for c in dist.values())
    return max(h, 0.0)


def ngram_entropy(texts, orders=(1,)):
    """Shannon entropy in bits of the pooled n-gram distribution."""
    return entropy(ngram_distribution(texts, orders))


def normalise(text):
    return " ".join(text.lower().split())


def split_sentences(text):
    return [s for s in (x.strip() for x in _SENT_END.split(normalise(text))) if s]


@dataclass(frozen=True)
class DiversityReport:
    unique_sentences: int
    unique_words: int
    word_entropy: float
    uni_bi_trigram_entropy: float
    pct_new_texts: float
    pct_new_sentences: float

    def rows(self):
        return [
            ("unique sents.", f"{self.unique_sentences}"),
            ("unique words", f"{self.unique_words}"),
            ("word E", f"{self.word_entropy:.2f}"),
            ("1-3-grams E", f"{self.uni_bi_trigram_entropy:.2f}"),
            ("% new texts", f"{self.pct_new_texts:.1f}"),
            ("% new sents.", f"{self.pct_new_sentences:.1f}"),
        ]


def diversity_stats(outputs, training_references) -> DiversityReport:
    """Diversity of ``outputs`` and their overlap with training references.

    Both sides should be delexicalised the same way; matching is exact after
    lowercasing and whitespace normalisation.
    """
    outputs = list(outputs)
    train_texts = {normalise(t) for t in training_references}
    train_sents = {s for t in training_references for s in split_sentences(t)}
    out_sents = [s for t in outputs for s in split_sentences(t)]
    toks = [tokens(t) for t in outputs]
    words = {w for ts in toks for w in ts}
    new_texts = sum(1 for t in outputs if normalise(t) not in train_texts)
    new_sents = sum(1 for s in out_sents if s not in train_sents)
    return DiversityReport(
        unique_sentences=len(set(out_sents)),
        unique_words=len(words),
        word_entropy=ngram_entropy(toks, (1,)),
        uni_bi_trigram_entropy=ngram_entropy(toks, (1, 2, 3)),
        pct_new_texts=100.0 * new_texts / len(outputs) if outputs else 0.0,
        pct_new_sentences=100.0 * new_sents / len(out_sents) if out_sents else 0.0,
    )
