"""Corpus BLEU and ROUGE-L over multi-reference test sets."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from ..corpus.tokenize import word_tokenize


def tokens(text):
    return word_tokenize(text.lower())


def ngrams(toks, n):
    return Counter(tuple(toks[i:i + n]) for i in range(len(toks) - n + 1))


def _check(hypotheses, references):
    if not hypotheses:
        raise ValueError("empty hypothesis list")
    if len(hypotheses) != len(references):
        raise ValueError(f"{len(hypotheses)} hypotheses but {len(references)} reference sets")
    for i, refs in enumerate(references):
        if not refs:
            raise ValueError(f"instance {i} has no reference")


@dataclass(frozen=True)
class BleuResult:
    score: float
    precisions: tuple  # (matches, total) per order
    brevity_penalty: float
    hyp_length: int
    ref_length: int


def closest_ref_length(hyp_len, ref_lens):
    return min(ref_lens, key=lambda r: (abs(r - hyp_len), r))


def bleu_stats(hypotheses, references, max_n=4) -> BleuResult:
    """Corpus BLEU: clipped n-gram precisions (n = 1..max_n), geometric mean,
    closest-reference brevity penalty. No smoothing: any order without matches
    gives 0."""
    _check(hypotheses, references)
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for hyp, refs in zip(hypotheses, references):
        h = tokens(hyp)
        rs = [tokens(r) for r in refs]
        hyp_len += len(h)
        ref_len += closest_ref_length(len(h), [len(r) for r in rs])
        for n in range(1, max_n + 1):
            hc = ngrams(h, n)
            max_ref = Counter()
            for r in rs:
                for g, c in ngrams(r, n).items():
                    if c > max_ref[g]:
                        max_ref[g] = c
            matches[n - 1] += sum(min(c, max_ref[g]) for g, c in hc.items())
            totals[n - 1] += max(len(h) - n + 1, 0)
    bp = 1.0 if hyp_len > ref_len else (math.exp(1.0 - ref_len / hyp_len) if hyp_len else 0.0)
    if min(matches) == 0:
        score = 0.0
    else:
        log_p = sum(math.log(m / t) for m, t in zip(matches, totals)) / max_n
        score = 100.0 * bp * math.exp(log_p)
    return BleuResult(score, tuple(zip(matches, totals)), bp, hyp_len, ref_len)


def corpus_bleu(hypotheses, references) -> float:
    return bleu_stats(hypotheses, references).score


def lcs_length(a, b):
    """Longest common subsequence length by dynamic programming."""
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l_f(hyp_toks, ref_toks, beta=1.2):
    lcs = lcs_length(hyp_toks, ref_toks)
    if lcs == 0:
        return 0.0, 0.0, 0.0
    p = lcs / len(hyp_toks)
    r = lcs / len(ref_toks)
    f = (1 + beta ** 2) * r * p / (r + beta ** 2 * p)
    return p, r, f


def rouge_l_instances(hypotheses, references, beta=1.2):
    _check(hypotheses, references)
    out = []
    for hyp, refs in zip(hypotheses, references):
        h = tokens(hyp)
        out.append(max(rouge_l_f(h, tokens(r), beta)[2] for r in refs))
    return out


def rouge_l(hypotheses, references, beta=1.2) -> float:
    """Mean over instances of the best per-reference LCS F-measure, x100."""
    scores = rouge_l_instances(hypotheses, references, beta)
    return 100.0 * sum(scores) / len(scores)
