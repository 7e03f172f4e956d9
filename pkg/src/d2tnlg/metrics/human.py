"""Scoring human references against each other (leave-one-out)."""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from .overlap import corpus_bleu, rouge_l


@dataclass(frozen=True)
class MeanSd:
    mean: float
    sd: float

    def __str__(self):
        return f"{self.mean:.1f}±{self.sd:.1f}"


def _mean_sd(values):
    values = list(values)
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    return MeanSd(statistics.fmean(values), sd)


def leave_one_out_folds(references):
    """Build the artificial prediction files.

    File ``k`` predicts, for every instance that has a ``k``-th reference, that
    reference and scores it against the instance's remaining references.
    Instances with fewer than two references are excluded up front.
    """
    multi = [list(r) for r in references if len(r) >= 2]
    if not multi:
        raise ValueError("leave-one-out needs at least one instance with two or more references")
    n = max(len(r) for r in multi)
    folds = []
    for k in range(n):
        hyps, refs = [], []
        for r in multi:
            if k < len(r):
                hyps.append(r[k])
                refs.append(r[:k] + r[k + 1:])
        folds.append((hyps, refs))
    return folds


def leave_one_out_human_eval(references):
    """``(bleu, rouge_l)`` as mean and SD over the leave-one-out files."""
    folds = leave_one_out_folds(references)
    bleu = [corpus_bleu(h, r) for h, r in folds]
    rouge = [rouge_l(h, r) for h, r in folds]
    return _mean_sd(bleu), _mean_sd(rouge)


def drop_one_reference(references, rng):
    """Remove one randomly chosen reference per instance (when it has more
    than one) so systems see the same average reference count as humans."""
    out = []
    for refs in references:
        refs = list(refs)
        if len(refs) > 1:
            del refs[int(rng.integers(len(refs)))]
        out.append(refs)
    return out
