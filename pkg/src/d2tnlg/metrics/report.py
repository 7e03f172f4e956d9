"""Evaluation reports and the file formats they are read from.

* hypothesis file: one text per line;
* multi-reference file: the references of one instance on consecutive lines,
  instances separated by a blank line;
* n-best file: blocks of ``log_prob TAB text`` lines, one block per input,
  blocks separated by a blank line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..rerank import score
from ..templates.classify import TemplateLabel, classify
from .overlap import bleu_stats, rouge_l_instances


@dataclass
class EvalReport:
    bleu: float
    rouge_l: float
    per_instance_rouge_l: list = field(default_factory=list)

    def rows(self):
        return [("BLEU", f"{self.bleu:.2f}"), ("ROUGE-L", f"{self.rouge_l:.2f}")]


def evaluate(hypotheses, references) -> EvalReport:
    b = bleu_stats(hypotheses, references)
    per = [100.0 * x for x in rouge_l_instances(hypotheses, references)]
    return EvalReport(b.score, sum(per) / len(per), per)


def is_correct(mr, text, lexicon=None):
    """Automated stand-in for a manual correctness judgement: no reranker
    error and a recognisable template structure."""
    return score(mr, text, lexicon).total == 0 and classify(text).label is not TemplateLabel.OTHER


def correct_at_n(mrs, nbest_texts, ns=(1, 2, 5, 30), lexicon=None):
    """Average number of correct texts among the top ``n`` hypotheses."""
    if len(mrs) != len(nbest_texts):
        raise ValueError(f"{len(mrs)} MRs but {len(nbest_texts)} hypothesis lists")
    flags = [[is_correct(mr, t, lexicon) for t in texts] for mr, texts in zip(mrs, nbest_texts)]
    return {n: sum(sum(f[:n]) for f in flags) / len(flags) for n in ns}


# ----------------------------------------------------------------- file I/O

def read_lines(path):
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh]


def read_blocks(path):
    blocks, cur = [], []
    for line in read_lines(path):
        if line.strip():
            cur.append(line)
        elif cur:
            blocks.append(cur)
            cur = []
    if cur:
        blocks.append(cur)
    return blocks


def write_blocks(path, blocks):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n\n".join("\n".join(b) for b in blocks))
        fh.write("\n")


def read_nbest(path):
    """List (per input) of ``(log_prob, text)`` lists."""
    out = []
    for n, block in enumerate(read_blocks(path)):
        hyps = []
        for line in block:
            lp, sep, text = line.partition("\t")
            if not sep:
                raise ValueError(f"{path}: block {n}: expected 'log_prob<TAB>text', got {line!r}")
            hyps.append((float(lp), text))
        out.append(hyps)
    return out


def format_nbest(hyps):
    return [f"{lp:.6f}\t{text}" for lp, text in hyps]


def format_table(title, rows):
    width = max(len(k) for k, _ in rows)
    lines = [title] + [f"  {k:<{width}}  {v:>10}" for k, v in rows]
    return "\n".join(lines)


def kv_key(label):
    """``"% new sents."`` -> ``pct_new_sents``, ``"c@5"`` -> ``c_at_5``."""
    label = label.lower().replace("%", "pct ").replace("@", " at ")
    return re.sub(r"[^a-z0-9]+", "_", label).strip("_")


def format_kv(prefix, rows):
    return "\n".join(f"{prefix}{kv_key(k)}={v}" for k, v in rows)
