"""
Scoring generated text
======================

Corpus BLEU, ROUGE-L, n-gram entropy and novelty against the training
references, plus the leave-one-out protocol for human references.
"""

from d2tnlg.metrics import (bleu_stats, corpus_bleu, diversity_stats, leave_one_out_human_eval,
                            ngram_entropy, rouge_l)

hyps = ["the cat sat on", "a dog ran"]
refs = [["the cat sat on the mat"], ["a dog ran away", "the dog ran"]]
r = bleu_stats(hyps, refs)
print("BLEU %.2f  BP %.4f  precisions %s" % (r.score, r.brevity_penalty, r.precisions))
print("ROUGE-L %.2f" % rouge_l(hyps, refs))

# BLEU is unsmoothed: a corpus without any 4-gram match scores zero
print(corpus_bleu(["the cat sat"], [["the cat sat on the mat"]]))

print("word entropy", ngram_entropy(["a b a c"]))
print("1-3-gram entropy", round(ngram_entropy(["a b a c"], orders=(1, 2, 3)), 4))

rep = diversity_stats(["the pub is nice. it is cheap.", "the pub is nice."], ["the pub is nice."])
for k, v in rep.rows():
    print(f"{k:>14}  {v}")

bleu, rouge = leave_one_out_human_eval([["a b c d", "a b c e"], ["x y z w", "x y z w"]])
print("human BLEU", bleu, "ROUGE-L", rouge)
