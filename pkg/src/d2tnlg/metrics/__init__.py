from .diversity import (
    DiversityReport,
    diversity_stats,
    entropy,
    ngram_distribution,
    ngram_entropy,
    split_sentences,
)
from .human import MeanSd, drop_one_reference, leave_one_out_folds, leave_one_out_human_eval
from .overlap import (
    BleuResult,
    bleu_stats,
    closest_ref_length,
    corpus_bleu,
    lcs_length,
    rouge_l,
    rouge_l_f,
    rouge_l_instances,
)
from .report import EvalReport, correct_at_n, evaluate
