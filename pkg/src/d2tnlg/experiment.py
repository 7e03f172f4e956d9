"""Glue for the synthetic-template experiments: data splits, training, n-best decoding."""

from __future__ import annotations

from dataclasses import dataclass

from .corpus.pipeline import Pair, preprocess_pair
from .corpus.tokenize import detokenize
from .corpus.vocab import WORD, Vocabulary, build_vocab, join_symbols, symbols_of
from .prng import SeededPrng
from .seq2seq import apply_overrides, beam_search, get_preset, train
from .templates import SynthesisConfig, lexicon_product, synthesize_corpus, to_training_pairs


def split_lexicon_inputs(n_train, n_dev, n_test, seed, test_filter=None, lexicon=None):
    """Disjoint random train/dev/test MRs drawn from the lexicon product.

    ``test_filter`` restricts which MRs may be drawn for the test split.
    """
    mrs = list(lexicon_product(lexicon))
    rng = SeededPrng(seed).stream("split")
    order = [int(i) for i in rng.permutation(len(mrs))]
    test, rest = [], []
    for i in order:
        if len(test) < n_test and (test_filter is None or test_filter(mrs[i])):
            test.append(mrs[i])
        else:
            rest.append(mrs[i])
    if len(test) < n_test or len(rest) < n_train + n_dev:
        raise ValueError("lexicon product too small for the requested split")
    return rest[:n_train], rest[n_train:n_train + n_dev], test


def encode_pairs(pairs, src_vocab, tgt_vocab, mode=WORD):
    return [(src_vocab.encode(symbols_of(p.source, mode)), tgt_vocab.encode(symbols_of(p.target, mode)))
            for p in pairs]


@dataclass
class TemplateModel:
    model: object
    src_vocab: Vocabulary
    tgt_vocab: Vocabulary
    result: object
    beam_size: int


def train_template_model(train_mrs, dev_mrs, templates_flag, preset_key, seed, overrides=None,
                         progress=None):
    preset = get_preset(preset_key)
    if overrides:
        preset = apply_overrides(preset, overrides)
    cfg = SynthesisConfig.from_flag(templates_flag)
    train_pairs = to_training_pairs(synthesize_corpus(train_mrs, cfg))
    dev_pairs = to_training_pairs(synthesize_corpus(dev_mrs, SynthesisConfig(cfg.templates, 1)))
    src_vocab, tgt_vocab, _ = build_vocab([(p.source, p.target) for p in train_pairs], WORD)
    result = train(encode_pairs(train_pairs, src_vocab, tgt_vocab),
                   encode_pairs(dev_pairs, src_vocab, tgt_vocab),
                   len(src_vocab), len(tgt_vocab), preset.model, preset.schedule, seed, progress=progress)
    return TemplateModel(result.model, src_vocab, tgt_vocab, result, preset.beam_size)


def source_of(mr, mode=WORD) -> Pair:
    return preprocess_pair(mr, "", mode)


def nbest(model, src_vocab, tgt_vocab, source, beam_size, max_len=80, mode=WORD):
    """``(log_prob, text)`` list for one preprocessed source string."""
    ids = src_vocab.encode(symbols_of(source, mode))
    hyps = beam_search(model, ids, beam_size, max_len)
    out = []
    for h in hyps:
        syms = tgt_vocab.decode(h.token_ids)
        text = detokenize(syms) if mode == WORD else join_symbols(syms, mode)
        out.append((h.log_prob, text))
    return out


def nbest_for_mrs(tm: TemplateModel, mrs, beam_size=None, max_len=80):
    beam = beam_size or tm.beam_size
    return [nbest(tm.model, tm.src_vocab, tm.tgt_vocab, source_of(mr).source, beam, max_len) for mr in mrs]


def has_rating_and_location(mr):
    d = mr.as_dict()
    return bool(d.get("customerRating")) and bool(d.get("area"))


__all__ = ["TemplateModel", "encode_pairs", "has_rating_and_location", "nbest", "nbest_for_mrs",
           "source_of", "split_lexicon_inputs", "train_template_model"]

