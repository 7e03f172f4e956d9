import pytest

from d2tnlg.experiment import (
    has_rating_and_location,
    nbest_for_mrs,
    source_of,
    split_lexicon_inputs,
    train_template_model,
)
from d2tnlg.templates import lexicon_product

TINY = {"embedding_dim": 6, "hidden_dim": 6, "max_epochs": 1}


def test_split_is_disjoint_seeded_and_filtered():
    tr, dv, te = split_lexicon_inputs(40, 10, 5, seed=4, test_filter=has_rating_and_location)
    assert (len(tr), len(dv), len(te)) == (40, 10, 5)
    keys = [m.slots for m in tr + dv + te]
    assert len(set(keys)) == len(keys)
    assert all(has_rating_and_location(m) for m in te)
    assert split_lexicon_inputs(40, 10, 5, seed=4, test_filter=has_rating_and_location) == (tr, dv, te)
    assert split_lexicon_inputs(40, 10, 5, seed=5)[0] != tr


def test_split_too_large():
    n = sum(1 for _ in lexicon_product())
    with pytest.raises(ValueError):
        split_lexicon_inputs(n, 1, 1, seed=0)


def test_train_and_decode_smoke():
    tr, dv, te = split_lexicon_inputs(12, 3, 2, seed=1)
    tm = train_template_model(tr, dv, "t1", "template-t1", seed=1, overrides=TINY)
    assert tm.beam_size == 30 and len(tm.result.log) == 1
    blocks = nbest_for_mrs(tm, te, beam_size=3, max_len=10)
    assert len(blocks) == 2
    for block in blocks:
        assert 1 <= len(block) <= 3
        scores = [lp for lp, _ in block]
        assert scores == sorted(scores, reverse=True)


def test_source_is_delexicalised():
    mr = next(iter(lexicon_product()))
    assert source_of(mr).source == "name [ NAME ] , eattype [ restaurant ]"
