"""Beam search over accumulated log-probabilities (no length normalisation)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..corpus.vocab import BOS, EOS
from ..numcore import no_grad


@dataclass
class Hypothesis:
    token_ids: tuple
    log_prob: float
    finished: bool
    decoder_state: object = field(default=None, repr=False, compare=False)
    finish_step: int = -1


def beam_search_core(step_fn, init_state, beam_size, max_len, bos=BOS, eos=EOS):
    """Generic beam search.

    ``step_fn(state, tokens)`` receives a batched state for the live hypotheses
    plus their last tokens and returns ``(log_probs [k, V], new_state)``;
    ``new_state.select(rows)`` must pick sub-batches. Each step expands every
    live hypothesis over the whole vocabulary and keeps the best
    ``beam_size - len(finished)`` candidates; candidates ending in EOS retire.
    Ties go to the lower token id, then the earlier parent.
    """
    if beam_size < 1 or max_len < 1:
        raise ValueError("beam_size and max_len must be >= 1")
    live_tokens = [()]
    live_scores = np.zeros(1)
    last = np.array([bos], dtype=np.int64)
    state = init_state
    finished: list[Hypothesis] = []
    for step in range(max_len):
        logp, new_state = step_fn(state, last)
        k, V = logp.shape
        cand = (live_scores[:, None] + logp).reshape(-1)
        width = beam_size - len(finished)
        tok = np.tile(np.arange(V), k)
        parent = np.repeat(np.arange(k), V)
        order = np.lexsort((parent, tok, -cand))[:width]
        keep_rows, keep_tokens, keep_scores, keep_seqs = [], [], [], []
        for j in order:
            seq = live_tokens[parent[j]] + (int(tok[j]),)
            if tok[j] == eos:
                finished.append(Hypothesis(seq, float(cand[j]), True, None, step))
            else:
                keep_rows.append(parent[j])
                keep_tokens.append(tok[j])
                keep_scores.append(cand[j])
                keep_seqs.append(seq)
        if not keep_rows or len(finished) >= beam_size:
            live_tokens = []
            break
        state = new_state.select(keep_rows)
        last = np.array(keep_tokens, dtype=np.int64)
        live_scores = np.array(keep_scores)
        live_tokens = keep_seqs
    pool = list(finished)
    if live_tokens:
        for i, (seq, sc) in enumerate(zip(live_tokens, live_scores)):
            pool.append(Hypothesis(seq, float(sc), False, state.select([i]), max_len))
    # stable: equal scores keep retirement order (earlier finish first)
    pool.sort(key=lambda h: -h.log_prob)
    return pool[:beam_size]


def beam_search(model, input_ids, beam_size, max_len):
    """Decode one input with ``model`` (a :class:`Seq2Seq`)."""
    ids = np.asarray(input_ids, dtype=np.int64)[None, :]
    with no_grad():
        H_enc, finals = model.encode_batch(ids)
    H1 = H_enc.data

    def step(state, tokens):
        k = len(tokens)
        return model.step_log_probs(state, tokens, np.repeat(H1, k, axis=0))

    return beam_search_core(step, model.initial_state(finals), beam_size, max_len)


def greedy_decode(model, input_ids, max_len):
    """Argmax decoding, written independently of the beam machinery."""
    ids = np.asarray(input_ids, dtype=np.int64)[None, :]
    with no_grad():
        H_enc, finals = model.encode_batch(ids)
    state = model.initial_state(finals)
    tok = BOS
    out, total = [], 0.0
    for _ in range(max_len):
        logp, state = model.step_log_probs(state, [tok], H_enc.data)
        tok = int(np.argmax(logp[0]))
        total += float(logp[0, tok])
        out.append(tok)
        if tok == EOS:
            break
    return out, total
