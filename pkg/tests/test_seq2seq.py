import itertools
import math

import numpy as np
import pytest

import oracles
from d2tnlg.corpus.vocab import BOS, EOS
from d2tnlg.prng import SeededPrng
from d2tnlg.numcore import ContractError, OptimizerState, backward, clip_global_norm, optimizer_step
from d2tnlg.seq2seq import (
    PRESETS,
    ModelConfig,
    Seq2Seq,
    TrainingSchedule,
    apply_overrides,
    attend,
    beam_search,
    beam_search_core,
    get_preset,
    greedy_decode,
    lr_trace,
    next_learning_rate,
    perplexity,
    train,
)

OUTPUT_LAYERS = ("context", "attentional")


def small_model(output_layer="attentional", seed=0, V_in=7, V_out=9, **kw):
    cfg = dict(embedding_dim=4, hidden_dim=5, dropout_p=0.0, output_layer=output_layer)
    cfg.update(kw)
    return Seq2Seq(ModelConfig(**cfg), V_in, V_out, rng=np.random.default_rng(seed))


# ------------------------------------------------------------------ encode

@pytest.mark.parametrize("bidi", [False, True])
def test_encode_length_one(bidi):
    m = small_model(bidirectional_encoder=bidi)
    H, finals = m.encode([4])
    assert H.shape == (1, 5)
    assert len(finals) == 1 and finals[0][0].shape == (5,)


def test_encode_deterministic():
    m = small_model(num_layers=2, bidirectional_encoder=True)
    a, fa = m.encode([4, 5, 6])
    b, fb = m.encode([4, 5, 6])
    assert np.array_equal(a, b)
    assert all(np.array_equal(x[0], y[0]) and np.array_equal(x[1], y[1]) for x, y in zip(fa, fb))


def test_encode_zero_params_zero_states():
    m = small_model()
    for name in m.params.names():
        m.params.value(name)[...] = 0.0
    H, finals = m.encode([4, 5, 6, 4])
    assert not H.any() and not finals[0][0].any() and not finals[0][1].any()


def test_encode_errors():
    m = small_model()
    with pytest.raises(IndexError):
        m.encode([7])
    with pytest.raises(ContractError):
        m.encode([])


def test_batched_encode_equals_single_with_padding():
    m = small_model(bidirectional_encoder=True, num_layers=2)
    seqs = [[4, 5, 6, 4], [5, 6]]
    from d2tnlg.seq2seq import pad_batch

    ids, mask = pad_batch(seqs)
    H_b, _ = m.encode_batch(ids, mask)
    for i, s in enumerate(seqs):
        H1, _ = m.encode(s)
        assert np.allclose(H_b.data[i, :len(s)], H1, atol=1e-12)


# ------------------------------------------------------------------ attend

def test_attend_single_state():
    rng = np.random.default_rng(0)
    h = rng.normal(size=(1, 3))
    ctx, alpha = attend(rng.normal(size=3), h, rng.normal(size=(3, 3)))
    assert alpha.data.tolist() == [1.0]
    assert np.array_equal(ctx.data, h[0])


def test_attend_zero_matrix_is_uniform():
    rng = np.random.default_rng(1)
    Hs = rng.normal(size=(4, 3))
    ctx, alpha = attend(rng.normal(size=3), Hs, np.zeros((3, 3)))
    assert np.allclose(alpha.data, 0.25, atol=1e-15)
    assert np.allclose(ctx.data, Hs.mean(axis=0), atol=1e-12)


def test_attend_matches_oracle():
    rng = np.random.default_rng(2)
    s, Hs, Wa = rng.normal(size=3), rng.normal(size=(5, 3)), rng.normal(size=(3, 3))
    ctx, alpha = attend(s, Hs, Wa)
    octx, oalpha = oracles.attend(s.tolist(), Hs.tolist(), Wa.tolist())
    assert abs(alpha.data.sum() - 1.0) <= 1e-12
    assert np.max(np.abs(alpha.data - oalpha)) <= 1e-12
    assert np.max(np.abs(ctx.data - octx)) <= 1e-12


def test_attend_empty_is_contract_error():
    with pytest.raises(ContractError):
        attend(np.zeros(3), np.zeros((0, 3)), np.zeros((3, 3)))


def test_attend_mask_ignores_padding():
    rng = np.random.default_rng(3)
    Hs = rng.normal(size=(1, 4, 3))
    s, Wa = rng.normal(size=(1, 3)), rng.normal(size=(3, 3))
    mask = np.array([[True, True, False, False]])
    ctx, alpha = attend(s, Hs, Wa, mask)
    ref, ref_alpha = attend(s[0], Hs[0, :2], Wa)
    assert np.array_equal(alpha.data[0, 2:], [0.0, 0.0])
    assert np.allclose(ctx.data[0], ref.data, atol=1e-12)


# ------------------------------------------------------------- decode_step

@pytest.mark.parametrize("output_layer", OUTPUT_LAYERS)
def test_micro_model_first_step_matches_oracle(output_layer):
    # V_out = 3, H = 2, E = 2; every weight set explicitly
    m = Seq2Seq(ModelConfig(embedding_dim=2, hidden_dim=2, dropout_p=0.0, output_layer=output_layer),
                6, 3, rng=np.random.default_rng(0))
    vals = np.random.default_rng(42)
    for name in m.params.names():
        v = m.params.value(name)
        v[...] = np.round(vals.uniform(-1, 1, size=v.shape), 2)
    src = [4, 5, 4]
    H_enc, finals = m.encode_batch(np.array([src]))
    probs, state, alpha = m.decode_step(m.initial_state(finals), H_enc)
    P = {name: m.params.value(name).tolist() for name in m.params.names()}
    o_probs, o_alpha = oracles.first_step_distribution(P, src, BOS, output_layer)
    assert probs.shape == (1, 3)
    assert abs(probs.sum() - 1.0) <= 1e-12
    assert np.max(np.abs(probs[0] - o_probs)) <= 1e-12
    assert np.max(np.abs(alpha[0] - o_alpha)) <= 1e-12


@pytest.mark.parametrize("output_layer", OUTPUT_LAYERS)
def test_decode_train_and_inference_agree_without_dropout(output_layer):
    m = small_model(output_layer)
    H_enc, finals = m.encode_batch(np.array([[4, 5, 6]]))
    rng = np.random.default_rng(0)
    p_inf, _, _ = m.decode_step(m.initial_state(finals), H_enc)
    p_tr, _, _ = m.decode_step(m.initial_state(finals), H_enc, training=True, rng=rng)
    assert np.array_equal(p_inf, p_tr)
    l1, _ = m.batch_nll([[4, 5, 6]], [[4, 6]], training=False)
    l2, _ = m.batch_nll([[4, 5, 6]], [[4, 6]], training=True, rng=rng)
    assert float(l1.data) == float(l2.data)


def test_dropout_changes_training_path_only():
    m = small_model(dropout_p=0.5)
    rng = np.random.default_rng(0)
    l_inf_a, _ = m.batch_nll([[4, 5]], [[4, 6, 7]])
    l_inf_b, _ = m.batch_nll([[4, 5]], [[4, 6, 7]])
    l_tr, _ = m.batch_nll([[4, 5]], [[4, 6, 7]], training=True, rng=rng)
    assert float(l_inf_a.data) == float(l_inf_b.data)
    assert float(l_tr.data) != float(l_inf_a.data)


@pytest.mark.parametrize("kw", [dict(), dict(num_layers=2), dict(bidirectional_encoder=True, num_layers=2),
                                dict(output_layer="context")])
def test_step_distributions_sum_to_one(kw):
    m = small_model(**kw)
    H_enc, finals = m.encode_batch(np.array([[4, 5, 6], [6, 5, 4]]))
    state = m.initial_state(finals)
    for tok in ([4, 5], [6, 6], [EOS, 4]):
        state.prev_token = np.array(tok)
        probs, state, _ = m.decode_step(state, H_enc)
        assert np.max(np.abs(probs.sum(axis=1) - 1.0)) <= 1e-12


def test_initial_state_matches_encoder_final():
    m = small_model(num_layers=2)
    H_enc, finals = m.encode_batch(np.array([[4, 5]]))
    st = m.initial_state(finals)
    assert not st.context.data.any()
    assert st.prev_token.tolist() == [BOS]
    for k in range(2):
        assert np.array_equal(st.hidden(k), finals[k].data[:, :5])


# ------------------------------------------------------------ loss / ppl

@pytest.mark.parametrize("output_layer", OUTPUT_LAYERS)
def test_loss_of_eos_only_reference_is_first_step_cross_entropy(output_layer):
    m = small_model(output_layer)
    H_enc, finals = m.encode_batch(np.array([[4, 5, 6]]))
    probs, _, _ = m.decode_step(m.initial_state(finals), H_enc)
    loss = m.teacher_forced_loss([4, 5, 6], [BOS, EOS])
    assert abs(float(loss.data) + math.log(probs[0, EOS])) < 1e-12


def test_teacher_forced_loss_rejects_unwrapped():
    m = small_model()
    with pytest.raises(ContractError):
        m.teacher_forced_loss([4], [4, 5])
    with pytest.raises(ContractError):
        m.teacher_forced_loss([4], [])


@pytest.mark.parametrize("output_layer", OUTPUT_LAYERS)
def test_uniform_model_loss_and_perplexity(output_layer):
    m = small_model(output_layer)
    m.params.value("out.w")[...] = 0.0
    loss = m.teacher_forced_loss([4, 5], [BOS, 4, 6, 7, EOS])
    assert abs(float(loss.data) - math.log(9)) < 1e-12
    ppl = perplexity(m, [([4, 5], [4, 6]), ([6], [7, 7, 8])])
    assert abs(ppl - 9) < 1e-6


def test_perplexity_at_least_one():
    m = small_model()
    assert perplexity(m, [([4, 5], [6]), ([5], [4, 4])]) >= 1.0


def test_loss_decreases_over_first_steps_on_one_pair():
    m = small_model(embedding_dim=8, hidden_dim=16)
    state = OptimizerState("adam", 0.01)
    prev = None
    for _ in range(50):
        m.params.zero_gradients()
        loss = m.teacher_forced_loss([4, 5, 6], [BOS, 4, 7, 8, EOS])
        backward(loss)
        clip_global_norm(m.params, 5.0)
        optimizer_step(m.params, state)
        v = float(loss.data)
        if prev is not None:
            assert v <= prev * 1.05
        prev = v


def test_overfit_single_pair_500_steps():
    m = small_model(embedding_dim=8, hidden_dim=16)
    state = OptimizerState("adam", 0.01)
    ref = [BOS, 4, 7, 8, 5, EOS]
    for _ in range(500):
        m.params.zero_gradients()
        loss = m.teacher_forced_loss([4, 5, 6], ref)
        backward(loss)
        clip_global_norm(m.params, 5.0)
        optimizer_step(m.params, state)
    assert float(m.teacher_forced_loss([4, 5, 6], ref).data) < 0.01
    assert perplexity(m, [([4, 5, 6], ref[1:-1])]) < 1.01
    tokens, _ = greedy_decode(m, [4, 5, 6], 10)
    assert tokens == ref[1:]


# ------------------------------------------------------------------ train

def _tiny_schedule(**kw):
    base = dict(optimizer="adam", learning_rate=0.01, max_epochs=3, lr_halve_from_epoch=100,
                clip_max_norm=5.0, batch_size=2)
    base.update(kw)
    return TrainingSchedule(**base)


def test_train_memorizes_one_example():
    cfg = ModelConfig(embedding_dim=8, hidden_dim=16, dropout_p=0.0)
    pair = ([4, 5, 6], [7, 8, 4])
    res = train([pair], [pair], 7, 9, cfg, _tiny_schedule(learning_rate=0.02, max_epochs=300, batch_size=1), seed=5)
    tokens, _ = greedy_decode(res.model, pair[0], 10)
    assert tokens == pair[1] + [EOS]
    assert res.best_perplexity < 1.01


def test_train_is_deterministic():
    cfg = ModelConfig(embedding_dim=4, hidden_dim=6, dropout_p=0.3)
    data = [([4, 5], [6, 7]), ([5, 6, 4], [7]), ([6], [8, 8, 7]), ([4], [6])]
    a = train(data, data[:2], 7, 9, cfg, _tiny_schedule(), seed=11)
    b = train(data, data[:2], 7, 9, cfg, _tiny_schedule(), seed=11)
    c = train(data, data[:2], 7, 9, cfg, _tiny_schedule(), seed=12)
    assert [r.train_loss for r in a.log] == [r.train_loss for r in b.log]
    assert a.best_epoch == b.best_epoch
    for name in a.model.params.names():
        assert np.array_equal(a.model.params.value(name), b.model.params.value(name))
    assert [r.train_loss for r in a.log] != [r.train_loss for r in c.log]


def test_train_selects_lowest_dev_perplexity():
    cfg = ModelConfig(embedding_dim=4, hidden_dim=6, dropout_p=0.3)
    data = [([4, 5], [6, 7]), ([5, 6, 4], [7]), ([6], [8, 8, 7])]
    res = train(data, data, 7, 9, cfg, _tiny_schedule(max_epochs=5), seed=3)
    best = min(res.log, key=lambda r: r.dev_perplexity)
    assert res.best_epoch == best.epoch
    assert abs(perplexity(res.model, data) - best.dev_perplexity) < 1e-9


def test_loss_normalization_scales_the_sgd_step():
    cfg = ModelConfig(embedding_dim=4, hidden_dim=6, dropout_p=0.0)
    data = [([4, 5], [6, 7, 8]), ([5, 6, 4], [7, 6, 6, 8, 7])]  # 2 pairs, 10 scored tokens with EOS
    init = Seq2Seq(cfg, 7, 9, rng=SeededPrng(1).stream("init")).params.snapshot()
    step = {}
    for norm in ("sents", "tokens"):
        sched = _tiny_schedule(optimizer="sgd", learning_rate=0.1, max_epochs=1, clip_max_norm=1e9,
                               batch_size=2, loss_normalization=norm)
        res = train(data, data, 7, 9, cfg, sched, seed=1)
        step[norm] = np.concatenate([(res.model.params.value(k) - init[k]).ravel() for k in init])
    assert np.allclose(step["sents"], 5.0 * step["tokens"], rtol=1e-9, atol=1e-15)
    with pytest.raises(ValueError):
        _tiny_schedule(loss_normalization="words")


def test_train_rejects_empty():
    cfg = ModelConfig(embedding_dim=4, hidden_dim=6)
    with pytest.raises(ValueError):
        train([], [([4], [5])], 7, 9, cfg, _tiny_schedule(), seed=0)


def test_lr_trace_no_improvement_halves_every_epoch():
    lrs = lr_trace(1.0, [7.0] * 13, halve_from=8, baseline=7.0)
    assert lrs == [0.5 ** k for k in range(13)]


def test_lr_trace_always_improving_halves_from_epoch_eight():
    lrs = lr_trace(1.0, [10.0 - k * 0.5 for k in range(13)], halve_from=8)
    assert lrs[:8] == [1.0] * 8
    assert lrs[8:] == [0.5 ** k for k in range(1, 6)]


def test_next_learning_rate_rule():
    assert next_learning_rate(1.0, 3, True, 8) == 1.0
    assert next_learning_rate(1.0, 3, False, 8) == 0.5
    assert next_learning_rate(1.0, 8, True, 8) == 0.5


# ---------------------------------------------------------------- presets

def test_presets_resolve_paper_settings():
    e2e = get_preset("e2e-word")
    assert e2e.schedule.optimizer == "sgd" and e2e.schedule.learning_rate == 1.0
    assert (e2e.model.embedding_dim, e2e.model.hidden_dim, e2e.model.num_layers) == (64, 64, 1)
    assert e2e.beam_size == 15
    for key in ("e2e-char", "webnlg-char"):
        p = get_preset(key)
        assert p.model.bidirectional_encoder and p.beam_size == 5 and p.model.hidden_dim == 500
    t1 = get_preset("template-t1")
    assert t1.schedule.max_epochs == 25 and t1.beam_size == 30 and t1.schedule.clip_max_norm == 2.0
    assert (t1.model.embedding_dim, t1.schedule.batch_size, t1.model.dropout_p) == (28, 4, 0.4)
    t12 = get_preset("template-t1t2")
    assert t12.model.bidirectional_encoder and t12.schedule.batch_size == 16
    assert set(PRESETS) == {"e2e-word", "e2e-char", "webnlg-word", "webnlg-char",
                            "template-t1", "template-t2", "template-t1t2"}
    for p in PRESETS.values():
        assert p.schedule.lr_halve_from_epoch == 8


def test_overrides_and_unknown_keys():
    p = apply_overrides(get_preset("template-t1"), {"hidden_dim": "16", "beam_size": "3",
                                                    "learning_rate": "0.5", "bidirectional_encoder": "yes"})
    assert p.model.hidden_dim == 16 and p.beam_size == 3
    assert p.schedule.learning_rate == 0.5 and p.model.bidirectional_encoder
    with pytest.raises(KeyError):
        apply_overrides(p, {"nope": 1})
    with pytest.raises(KeyError):
        get_preset("t5")


def test_config_validation():
    with pytest.raises(ValueError):
        ModelConfig(num_layers=3)
    with pytest.raises(ValueError):
        ModelConfig(dropout_p=1.0)
    with pytest.raises(ValueError):
        ModelConfig(output_layer="mlp")


# ------------------------------------------------------------ beam search

class _PrefixState:
    """Toy decoder state: the prefix of each live hypothesis."""

    def __init__(self, prefixes):
        self.prefixes = prefixes

    def select(self, rows):
        return _PrefixState([self.prefixes[r] for r in rows])


def _toy_logp(prefix, V=3):
    rng = np.random.default_rng(abs(hash(("toy",) + prefix)) % (2 ** 32))
    return np.log(rng.dirichlet(np.ones(V)))


def _toy_step(state, tokens):
    new = [p + (int(t),) for p, t in zip(state.prefixes, tokens)]
    return np.stack([_toy_logp(p) for p in new]), _PrefixState(new)


def _exhaustive(max_len, bos=3, eos=0, V=3):
    """Every sequence the search can return, with its exact log-probability."""
    out = []
    for n in range(1, max_len + 1):
        for seq in itertools.product(range(V), repeat=n):
            if eos in seq[:-1]:
                continue
            if n < max_len and seq[-1] != eos:
                continue
            lp, prefix = 0.0, (bos,)
            for tok in seq:
                lp += _toy_logp(prefix)[tok]
                prefix = prefix + (tok,)
            out.append((lp, seq))
    out.sort(key=lambda x: -x[0])
    return out


@pytest.mark.parametrize("max_len", [1, 2, 3, 4])
def test_beam_equals_exhaustive_enumeration_when_wide(max_len):
    truth = _exhaustive(max_len)
    hyps = beam_search_core(_toy_step, _PrefixState([()]), len(truth), max_len, bos=3, eos=0)
    assert [h.token_ids for h in hyps] == [s for _, s in truth]
    assert np.allclose([h.log_prob for h in hyps], [lp for lp, _ in truth], atol=1e-12)


@pytest.mark.parametrize("beam", [1, 2, 3, 5, 8])
def test_beam_scores_are_exact_and_sorted(beam):
    max_len = 5
    hyps = beam_search_core(_toy_step, _PrefixState([()]), beam, max_len, bos=3, eos=0)
    assert 1 <= len(hyps) <= beam
    lps = [h.log_prob for h in hyps]
    assert all(a >= b for a, b in zip(lps, lps[1:]))
    for h in hyps:
        lp, prefix = 0.0, (3,)
        for tok in h.token_ids:
            lp += _toy_logp(prefix)[tok]
            prefix += (tok,)
        assert abs(lp - h.log_prob) < 1e-12
        assert h.finished == (h.token_ids[-1] == 0)
        assert 0 not in h.token_ids[:-1]


def test_beam_one_equals_greedy_on_model():
    m = small_model(seed=4)
    for src in ([4, 5, 6], [6], [5, 5, 4, 6]):
        h = beam_search(m, src, 1, 12)[0]
        g, lp = greedy_decode(m, src, 12)
        assert list(h.token_ids) == g
        assert abs(h.log_prob - lp) < 1e-9


def test_beam_search_log_probs_non_increasing_on_model():
    m = small_model(seed=5, bidirectional_encoder=True)
    hyps = beam_search(m, [4, 5, 6], 6, 10)
    lps = [h.log_prob for h in hyps]
    assert all(a >= b for a, b in zip(lps, lps[1:]))
    assert len({h.token_ids for h in hyps}) == len(hyps)


def test_beam_ties_break_on_lower_token():
    def step(state, tokens):
        return np.log(np.full((len(tokens), 3), 1 / 3)), state

    class S:
        def select(self, rows):
            return self

    hyps = beam_search_core(step, S(), 2, 1, bos=3, eos=0)
    assert [h.token_ids for h in hyps] == [(0,), (1,)]


def test_beam_rejects_bad_sizes():
    with pytest.raises(ValueError):
        beam_search_core(_toy_step, _PrefixState([()]), 0, 3)
