"""Attentional LSTM encoder-decoder.

The decoder follows the input-feeding recurrence: the first decoder layer
consumes ``[embed(y_{t-1}); c_{t-1}]``. Attention uses general (bilinear)
scoring against the top decoder state ``s_t`` and yields a context ``a_t``.

Two output layers are available. ``"context"`` predicts directly from the
context, ``softmax(W_out a_t + b)``. ``"attentional"`` (the default) first
mixes context and state, ``c_t = tanh(W_c [a_t; s_t])``, and predicts from
``c_t``. The vector the prediction is made from is what gets fed back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus.vocab import BOS, EOS, PAD
from ..numcore import (
    ContractError,
    DimensionError,
    LstmCellParams,
    ParameterStore,
    Tensor,
    as_tensor,
    concat,
    einsum,
    index,
    linear,
    lstm_step,
    matmul,
    mul,
    nll_sum,
    no_grad,
    softmax,
    stack,
    take_rows,
    tanh,
)
from ..numcore.tensor import log_softmax_np
from .config import INIT_RANGE, ModelConfig


@dataclass
class DecoderState:
    """Packed ``[h, c]`` per decoder layer, previous context and previous token(s)."""

    layers: list
    context: Tensor
    prev_token: np.ndarray

    def hidden(self, layer=-1):
        H = self.context.shape[-1]
        return self.layers[layer].data[..., :H]

    def cell(self, layer=-1):
        H = self.context.shape[-1]
        return self.layers[layer].data[..., H:]

    def select(self, rows):
        """Sub-batch of a batched state (used to reorder beams)."""
        rows = np.asarray(rows)
        return DecoderState([Tensor(hc.data[rows]) for hc in self.layers],
                            Tensor(self.context.data[rows]), self.prev_token[rows])


def attend(s_t, H_enc, W_a, mask=None):
    """General attention: ``alpha_i = softmax_i(s_t W_a h_i)``, ``c_t = sum_i alpha_i h_i``.

    Accepts unbatched ``s_t [H]`` / ``H_enc [n, H]`` or batched ``[B, H]`` /
    ``[B, n, H]``. ``mask`` marks real (non-padding) encoder positions.
    """
    s_t, H_enc, W_a = as_tensor(s_t), as_tensor(H_enc), as_tensor(W_a)
    if H_enc.data.ndim < 2 or H_enc.shape[-2] == 0:
        raise ContractError("attend: no encoder states")
    if s_t.shape[-1] != W_a.shape[0] or H_enc.shape[-1] != W_a.shape[1]:
        raise DimensionError(f"attend: s_t {s_t.shape}, H_enc {H_enc.shape}, W_a {W_a.shape}")
    u = matmul(s_t, W_a)
    if H_enc.data.ndim == 2:
        scores = einsum("nh,h->n", H_enc, u)
        alpha = softmax(scores, mask)
        return einsum("n,nh->h", alpha, H_enc), alpha
    scores = einsum("bnh,bh->bn", H_enc, u)
    alpha = softmax(scores, mask)
    return einsum("bn,bnh->bh", alpha, H_enc), alpha


def pad_batch(seqs, pad=PAD):
    n = max(len(s) for s in seqs)
    ids = np.full((len(seqs), n), pad, dtype=np.int64)
    mask = np.zeros((len(seqs), n), dtype=bool)
    for i, s in enumerate(seqs):
        ids[i, :len(s)] = s
        mask[i, :len(s)] = True
    return ids, mask


class Seq2Seq:
    """Parameters plus forward computations of the encoder-decoder."""

    def __init__(self, config: ModelConfig, src_vocab_size: int, tgt_vocab_size: int,
                 rng: np.random.Generator | None = None, store: ParameterStore | None = None):
        self.config = config
        self.src_vocab_size = src_vocab_size
        self.tgt_vocab_size = tgt_vocab_size
        if store is None:
            store = self._init_store(rng if rng is not None else np.random.default_rng(0))
        self.params = store
        self._check_shapes()

    # ------------------------------------------------------------ parameters
    def parameter_shapes(self):
        c = self.config
        E, H, L = c.embedding_dim, c.hidden_dim, c.num_layers
        shapes = {"enc.embed": (self.src_vocab_size, E), "dec.embed": (self.tgt_vocab_size, E)}
        dirs = ("fwd", "bwd") if c.bidirectional_encoder else ("fwd",)
        for k in range(L):
            d_in = E if k == 0 else H * len(dirs)
            for d in dirs:
                shapes[f"enc.l{k}.{d}.w_ih"] = (4 * H, d_in)
                shapes[f"enc.l{k}.{d}.w_hh"] = (4 * H, H)
                shapes[f"enc.l{k}.{d}.b"] = (4 * H,)
            if c.bidirectional_encoder:
                for part in ("h", "c"):
                    shapes[f"enc.l{k}.bridge_{part}.w"] = (H, 2 * H)
                    shapes[f"enc.l{k}.bridge_{part}.b"] = (H,)
        for k in range(L):
            shapes[f"dec.l{k}.w_ih"] = (4 * H, E + H if k == 0 else H)
            shapes[f"dec.l{k}.w_hh"] = (4 * H, H)
            shapes[f"dec.l{k}.b"] = (4 * H,)
        shapes["attn.w"] = (H, H)
        if c.output_layer == "attentional":
            shapes["attn.combine.w"] = (H, 2 * H)
        shapes["out.w"] = (self.tgt_vocab_size, H)
        shapes["out.b"] = (self.tgt_vocab_size,)
        return shapes

    def _init_store(self, rng):
        store = ParameterStore()
        for name, shape in self.parameter_shapes().items():
            if name.endswith(".b"):
                store.add(name, np.zeros(shape))
            else:
                store.add(name, rng.uniform(-INIT_RANGE, INIT_RANGE, size=shape))
        return store

    def _check_shapes(self):
        expected = self.parameter_shapes()
        if set(expected) != set(self.params.names()):
            missing = set(expected) ^ set(self.params.names())
            raise DimensionError(f"parameter set mismatch: {sorted(missing)}")
        for name, shape in expected.items():
            if self.params[name].shape != tuple(shape):
                raise DimensionError(f"{name}: shape {self.params[name].shape}, expected {shape}")

    def cell(self, prefix) -> LstmCellParams:
        p = self.params
        return LstmCellParams(p[f"{prefix}.w_ih"], p[f"{prefix}.w_hh"], p[f"{prefix}.b"])

    # ---------------------------------------------------------------- encoder
    def _run_direction(self, x_seq, mask, prefix, reverse):
        p = self.params
        B, n = mask.shape
        H = self.config.hidden_dim
        zx = linear(x_seq, p[f"{prefix}.w_ih"], p[f"{prefix}.b"])
        w_hh = p[f"{prefix}.w_hh"]
        hc = Tensor(np.zeros((B, 2 * H)))
        outs = [None] * n
        full = mask.all(axis=0)
        for t in (range(n - 1, -1, -1) if reverse else range(n)):
            hc = lstm_step(index(zx, (slice(None), t)), hc, w_hh, None if full[t] else mask[:, t])
            outs[t] = hc
        seq = stack(outs, axis=1)
        return index(seq, (..., slice(0, H))), hc

    def encode_batch(self, src_ids, src_mask=None):
        """Encode a padded batch ``[B, n]``.

        Returns ``(H_enc [B, n, H], finals)`` where ``finals`` holds one packed
        ``[h, c]`` state per layer, used to initialise the decoder layers.
        """
        src_ids = np.asarray(src_ids, dtype=np.int64)
        if src_ids.ndim != 2 or src_ids.shape[1] == 0:
            raise ContractError("encode: need a non-empty [B, n] id array")
        if src_mask is None:
            src_mask = np.ones(src_ids.shape, dtype=bool)
        c, p = self.config, self.params
        H = c.hidden_dim
        x = take_rows(p["enc.embed"], src_ids)
        finals = []
        for k in range(c.num_layers):
            hf_seq, f_final = self._run_direction(x, src_mask, f"enc.l{k}.fwd", reverse=False)
            if not c.bidirectional_encoder:
                finals.append(f_final)
                x = hf_seq
                continue
            hb_seq, b_final = self._run_direction(x, src_mask, f"enc.l{k}.bwd", reverse=True)
            bh, bc = f"enc.l{k}.bridge_h", f"enc.l{k}.bridge_c"
            h0 = linear(concat([index(f_final, (..., slice(0, H))), index(b_final, (..., slice(0, H)))]),
                        p[bh + ".w"], p[bh + ".b"])
            c0 = linear(concat([index(f_final, (..., slice(H, 2 * H))), index(b_final, (..., slice(H, 2 * H)))]),
                        p[bc + ".w"], p[bc + ".b"])
            finals.append(concat([h0, c0]))
            x = concat([hf_seq, hb_seq])
        if c.bidirectional_encoder:
            top = f"enc.l{c.num_layers - 1}.bridge_h"
            x = linear(x, p[top + ".w"], p[top + ".b"])
        return x, finals

    def encode(self, input_ids):
        """Encode one sequence: returns ``(H [n, H] array, [(h, c) per layer])``."""
        ids = np.asarray(input_ids, dtype=np.int64)
        if ids.ndim != 1 or ids.size == 0:
            raise ContractError("encode: need a non-empty id sequence")
        if ids.min() < 0 or ids.max() >= self.src_vocab_size:
            raise IndexError(f"input id out of range for vocabulary of {self.src_vocab_size}")
        with no_grad():
            H_enc, finals = self.encode_batch(ids[None, :])
        H = self.config.hidden_dim
        return H_enc.data[0], [(f.data[0, :H], f.data[0, H:]) for f in finals]

    # ---------------------------------------------------------------- decoder
    def initial_state(self, finals, batch=None):
        B = finals[0].shape[0]
        H = self.config.hidden_dim
        return DecoderState(list(finals), Tensor(np.zeros((B, H))), np.full(B, BOS, dtype=np.int64))

    def _step(self, layers, ctx_prev, y_emb, H_enc, mask, drop_mask=None):
        p = self.params
        H = self.config.hidden_dim
        inp = concat([y_emb, ctx_prev])
        new_layers = []
        for k in range(self.config.num_layers):
            zx = linear(inp, p[f"dec.l{k}.w_ih"], p[f"dec.l{k}.b"])
            hc = lstm_step(zx, layers[k], p[f"dec.l{k}.w_hh"])
            new_layers.append(hc)
            inp = index(hc, (..., slice(0, H)))
        ctx, alpha = attend(inp, H_enc, p["attn.w"], mask)
        if self.config.output_layer == "attentional":
            ctx = tanh(linear(concat([ctx, inp]), p["attn.combine.w"]))
        if drop_mask is not None:
            ctx = mul(ctx, drop_mask)
        return ctx, new_layers, alpha

    def _dropout_mask(self, shape, rng):
        p = self.config.dropout_p
        if rng is None or p == 0.0:
            return None
        return (rng.random(shape) >= p) / (1.0 - p)

    def decode_step(self, state: DecoderState, H_enc, src_mask=None, training=False, rng=None):
        """Advance a batched state by one token.

        Returns ``(probs [B, V], new_state, alpha [B, n])``. ``state.prev_token``
        holds the tokens to feed. Dropout on the context applies only when
        ``training`` and an ``rng`` are given.
        """
        H_enc = as_tensor(H_enc)
        y_emb = take_rows(self.params["dec.embed"], state.prev_token)
        drop = self._dropout_mask(state.context.shape, rng) if training else None
        ctx, layers, alpha = self._step(state.layers, state.context, y_emb, H_enc, src_mask, drop)
        logits = linear(ctx, self.params["out.w"], self.params["out.b"])
        probs = np.exp(log_softmax_np(logits.data))
        return probs, DecoderState(layers, ctx, state.prev_token), alpha.data

    def step_log_probs(self, state: DecoderState, tokens, H_enc, src_mask=None):
        """Inference helper: feed ``tokens`` and return ``(log_probs, new_state)``."""
        with no_grad():
            state = DecoderState(state.layers, state.context, np.asarray(tokens, dtype=np.int64))
            y_emb = take_rows(self.params["dec.embed"], state.prev_token)
            ctx, layers, _ = self._step(state.layers, state.context, y_emb, H_enc, src_mask)
            logits = linear(ctx, self.params["out.w"], self.params["out.b"])
        return log_softmax_np(logits.data), DecoderState(layers, ctx, state.prev_token)

    # ------------------------------------------------------------------- loss
    def batch_nll(self, src_seqs, tgt_seqs, training=False, rng=None):
        """Summed token NLL and token count for a batch of (unwrapped) pairs.

        Targets are fed with teacher forcing as ``BOS y1..ym`` and scored
        against ``y1..ym EOS``; padding is masked out.
        """
        if any(len(s) == 0 for s in src_seqs):
            raise ContractError("empty input sequence")
        src_ids, src_mask = pad_batch(src_seqs)
        tgt_in, tgt_mask = pad_batch([[BOS] + list(t) for t in tgt_seqs])
        tgt_out, _ = pad_batch([list(t) + [EOS] for t in tgt_seqs])
        H_enc, finals = self.encode_batch(src_ids, src_mask)
        attn_mask = None if src_mask.all() else src_mask
        B, T = tgt_in.shape
        emb = take_rows(self.params["dec.embed"], tgt_in)
        layers = list(finals)
        ctx = Tensor(np.zeros((B, self.config.hidden_dim)))
        ctxs = []
        for t in range(T):
            drop = self._dropout_mask(ctx.shape, rng) if training else None
            ctx, layers, _ = self._step(layers, ctx, index(emb, (slice(None), t)), H_enc, attn_mask, drop)
            ctxs.append(ctx)
        logits = linear(stack(ctxs, axis=1), self.params["out.w"], self.params["out.b"])
        loss = nll_sum(logits, tgt_out, tgt_mask.astype(float))
        return loss, int(tgt_mask.sum())

    def teacher_forced_loss(self, input_ids, reference_ids, training=False, rng=None):
        """Mean token cross-entropy of one pair.

        ``reference_ids`` is wrapped as ``BOS ... EOS``; ``[BOS, EOS]`` scores
        only the EOS prediction.
        """
        ref = list(reference_ids)
        if len(ref) < 2 or ref[0] != BOS or ref[-1] != EOS:
            raise ContractError("teacher_forced_loss: reference must be BOS ... EOS")
        loss, n = self.batch_nll([list(input_ids)], [ref[1:-1]], training, rng)
        return mul(loss, 1.0 / n)
