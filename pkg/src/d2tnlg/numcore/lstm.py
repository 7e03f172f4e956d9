"""LSTM cell with a fused forward/backward.

Gate layout in the stacked weight matrices is (input, forget, candidate, output).
Internally the recurrent state travels as one packed array ``[h, c]`` of size
2H so a whole step is a single tape node.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import DimensionError, Tensor, _make, _sigmoid, as_tensor, concat, index, linear


@dataclass
class LstmCellParams:
    input_weights: Tensor  # [4H, D]
    recurrent_weights: Tensor  # [4H, H]
    bias: Tensor  # [4H]

    def __post_init__(self):
        four_h, _ = self.input_weights.shape
        if four_h % 4 or self.recurrent_weights.shape != (four_h, four_h // 4) \
                or self.bias.shape != (four_h,):
            raise DimensionError(
                f"inconsistent LSTM params: W_ih {self.input_weights.shape}, "
                f"W_hh {self.recurrent_weights.shape}, b {self.bias.shape}")

    @property
    def hidden_size(self):
        return self.recurrent_weights.shape[1]

    @property
    def input_size(self):
        return self.input_weights.shape[1]


def lstm_step(zx, hc_prev, w_hh, mask=None):
    """One recurrence step from the precomputed input projection.

    zx: [..., 4H] = x @ W_ih.T + b; hc_prev: [..., 2H]; w_hh: [4H, H].
    ``mask`` ([...], 0/1) keeps the previous state where it is 0 (padding).
    Returns the packed new state [..., 2H].
    """
    zx, hc_prev, w_hh = as_tensor(zx), as_tensor(hc_prev), as_tensor(w_hh)
    H = w_hh.shape[1]
    if zx.shape[-1] != 4 * H or hc_prev.shape[-1] != 2 * H:
        raise DimensionError(f"lstm_step shapes: zx {zx.shape}, state {hc_prev.shape}, W_hh {w_hh.shape}")
    h_prev = hc_prev.data[..., :H]
    c_prev = hc_prev.data[..., H:]
    z = zx.data + h_prev @ w_hh.data.T
    i = _sigmoid(z[..., :H])
    f = _sigmoid(z[..., H:2 * H])
    g = np.tanh(z[..., 2 * H:3 * H])
    o = _sigmoid(z[..., 3 * H:])
    c = f * c_prev + i * g
    tc = np.tanh(c)
    h = o * tc
    out = np.concatenate([h, c], axis=-1)
    m = None
    if mask is not None:
        m = np.asarray(mask, dtype=out.dtype)[..., None]
        out = m * out + (1.0 - m) * hc_prev.data

    def bw(gout):
        g_h = gout[..., :H]
        g_c = gout[..., H:]
        if m is not None:
            carry = (1.0 - m) * gout
            g_h = m * g_h
            g_c = m * g_c
        dc = g_c + g_h * o * (1.0 - tc * tc)
        do = g_h * tc
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dz = np.concatenate([
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ], axis=-1)
        dh_prev = dz @ w_hh.data
        dc_prev = dc * f
        dhc = np.concatenate([dh_prev, dc_prev], axis=-1)
        if m is not None:
            dhc = dhc + carry
        dz2 = dz.reshape(-1, 4 * H)
        dw = dz2.T @ h_prev.reshape(-1, H)
        return dz, dhc, dw

    return _make(out, (zx, hc_prev, w_hh), bw)


def lstm_cell(x, h_prev, c_prev, p: LstmCellParams):
    """Single LSTM step returning ``(h, c)``."""
    x, h_prev, c_prev = as_tensor(x), as_tensor(h_prev), as_tensor(c_prev)
    H = p.hidden_size
    if x.shape[-1] != p.input_size or h_prev.shape[-1] != H or c_prev.shape[-1] != H:
        raise DimensionError(
            f"lstm_cell: x {x.shape}, h {h_prev.shape}, c {c_prev.shape} "
            f"for D={p.input_size}, H={H}")
    zx = linear(x, p.input_weights, p.bias)
    hc = lstm_step(zx, concat([h_prev, c_prev]), p.recurrent_weights)
    return index(hc, (..., slice(0, H))), index(hc, (..., slice(H, 2 * H)))
