"""
Autodiff and the LSTM cell
==========================

Build a tiny graph, get gradients, and check them against finite
differences. Then run one LSTM step by hand.
"""

import numpy as np

from d2tnlg.numcore import (LstmCellParams, ParameterStore, Tensor, backward, cross_entropy,
                            linear, lstm_cell, no_grad, softmax, tanh)

rng = np.random.default_rng(0)

# a two-layer net, loss = cross entropy of class 1
store = ParameterStore()
store.add("w1", rng.normal(size=(4, 3)))
store.add("w2", rng.normal(size=(3, 4)))
x = rng.normal(size=3)


def loss():
    return cross_entropy(linear(tanh(linear(Tensor(x), store["w1"])), store["w2"]), 1)


backward(loss())
print("loss", float(loss().data))
print("dL/dw2\n", store.gradient("w2").round(4))

# central differences on one entry
w = store.value("w1")
w[2, 1] += 1e-5
with no_grad():
    up = float(loss().data)
w[2, 1] -= 2e-5
with no_grad():
    down = float(loss().data)
w[2, 1] += 1e-5
print("analytic", store.gradient("w1")[2, 1], "numeric", (up - down) / 2e-5)

# softmax is shift invariant and safe for big logits
print(softmax(Tensor([1000.0, 0.0])).data, softmax(Tensor([3.0, 3.0, 3.0])).data)

# one LSTM step, gates in the order i, f, g, o
H, D = 3, 2
p = LstmCellParams(rng.uniform(-0.1, 0.1, (4 * H, D)), rng.uniform(-0.1, 0.1, (4 * H, H)), np.zeros(4 * H))
h, c = lstm_cell(np.ones(D), np.zeros(H), np.zeros(H), p)
print("h", h.data.round(5), "c", c.data.round(5))
