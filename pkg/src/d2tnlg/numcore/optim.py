"""Parameter storage, SGD/Adam updates and global-norm clipping."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .tensor import DTYPE, ContractError, DimensionError, Tensor


class ParameterStore:
    """Ordered map ``name -> Tensor`` of trainable leaves.

    Gradients live on the tensors themselves (``tensor.grad``) and always have
    the value's shape once :meth:`zero_gradients` has run.
    """

    def __init__(self):
        self._params: dict[str, Tensor] = {}

    def add(self, name, value):
        if name in self._params:
            raise KeyError(f"duplicate parameter {name!r}")
        t = Tensor(np.array(value, dtype=DTYPE), requires_grad=True)
        t.zero_grad()
        self._params[name] = t
        return t

    def __getitem__(self, name) -> Tensor:
        return self._params[name]

    def __contains__(self, name):
        return name in self._params

    def __iter__(self):
        return iter(self._params)

    def __len__(self):
        return len(self._params)

    def items(self):
        return self._params.items()

    def names(self):
        return list(self._params)

    def value(self, name):
        return self._params[name].data

    def gradient(self, name):
        t = self._params[name]
        if t.grad is None:
            t.zero_grad()
        return t.grad

    def zero_gradients(self):
        for t in self._params.values():
            if t.grad is None:
                t.zero_grad()
            else:
                t.grad[...] = 0.0

    def num_parameters(self):
        return int(sum(t.size for t in self._params.values()))

    def snapshot(self):
        return {k: t.data.copy() for k, t in self._params.items()}

    def load_snapshot(self, arrays):
        for k, v in arrays.items():
            t = self._params[k]
            if t.shape != v.shape:
                raise DimensionError(f"{k}: shape {v.shape} does not match {t.shape}")
            t.data[...] = v

    def global_norm(self):
        return float(np.sqrt(sum(float((self.gradient(k) ** 2).sum()) for k in self._params)))


class OptimizerKind(str, Enum):
    SGD = "sgd"
    ADAM = "adam"


@dataclass
class OptimizerState:
    kind: OptimizerKind
    learning_rate: float
    adam_betas: tuple = (0.9, 0.999)
    adam_epsilon: float = 1e-8
    step_count: int = 0
    adam_moments: dict = field(default_factory=dict)

    def __post_init__(self):
        self.kind = OptimizerKind(self.kind)
        if self.learning_rate <= 0:
            raise ContractError("learning rate must be positive")


def clip_global_norm(store: ParameterStore, max_norm: float) -> float:
    """Rescale all gradients so their joint L2 norm is at most ``max_norm``.

    Returns the applied scale (1.0 when no clipping happened).
    """
    if not max_norm > 0:
        raise ContractError(f"max_norm must be positive, got {max_norm}")
    norm = store.global_norm()
    if norm <= max_norm:
        return 1.0
    scale = max_norm / norm
    for name in store:
        store.gradient(name)[...] *= scale
    return scale


def optimizer_step(store: ParameterStore, state: OptimizerState):
    state.step_count += 1
    lr = state.learning_rate
    if state.kind is OptimizerKind.SGD:
        for name, t in store.items():
            t.data -= lr * store.gradient(name)
        return
    b1, b2 = state.adam_betas
    t_ = state.step_count
    corr1 = 1.0 - b1 ** t_
    corr2 = 1.0 - b2 ** t_
    for name, t in store.items():
        g = store.gradient(name)
        if name not in state.adam_moments:
            state.adam_moments[name] = (np.zeros_like(t.data), np.zeros_like(t.data))
        m, v = state.adam_moments[name]
        if m.shape != g.shape:
            raise DimensionError(f"Adam moment shape {m.shape} != gradient shape {g.shape} for {name}")
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        t.data -= lr * (m / corr1) / (np.sqrt(v / corr2) + state.adam_epsilon)
