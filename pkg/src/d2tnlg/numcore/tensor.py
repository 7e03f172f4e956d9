"""Dense tensors with a define-by-run reverse-mode tape.

Every op below returns a new :class:`Tensor` that remembers its parents and a
closure computing the vector-Jacobian product. The graph is rebuilt on every
forward pass, so variable-length loops need no special handling.
"""

from __future__ import annotations

import contextlib

import numpy as np

DTYPE = np.float64

_grad_enabled = True


class DimensionError(ValueError):
    pass


class ContractError(ValueError):
    pass


@contextlib.contextmanager
def no_grad():
    """Disable tape recording (inference)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, _parents=(), _backward=None):
        self.data = np.asarray(data, dtype=DTYPE)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self):
        return self.data.size

    def numpy(self):
        return self.data

    def zero_grad(self):
        self.grad = np.zeros_like(self.data)

    def backward(self):
        backward(self)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __sub__(self, other):
        return add(self, mul(other, -1.0))

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return index(self, key)


def as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def _make(data, parents, backward_fn):
    """Wrap an op result; record it on the tape only if some parent needs grads."""
    if _grad_enabled and any(p.requires_grad for p in parents):
        return Tensor(data, True, parents, backward_fn)
    return Tensor(data)


def _accumulate(t, g):
    if not t.requires_grad:
        return
    if t.grad is None:
        t.grad = np.array(g, dtype=DTYPE, copy=True)
    else:
        t.grad += g


def _unbroadcast(g, shape):
    # sum broadcast axes back down to `shape`
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g


def backward(loss: Tensor):
    """Accumulate d(loss)/d(leaf) into ``.grad`` of every reachable leaf."""
    if loss.data.size != 1:
        raise ContractError(f"backward() needs a scalar loss, got shape {loss.data.shape}")
    if not loss.requires_grad:
        return
    order = []
    seen = set()
    stack = [(loss, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))

    grads = {id(loss): np.ones_like(loss.data)}
    for node in reversed(order):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node._backward is None:
            # leaf: persistent gradient
            _accumulate(node, g)
            continue
        for parent, pg in zip(node._parents, node._backward(g)):
            if pg is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + pg
            else:
                grads[key] = pg


# ---------------------------------------------------------------- elementwise

def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    out = a.data + b.data

    def bw(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _make(out, (a, b), bw)


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    out = a.data * b.data

    def bw(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return _make(out, (a, b), bw)


def tanh(a):
    a = as_tensor(a)
    out = np.tanh(a.data)

    def bw(g):
        return (g * (1.0 - out * out),)

    return _make(out, (a,), bw)


def _sigmoid(x):
    return 0.5 * (np.tanh(0.5 * x) + 1.0)


def sigmoid(a):
    a = as_tensor(a)
    out = _sigmoid(a.data)

    def bw(g):
        return (g * out * (1.0 - out),)

    return _make(out, (a,), bw)


def sum(a):  # noqa: A001 - mirrors numpy naming
    a = as_tensor(a)

    def bw(g):
        return (np.broadcast_to(g, a.shape).copy(),)

    return _make(a.data.sum(), (a,), bw)


# ------------------------------------------------------------------- algebra

def matmul(a, b):
    """Matrix product for 1-D/2-D operands (numpy matmul semantics)."""
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim == 0 or b.data.ndim == 0 or a.shape[-1] != b.shape[0 if b.data.ndim == 1 else -2]:
        raise DimensionError(f"matmul shape mismatch: {a.shape} x {b.shape}")
    out = a.data @ b.data

    def bw(g):
        A, B = a.data, b.data
        A2 = A[None, :] if A.ndim == 1 else A
        B2 = B[:, None] if B.ndim == 1 else B
        G2 = g
        if A.ndim == 1:
            G2 = G2[None, ...]
        if B.ndim == 1:
            G2 = G2[..., None]
        ga = (G2 @ B2.T).reshape(A.shape)
        gb = (A2.T @ G2).reshape(B.shape)
        return ga, gb

    return _make(out, (a, b), bw)


def linear(x, w, b=None):
    """``x @ w.T + b`` over the last axis of ``x``; ``w`` is [out, in]."""
    x, w = as_tensor(x), as_tensor(w)
    if x.shape[-1] != w.shape[1]:
        raise DimensionError(f"linear shape mismatch: input {x.shape} vs weight {w.shape}")
    out = x.data @ w.data.T
    parents = (x, w)
    if b is not None:
        b = as_tensor(b)
        out = out + b.data
        parents = (x, w, b)

    def bw(g):
        g2 = g.reshape(-1, g.shape[-1])
        x2 = x.data.reshape(-1, x.shape[-1])
        gx = (g2 @ w.data).reshape(x.shape)
        gw = g2.T @ x2
        if b is None:
            return gx, gw
        return gx, gw, g2.sum(axis=0)

    return _make(out, parents, bw)


def einsum(subscripts, a, b):
    """Two-operand einsum, e.g. ``"bnh,bh->bn"``; every index of an input must
    appear in the output or in the other input."""
    a, b = as_tensor(a), as_tensor(b)
    ins, outs = subscripts.split("->")
    sa, sb = ins.split(",")
    out = np.einsum(subscripts, a.data, b.data)

    def bw(g):
        return (np.einsum(f"{outs},{sb}->{sa}", g, b.data),
                np.einsum(f"{outs},{sa}->{sb}", g, a.data))

    return _make(out, (a, b), bw)


# ------------------------------------------------------------------ structure

def concat(tensors, axis=-1):
    tensors = [as_tensor(t) for t in tensors]
    out = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.shape[axis] for t in tensors]
    cuts = np.cumsum(sizes)[:-1]

    def bw(g):
        return tuple(np.split(g, cuts, axis=axis))

    return _make(out, tuple(tensors), bw)


def stack(tensors, axis=0):
    tensors = [as_tensor(t) for t in tensors]
    out = np.stack([t.data for t in tensors], axis=axis)

    def bw(g):
        return tuple(np.moveaxis(g, axis, 0))

    return _make(out, tuple(tensors), bw)


def index(a, key):
    """Basic (slice/int) indexing."""
    a = as_tensor(a)
    out = a.data[key]

    def bw(g):
        full = np.zeros_like(a.data)
        full[key] = g
        return (full,)

    return _make(out, (a,), bw)


def take_rows(table, ids):
    """Embedding lookup: rows of a [V, E] table for an integer array of ids."""
    table = as_tensor(table)
    ids = np.asarray(ids, dtype=np.int64)
    V = table.shape[0]
    if ids.size and (ids.min() < 0 or ids.max() >= V):
        raise IndexError(f"id out of range for table with {V} rows")
    out = table.data[ids]

    def bw(g):
        full = np.zeros_like(table.data)
        np.add.at(full, ids.reshape(-1), g.reshape(-1, table.shape[1]))
        return (full,)

    return _make(out, (table,), bw)


# --------------------------------------------------------------- probability

def _softmax_np(x, axis=-1):
    z = x - x.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def softmax(x, mask=None):
    """Softmax over the last axis; ``mask`` (bool, same shape) hides entries."""
    x = as_tensor(x)
    if x.data.ndim == 0 or x.shape[-1] == 0:
        raise DimensionError("softmax of an empty tensor")
    z = x.data
    if mask is not None:
        z = np.where(mask, z, -np.inf)
    out = _softmax_np(z)
    if mask is not None:
        out = np.where(mask, out, 0.0)

    def bw(g):
        return (out * (g - (g * out).sum(axis=-1, keepdims=True)),)

    return _make(out, (x,), bw)


def log_softmax_np(x):
    z = x - x.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def cross_entropy(logits, target_index):
    """``-log softmax(logits)[target]`` for a single 1-D logit vector."""
    logits = as_tensor(logits)
    n = logits.shape[-1]
    if not 0 <= target_index < n:
        raise IndexError(f"target index {target_index} out of range for {n} classes")
    return nll_sum(logits, np.asarray(target_index), None)


def nll_sum(logits, targets, weights=None):
    """Sum over positions of ``weight * -log softmax(logits)[target]``.

    ``logits`` is [..., V]; ``targets`` has the leading shape; ``weights``
    (optional, same shape as targets) masks padding.
    """
    logits = as_tensor(logits)
    targets = np.asarray(targets, dtype=np.int64)
    lsm = log_softmax_np(logits.data)
    picked = np.take_along_axis(lsm, targets[..., None], axis=-1)[..., 0]
    w = np.ones_like(picked) if weights is None else np.asarray(weights, dtype=DTYPE)
    out = -(picked * w).sum()

    def bw(g):
        grad = np.exp(lsm)
        np.put_along_axis(grad, targets[..., None],
                          np.take_along_axis(grad, targets[..., None], axis=-1) - 1.0, axis=-1)
        return (grad * (w * g)[..., None],)

    return _make(out, (logits,), bw)
