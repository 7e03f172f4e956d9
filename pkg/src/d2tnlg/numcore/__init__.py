from .lstm import LstmCellParams, lstm_cell, lstm_step
from .optim import (
    OptimizerKind,
    OptimizerState,
    ParameterStore,
    clip_global_norm,
    optimizer_step,
)
from .tensor import (
    ContractError,
    DimensionError,
    Tensor,
    add,
    as_tensor,
    backward,
    concat,
    cross_entropy,
    einsum,
    index,
    linear,
    matmul,
    mul,
    nll_sum,
    no_grad,
    sigmoid,
    softmax,
    stack,
    sum,
    take_rows,
    tanh,
)

__all__ = [
    "ContractError", "DimensionError", "LstmCellParams", "OptimizerKind", "OptimizerState",
    "ParameterStore", "Tensor", "add", "as_tensor", "backward", "clip_global_norm", "concat",
    "cross_entropy", "einsum", "index", "linear", "lstm_cell", "lstm_step", "matmul", "mul",
    "nll_sum", "no_grad", "optimizer_step", "sigmoid", "softmax", "stack", "sum", "take_rows",
    "tanh",
]
