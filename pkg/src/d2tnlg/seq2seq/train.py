"""Mini-batch training with dev-perplexity model selection."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..numcore import (
    OptimizerState,
    backward,
    clip_global_norm,
    mul,
    no_grad,
    optimizer_step,
)
from ..prng import SeededPrng
from .config import ModelConfig, TrainingSchedule, next_learning_rate
from .model import Seq2Seq

log = logging.getLogger(__name__)


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch, batch, value):
        super().__init__(f"training diverged at epoch {epoch}, batch {batch}: loss={value}")
        self.epoch = epoch
        self.batch = batch


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    dev_perplexity: float
    learning_rate: float


@dataclass
class TrainResult:
    model: Seq2Seq
    best_epoch: int
    best_perplexity: float
    log: list = field(default_factory=list)


def perplexity(model: Seq2Seq, pairs, batch_size=64):
    """``exp`` of the mean token NLL over all reference tokens (EOS included)."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("perplexity: empty corpus")
    total, count = 0.0, 0
    with no_grad():
        for i in range(0, len(pairs), batch_size):
            chunk = pairs[i:i + batch_size]
            loss, n = model.batch_nll([p[0] for p in chunk], [p[1] for p in chunk])
            total += float(loss.data)
            count += n
    return math.exp(total / count)


def _batches(n, batch_size, rng):
    order = rng.permutation(n)
    return [order[i:i + batch_size] for i in range(0, n, batch_size)]


def train(train_pairs, dev_pairs, src_vocab_size, tgt_vocab_size, config: ModelConfig,
          schedule: TrainingSchedule, seed: int, progress=None) -> TrainResult:
    """Train from scratch on ``(src_ids, tgt_ids)`` pairs (targets unwrapped).

    The learning rate is halved after an epoch whose dev perplexity does not
    beat the best so far (the untrained model included) and after every epoch
    from ``schedule.lr_halve_from_epoch`` on. Returns the epoch checkpoint with
    the lowest dev perplexity.
    """
    train_pairs, dev_pairs = list(train_pairs), list(dev_pairs)
    if not train_pairs or not dev_pairs:
        raise ValueError("train: empty training or development corpus")
    prng = SeededPrng(seed)
    model = Seq2Seq(config, src_vocab_size, tgt_vocab_size, rng=prng.stream("init"))
    shuffle_rng = prng.stream("shuffle")
    drop_rng = prng.stream("dropout")
    state = OptimizerState(schedule.optimizer, schedule.learning_rate)
    store = model.params

    best_ppl = perplexity(model, dev_pairs)
    best_snapshot, best_epoch, best_epoch_ppl = None, 0, math.inf
    records = []
    for epoch in range(1, schedule.max_epochs + 1):
        lr_used = state.learning_rate
        total, count = 0.0, 0
        for b, idx in enumerate(_batches(len(train_pairs), schedule.batch_size, shuffle_rng), 1):
            src = [train_pairs[i][0] for i in idx]
            tgt = [train_pairs[i][1] for i in idx]
            store.zero_gradients()
            loss_sum, n = model.batch_nll(src, tgt, training=True, rng=drop_rng)
            value = float(loss_sum.data) / n
            if not math.isfinite(value):
                raise TrainingDiverged(epoch, b, value)
            denom = len(idx) if schedule.loss_normalization == "sents" else n
            backward(mul(loss_sum, 1.0 / denom))
            clip_global_norm(store, schedule.clip_max_norm)
            optimizer_step(store, state)
            total += float(loss_sum.data)
            count += n
        dev_ppl = perplexity(model, dev_pairs)
        if not math.isfinite(dev_ppl):
            raise TrainingDiverged(epoch, "dev", dev_ppl)
        rec = EpochRecord(epoch, total / count, dev_ppl, lr_used)
        records.append(rec)
        log.info("epoch %d loss %.4f dev ppl %.4f lr %g", epoch, rec.train_loss, dev_ppl, lr_used)
        if progress is not None:
            progress(rec)
        if dev_ppl < best_epoch_ppl:
            best_epoch_ppl, best_epoch = dev_ppl, epoch
            best_snapshot = store.snapshot()
        improved = dev_ppl < best_ppl
        best_ppl = min(best_ppl, dev_ppl)
        state.learning_rate = next_learning_rate(state.learning_rate, epoch, improved,
                                                 schedule.lr_halve_from_epoch)
    store.load_snapshot(best_snapshot)
    return TrainResult(model, best_epoch, best_epoch_ppl, records)


def lr_trace(initial_lr, dev_perplexities, halve_from, baseline=math.inf):
    """Learning rate used in each epoch for a given sequence of dev perplexities."""
    lrs, best, lr = [], baseline, initial_lr
    for epoch, ppl in enumerate(dev_perplexities, 1):
        lrs.append(lr)
        improved = ppl < best
        best = min(best, ppl)
        lr = next_learning_rate(lr, epoch, improved, halve_from)
    return lrs
