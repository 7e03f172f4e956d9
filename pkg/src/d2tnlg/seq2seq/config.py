"""Model/training configurations and the named experiment presets."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

from ..corpus.vocab import CHAR, WORD
from ..numcore import OptimizerKind

INIT_SCHEME = "uniform(-0.1,0.1) weights, zero biases"
INIT_RANGE = 0.1

# ``context``: softmax(W_out c_t + b), the context vector alone feeds the output.
# ``attentional``: softmax(W_out tanh(W_c [c_t; s_t]) + b), and that combined
# vector is what gets fed back to the next step.
OUTPUT_LAYERS = ("context", "attentional")

# How a batch's summed token loss is scaled before backprop: ``sents`` divides
# by the number of pairs (per-sentence sums, the usual NMT-toolkit default),
# ``tokens`` by the number of target tokens.
LOSS_NORMALIZATIONS = ("sents", "tokens")


@dataclass(frozen=True)
class ModelConfig:
    mode: str = WORD
    embedding_dim: int = 64
    hidden_dim: int = 64
    num_layers: int = 1
    bidirectional_encoder: bool = False
    dropout_p: float = 0.3
    attention: str = "general"
    output_layer: str = "attentional"

    def __post_init__(self):
        if self.mode not in (WORD, CHAR):
            raise ValueError(f"mode must be {WORD!r} or {CHAR!r}, got {self.mode!r}")
        if self.embedding_dim <= 0 or self.hidden_dim <= 0:
            raise ValueError("embedding_dim and hidden_dim must be positive")
        if self.num_layers not in (1, 2):
            raise ValueError(f"num_layers must be 1 or 2, got {self.num_layers}")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ValueError(f"dropout_p must lie in [0, 1), got {self.dropout_p}")
        if self.attention != "general":
            raise ValueError("only general attention is supported")
        if self.output_layer not in OUTPUT_LAYERS:
            raise ValueError(f"output_layer must be one of {OUTPUT_LAYERS}, got {self.output_layer!r}")


@dataclass(frozen=True)
class TrainingSchedule:
    optimizer: str = OptimizerKind.ADAM.value
    learning_rate: float = 0.001
    max_epochs: int = 13
    lr_halve_from_epoch: int = 8
    clip_max_norm: float = 5.0
    batch_size: int = 64
    loss_normalization: str = "sents"

    def __post_init__(self):
        OptimizerKind(self.optimizer)
        if self.loss_normalization not in LOSS_NORMALIZATIONS:
            raise ValueError(f"loss_normalization must be one of {LOSS_NORMALIZATIONS}, "
                             f"got {self.loss_normalization!r}")
        if self.learning_rate <= 0 or self.max_epochs < 1 or self.batch_size < 1:
            raise ValueError("learning_rate, max_epochs and batch_size must be positive")
        if self.clip_max_norm <= 0:
            raise ValueError("clip_max_norm must be positive")


def next_learning_rate(lr, epoch, improved, halve_from):
    """Learning rate for the epoch after ``epoch`` (1-based).

    Halved when the dev perplexity did not improve, and unconditionally at the
    end of every epoch from ``halve_from`` on.
    """
    if not improved or epoch >= halve_from:
        return lr / 2.0
    return lr


@dataclass(frozen=True)
class Preset:
    model: ModelConfig
    schedule: TrainingSchedule
    beam_size: int


_BIG = dict(embedding_dim=500, hidden_dim=500, num_layers=2, dropout_p=0.3)
_ADAM = TrainingSchedule(optimizer="adam", learning_rate=0.001, max_epochs=13, clip_max_norm=5.0, batch_size=64)

PRESETS = {
    "e2e-word": Preset(
        ModelConfig(mode=WORD, embedding_dim=64, hidden_dim=64, num_layers=1, dropout_p=0.3),
        TrainingSchedule(optimizer="sgd", learning_rate=1.0, max_epochs=13, clip_max_norm=5.0, batch_size=64),
        beam_size=15),
    "e2e-char": Preset(ModelConfig(mode=CHAR, bidirectional_encoder=True, **_BIG), _ADAM, beam_size=5),
    "webnlg-word": Preset(ModelConfig(mode=WORD, **_BIG), _ADAM, beam_size=15),
    "webnlg-char": Preset(ModelConfig(mode=CHAR, bidirectional_encoder=True, **_BIG), _ADAM, beam_size=5),
    "template-t1": Preset(
        ModelConfig(mode=WORD, embedding_dim=28, hidden_dim=64, num_layers=1, dropout_p=0.4),
        TrainingSchedule(optimizer="adam", learning_rate=0.001, max_epochs=25, clip_max_norm=2.0, batch_size=4),
        beam_size=30),
    "template-t2": Preset(
        ModelConfig(mode=WORD, embedding_dim=28, hidden_dim=64, num_layers=1, dropout_p=0.5),
        TrainingSchedule(optimizer="sgd", learning_rate=1.0, max_epochs=13, clip_max_norm=2.0, batch_size=4),
        beam_size=30),
    "template-t1t2": Preset(
        ModelConfig(mode=WORD, embedding_dim=30, hidden_dim=64, num_layers=1, bidirectional_encoder=True,
                    dropout_p=0.3),
        TrainingSchedule(optimizer="sgd", learning_rate=1.0, max_epochs=15, clip_max_norm=2.0, batch_size=16),
        beam_size=30),
}


def get_preset(key) -> Preset:
    try:
        return PRESETS[key]
    except KeyError:
        raise KeyError(f"unknown preset {key!r}; choose from {', '.join(PRESETS)}") from None


def _coerce(value, typ):
    if isinstance(value, str):
        if typ is bool:
            if value.lower() in ("1", "true", "yes"):
                return True
            if value.lower() in ("0", "false", "no"):
                return False
            raise ValueError(f"not a boolean: {value!r}")
        return typ(value)
    return value


def apply_overrides(preset: Preset, overrides: dict) -> Preset:
    """Override preset fields by name; ``beam_size`` and any ModelConfig or
    TrainingSchedule field are accepted. String values are coerced."""
    model_fields = {f.name: f.type for f in fields(ModelConfig)}
    sched_fields = {f.name: f.type for f in fields(TrainingSchedule)}
    types = {"int": int, "float": float, "bool": bool, "str": str}
    m, s, beam = {}, {}, preset.beam_size
    for key, value in overrides.items():
        if key == "beam_size":
            beam = int(value)
        elif key in model_fields:
            m[key] = _coerce(value, types[model_fields[key]])
        elif key in sched_fields:
            s[key] = _coerce(value, types[sched_fields[key]])
        else:
            raise KeyError(f"unknown configuration key {key!r}")
    return Preset(replace(preset.model, **m), replace(preset.schedule, **s), beam)


def to_dict(obj):
    return asdict(obj)
