from .beam import Hypothesis, beam_search, beam_search_core, greedy_decode
from .checkpoint import Checkpoint, CheckpointError, load_checkpoint, save_checkpoint
from .config import (
    PRESETS,
    ModelConfig,
    Preset,
    TrainingSchedule,
    apply_overrides,
    get_preset,
    next_learning_rate,
)
from .model import DecoderState, Seq2Seq, attend, pad_batch
from .train import EpochRecord, TrainingDiverged, TrainResult, lr_trace, perplexity, train

__all__ = [
    "PRESETS", "Checkpoint", "CheckpointError", "DecoderState", "EpochRecord", "Hypothesis",
    "ModelConfig", "Preset", "Seq2Seq", "TrainResult", "TrainingDiverged", "TrainingSchedule",
    "apply_overrides", "attend", "beam_search", "beam_search_core", "get_preset", "greedy_decode",
    "load_checkpoint", "lr_trace", "next_learning_rate", "pad_batch", "perplexity", "save_checkpoint",
    "train",
]
