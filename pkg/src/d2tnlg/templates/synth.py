from __future__ import annotations

from dataclasses import dataclass

from ..corpus.mr import MeaningRepresentation, serialize_input
from ..corpus.pipeline import Pair, preprocess_pair
from ..corpus.vocab import WORD
from .realize import TemplateId, realize

REQUIRED_ATTRIBUTES = ("name", "eatType")


@dataclass(frozen=True)
class SynthesisConfig:
    templates: tuple
    repetition_factor: int

    def __post_init__(self):
        ts = tuple(TemplateId(t) for t in self.templates)
        if not ts or len(set(ts)) != len(ts):
            raise ValueError("templates must be a non-empty set of T1/T2")
        object.__setattr__(self, "templates", ts)
        if self.repetition_factor < 1:
            raise ValueError("repetition_factor must be positive")

    @classmethod
    def for_templates(cls, templates):
        """Single-template corpora are repeated once so every config yields
        the same number of pairs."""
        templates = tuple(templates)
        return cls(templates, 2 if len(templates) == 1 else 1)

    @classmethod
    def from_flag(cls, flag):
        try:
            templates = {"t1": ("T1",), "t2": ("T2",), "t1t2": ("T1", "T2")}[flag.lower()]
        except KeyError:
            raise ValueError(f"templates flag must be t1, t2 or t1t2, got {flag!r}") from None
        return cls.for_templates(templates)


@dataclass(frozen=True)
class SynthPair:
    mr: MeaningRepresentation
    template: TemplateId
    source: str
    text: str


def eligible(mr):
    d = mr.as_dict()
    return all(d.get(a) for a in REQUIRED_ATTRIBUTES)


def synthesize_corpus(inputs, config: SynthesisConfig, lexicon=None):
    """One reference per (input, template); inputs lacking name or eatType are
    dropped. Order: every input under the first template, then the next
    template, and the whole block repeated ``repetition_factor`` times."""
    mrs = [mr for mr in inputs if eligible(mr)]
    if not mrs:
        raise ValueError("synthesize_corpus: no input has both name and eatType")
    block = []
    for t in config.templates:
        for mr in mrs:
            block.append(SynthPair(mr, t, serialize_input(mr), realize(t, mr, lexicon)))
    return block * config.repetition_factor


def to_training_pairs(synth_pairs, mode=WORD) -> list[Pair]:
    """Run synthesized pairs through the standard preprocessing."""
    return [preprocess_pair(sp.mr, sp.text, mode) for sp in synth_pairs]
