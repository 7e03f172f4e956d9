from .classify import TemplateClassification, TemplateLabel, classify
from .lexicon import AttributeLexicon, LexiconError, default_lexicon, lexicon_product
from .realize import TemplateId, rating_phrase, realize
from .synth import SynthesisConfig, SynthPair, eligible, synthesize_corpus, to_training_pairs
