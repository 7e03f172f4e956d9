from .delex import DelexRecord, delex_e2e, delex_webnlg, relexicalize, replace_values
from .mr import (
    E2E,
    E2E_ATTRIBUTES,
    WEBNLG,
    MeaningRepresentation,
    MRParseError,
    lowercase_keep_placeholders,
    parse_e2e_mr,
    parse_webnlg_input,
    serialize_input,
)
from .pipeline import (
    DataError,
    Instance,
    Pair,
    group_references,
    load_e2e_csv,
    load_webnlg_xml,
    preprocess_inputs,
    preprocess_instances,
    preprocess_pair,
    read_corpus,
    split_camel_case,
    write_corpus,
)
from .tokenize import char_tokenize, detokenize, word_tokenize
from .vocab import CHAR, WORD, CorpusStats, Vocabulary, build_vocab, join_symbols, symbols_of
