"""Dataset readers, per-mode preprocessing and the preprocessed-corpus format.

Preprocessed corpus: UTF-8, one pair per line::

    <serialised input> TAB <reference> TAB <placeholder=value US placeholder=value ...>

where US is the ASCII unit separator (0x1f). In word mode the first two
fields are space-joined tokens; in char mode they are the raw lowercased
strings.
"""

from __future__ import annotations

import csv
import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .delex import DelexRecord, delex_e2e, delex_webnlg, relexicalize
from .mr import (
    E2E,
    WEBNLG,
    MeaningRepresentation,
    MRParseError,
    lowercase_keep_placeholders,
    parse_e2e_mr,
    serialize_input,
)
from .tokenize import word_tokenize
from .vocab import CHAR, WORD

log = logging.getLogger(__name__)


class DataError(ValueError):
    pass


@dataclass
class Instance:
    mr: MeaningRepresentation
    references: list = field(default_factory=list)


@dataclass
class Pair:
    source: str
    target: str
    record: DelexRecord


def split_camel_case(prop: str) -> str:
    return re.sub(r"(?<=[a-z])(?=[A-Z])", " ", prop).lower()


# ------------------------------------------------------------------ loaders

def load_e2e_csv(path, require_references=True):
    """Read an E2E CSV (``mr,ref`` columns); repeated MRs merge into one instance."""
    by_mr: dict[str, Instance] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        cols = [h.strip().lower() for h in header]
        if "mr" not in cols:
            raise DataError(f"{path}:1: header lacks an 'mr' column")
        i_mr = cols.index("mr")
        i_ref = cols.index("ref") if "ref" in cols else None
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(cols):
                raise DataError(f"{path}:{line}: expected {len(cols)} fields, got {len(row)}")
            try:
                mr = parse_e2e_mr(row[i_mr])
            except (MRParseError, ValueError) as exc:
                raise DataError(f"{path}:{line}: {exc}") from None
            inst = by_mr.setdefault(row[i_mr].strip(), Instance(mr))
            if i_ref is not None and row[i_ref].strip():
                inst.references.append(row[i_ref].strip())
    return _drop_unreferenced(list(by_mr.values()), path, require_references)


def _clean_entity(text):
    return text.strip().strip('"').replace("_", " ").strip()


def load_webnlg_xml(path, require_references=True):
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise DataError(f"{path}: XML error at line {exc.position[0]}: {exc}") from None
    instances = []
    for n, entry in enumerate(root.iter("entry"), 1):
        where = f"{path}: entry #{n} (eid={entry.get('eid')})"
        triples_el = entry.findall("./modifiedtripleset/mtriple") or entry.findall("./originaltripleset/otriple")
        triples = []
        for t in triples_el:
            parts = (t.text or "").split("|")
            if len(parts) != 3:
                raise DataError(f"{where}: malformed triple {t.text!r}")
            s, p, o = (x.strip() for x in parts)
            triples.append((_clean_entity(s), p, _clean_entity(o)))
        if not triples:
            raise DataError(f"{where}: no triples")
        refs = []
        for lex in entry.findall("./lex"):
            text_el = lex.find("text")
            text = (text_el.text if text_el is not None else lex.text) or ""
            if text.strip():
                refs.append(" ".join(text.split()))
        instances.append(Instance(MeaningRepresentation(WEBNLG, tuple(triples)), refs))
    return _drop_unreferenced(instances, path, require_references)


def _drop_unreferenced(instances, path, require_references):
    if not require_references:
        return instances
    kept = [i for i in instances if i.references]
    if len(kept) < len(instances):
        log.warning("%s: skipped %d instances without references", path, len(instances) - len(kept))
    return kept


# ------------------------------------------------------------ preprocessing

def _normalise_space(text):
    return " ".join(text.split())


def prepare_mr(mr):
    """Dataset-specific input normalisation applied before delexicalisation."""
    if mr.kind == WEBNLG:
        return MeaningRepresentation(WEBNLG, tuple((s, split_camel_case(p), o) for s, p, o in mr.slots))
    return mr


def preprocess_pair(mr, text, mode):
    """Lowercase, (word mode) delexicalise and tokenise one input/text pair."""
    mr = prepare_mr(mr)
    text = _normalise_space(text or "")
    if mode == CHAR:
        return Pair(serialize_input(mr), text.lower(), DelexRecord(""))
    if mode != WORD:
        raise ValueError(f"unknown mode {mode!r}")
    # texts that are already delexicalised keep their placeholders
    text = lowercase_keep_placeholders(text)
    delex = delex_e2e if mr.kind == E2E else delex_webnlg
    mr2, text2, record = delex(mr, text)
    src = " ".join(word_tokenize(serialize_input(mr2)))
    tgt = " ".join(word_tokenize(text2))
    return Pair(src, tgt, record)


def preprocess_instances(instances, mode):
    """One :class:`Pair` per (instance, reference)."""
    pairs = []
    for inst in instances:
        for ref in inst.references:
            pairs.append(preprocess_pair(inst.mr, ref, mode))
    return pairs


def preprocess_inputs(instances, mode):
    """Inputs only (no references), e.g. for generation on a test set."""
    return [preprocess_pair(inst.mr, "", mode) for inst in instances]


# ---------------------------------------------------------- corpus file I/O

def _clean_field(text):
    return text.replace("\t", " ").replace("\n", " ")


def write_corpus(path, pairs):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in pairs:
            fh.write(f"{_clean_field(p.source)}\t{_clean_field(p.target)}\t{p.record.encode()}\n")


def read_corpus(path):
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) == 1:
                parts += ["", ""]
            elif len(parts) == 2:
                parts.append("")
            if len(parts) != 3:
                raise DataError(f"{path}:{n}: expected 3 tab-separated fields, got {len(parts)}")
            pairs.append(Pair(parts[0], parts[1], DelexRecord.decode(parts[2])))
    return pairs


def group_references(pairs):
    """Distinct inputs in first-appearance order with their reference lists."""
    groups: dict[str, list] = {}
    records = {}
    for p in pairs:
        groups.setdefault(p.source, [])
        records.setdefault(p.source, p.record)
        if p.target:
            groups[p.source].append(p.target)
    return [(src, refs, records[src]) for src, refs in groups.items()]


__all__ = [
    "DataError", "Instance", "Pair", "group_references", "load_e2e_csv", "load_webnlg_xml",
    "prepare_mr", "preprocess_inputs", "preprocess_instances", "preprocess_pair", "read_corpus",
    "relexicalize", "split_camel_case", "write_corpus",
]
