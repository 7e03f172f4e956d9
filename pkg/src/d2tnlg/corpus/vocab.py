from __future__ import annotations

import json
from dataclasses import dataclass

PAD, BOS, EOS, UNK = 0, 1, 2, 3
RESERVED = ("<pad>", "<s>", "</s>", "<unk>")
WORD, CHAR = "word", "char"


class Vocabulary:
    """Symbol <-> id bijection with ids 0..3 reserved for PAD, BOS, EOS, UNK."""

    def __init__(self, symbols=(), mode=WORD):
        if mode not in (WORD, CHAR):
            raise ValueError(f"unknown vocabulary mode {mode!r}")
        self.mode = mode
        self._id2sym = list(RESERVED)
        self._sym2id = {s: i for i, s in enumerate(RESERVED)}
        for s in symbols:
            self.add(s)

    def add(self, symbol):
        if symbol in self._sym2id:
            return self._sym2id[symbol]
        self._sym2id[symbol] = len(self._id2sym)
        self._id2sym.append(symbol)
        return self._sym2id[symbol]

    def __len__(self):
        return len(self._id2sym)

    def __contains__(self, symbol):
        return symbol in self._sym2id

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.mode == other.mode \
            and self._id2sym == other._id2sym

    @property
    def symbols(self):
        """Non-reserved symbols in id order."""
        return self._id2sym[len(RESERVED):]

    @property
    def num_symbols(self):
        return len(self._id2sym) - len(RESERVED)

    def id(self, symbol):
        return self._sym2id.get(symbol, UNK)

    def symbol(self, idx):
        return self._id2sym[idx]

    def encode(self, symbols, add_bos=False, add_eos=False):
        ids = [self.id(s) for s in symbols]
        if add_bos:
            ids.insert(0, BOS)
        if add_eos:
            ids.append(EOS)
        return ids

    def decode(self, ids, strip=True):
        out = []
        for i in ids:
            i = int(i)
            if strip and i == EOS:
                break
            if strip and i in (PAD, BOS):
                continue
            out.append(self._id2sym[i])
        return out

    def to_json(self):
        return {"mode": self.mode, "symbols": self.symbols}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["symbols"], mode=obj["mode"])

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, ensure_ascii=False, indent=0)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def symbols_of(text, mode):
    """Split a preprocessed string into model symbols."""
    if mode == CHAR:
        return list(text)
    return text.split()


def join_symbols(symbols, mode):
    return "".join(symbols) if mode == CHAR else " ".join(symbols)


@dataclass
class CorpusStats:
    avg_input_length: float
    avg_text_length: float
    input_vocabulary: int
    output_vocabulary: int

    def table(self, title=""):
        rows = [
            ("avg. input length", f"{self.avg_input_length:.1f}"),
            ("avg. text length", f"{self.avg_text_length:.1f}"),
            ("input vocabulary", f"{self.input_vocabulary:,}"),
            ("output vocabulary", f"{self.output_vocabulary:,}"),
        ]
        lines = [title] if title else []
        lines += [f"{k:<20}{v:>10}" for k, v in rows]
        return "\n".join(lines)


def build_vocab(pairs, mode):
    """Build input/output vocabularies from ``(input, text)`` string pairs.

    Every training symbol is kept (no frequency cutoff). Input lengths are
    averaged over distinct inputs, text lengths over all references.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("build_vocab: empty corpus")
    in_syms, out_syms = set(), set()
    in_lengths = {}
    out_total = 0
    for src, tgt in pairs:
        s = symbols_of(src, mode)
        t = symbols_of(tgt, mode)
        in_syms.update(s)
        out_syms.update(t)
        in_lengths[src] = len(s)
        out_total += len(t)
    for sym in RESERVED:
        in_syms.discard(sym)
        out_syms.discard(sym)
    vin = Vocabulary(sorted(in_syms), mode)
    vout = Vocabulary(sorted(out_syms), mode)
    stats = CorpusStats(
        avg_input_length=sum(in_lengths.values()) / len(in_lengths),
        avg_text_length=out_total / len(pairs),
        input_vocabulary=vin.num_symbols,
        output_vocabulary=vout.num_symbols,
    )
    return vin, vout, stats
