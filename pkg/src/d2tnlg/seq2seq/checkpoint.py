"""Binary checkpoint format.

Layout (all integers little-endian)::

    magic        8 bytes   b"D2TCKPT\\n"
    version      uint32    FORMAT_VERSION
    header_len   uint64    byte length of the JSON header
    header       UTF-8 JSON: config, vocabularies, init scheme, seed,
                 tensors = [{name, shape, offset, nbytes}], dtype "<f8"
    payload      concatenated float64 arrays ("<f8", C order)

Offsets are relative to the start of the payload.
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass

import numpy as np

from ..corpus.vocab import Vocabulary
from ..numcore import ParameterStore
from .config import INIT_SCHEME, ModelConfig
from .model import Seq2Seq

MAGIC = b"D2TCKPT\n"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


@dataclass
class Checkpoint:
    model: Seq2Seq
    src_vocab: Vocabulary
    tgt_vocab: Vocabulary
    seed: int | None = None
    extra: dict | None = None

    @property
    def config(self) -> ModelConfig:
        return self.model.config

    def check_vocabularies(self, src_vocab=None, tgt_vocab=None):
        """Refuse vocabularies whose mode or size differ from the checkpoint's."""
        for name, mine, other in (("input", self.src_vocab, src_vocab), ("output", self.tgt_vocab, tgt_vocab)):
            if other is None:
                continue
            if other.mode != self.config.mode:
                raise CheckpointError(
                    f"{name} vocabulary mode {other.mode!r} does not match checkpoint mode {self.config.mode!r}")
            if other != mine:
                raise CheckpointError(f"{name} vocabulary differs from the one stored in the checkpoint")


def save_checkpoint(path, model: Seq2Seq, src_vocab: Vocabulary, tgt_vocab: Vocabulary,
                    seed=None, extra=None):
    for v in (src_vocab, tgt_vocab):
        if v.mode != model.config.mode:
            raise CheckpointError(f"vocabulary mode {v.mode!r} != model mode {model.config.mode!r}")
    tensors, chunks, offset = [], [], 0
    for name, t in model.params.items():
        raw = np.ascontiguousarray(t.data, dtype="<f8").tobytes()
        tensors.append({"name": name, "shape": list(t.shape), "offset": offset, "nbytes": len(raw)})
        chunks.append(raw)
        offset += len(raw)
    header = {
        "config": asdict(model.config),
        "src_vocab_size": model.src_vocab_size,
        "tgt_vocab_size": model.tgt_vocab_size,
        "vocabularies": {"input": src_vocab.to_json(), "output": tgt_vocab.to_json()},
        "init_scheme": INIT_SCHEME,
        "seed": seed,
        "dtype": "<f8",
        "tensors": tensors,
        "extra": extra or {},
    }
    hbytes = json.dumps(header, ensure_ascii=False, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<Q", len(hbytes)))
        fh.write(hbytes)
        for c in chunks:
            fh.write(c)


def _read(buf, pos, n, field):
    if pos + n > len(buf):
        raise CheckpointError(f"truncated checkpoint while reading {field}")
    return buf[pos:pos + n], pos + n


def load_checkpoint(path, expected_mode=None) -> Checkpoint:
    with open(path, "rb") as fh:
        buf = fh.read()
    magic, pos = _read(buf, 0, len(MAGIC), "magic")
    if magic != MAGIC:
        raise CheckpointError("bad magic: not a d2tnlg checkpoint")
    raw, pos = _read(buf, pos, 4, "version")
    (version,) = struct.unpack("<I", raw)
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported version {version} (expected {FORMAT_VERSION})")
    raw, pos = _read(buf, pos, 8, "header_len")
    (hlen,) = struct.unpack("<Q", raw)
    raw, pos = _read(buf, pos, hlen, "header")
    try:
        header = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"corrupt header: {exc}") from None
    for key in ("config", "vocabularies", "tensors", "src_vocab_size", "tgt_vocab_size"):
        if key not in header:
            raise CheckpointError(f"header lacks field {key!r}")
    config = ModelConfig(**header["config"])
    if expected_mode is not None and config.mode != expected_mode:
        raise CheckpointError(f"checkpoint mode {config.mode!r} != requested mode {expected_mode!r}")
    payload = buf[pos:]
    store = ParameterStore()
    for entry in header["tensors"]:
        start, n = entry["offset"], entry["nbytes"]
        count = int(np.prod(entry["shape"])) if entry["shape"] else 1
        if n != 8 * count:
            raise CheckpointError(f"tensor {entry['name']}: byte size {n} does not match shape {entry['shape']}")
        if start + n > len(payload):
            raise CheckpointError(f"truncated checkpoint while reading tensor {entry['name']}")
        arr = np.frombuffer(payload, dtype="<f8", count=count, offset=start).reshape(entry["shape"])
        store.add(entry["name"], arr.astype(np.float64))
    vocabs = header["vocabularies"]
    src_vocab = Vocabulary.from_json(vocabs["input"])
    tgt_vocab = Vocabulary.from_json(vocabs["output"])
    model = Seq2Seq(config, header["src_vocab_size"], header["tgt_vocab_size"], store=store)
    return Checkpoint(model, src_vocab, tgt_vocab, header.get("seed"), header.get("extra"))
