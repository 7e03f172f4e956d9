"""Meaning representations: E2E attribute-value slots and WebNLG triples."""

from __future__ import annotations

import re
from dataclasses import dataclass

E2E, WEBNLG = "e2e", "webnlg"

E2E_ATTRIBUTES = ("name", "eatType", "food", "priceRange", "customerRating", "area", "familyFriendly", "near")

# surface names used when serialising (lowercased, as in the dataset files)
E2E_SURFACE = {
    "name": "name",
    "eatType": "eattype",
    "food": "food",
    "priceRange": "pricerange",
    "customerRating": "customer rating",
    "area": "area",
    "familyFriendly": "familyfriendly",
    "near": "near",
}

_CANON = {a.lower(): a for a in E2E_ATTRIBUTES}

PLACEHOLDER_RE = re.compile(r"\b(?:NAME|NEAR|(?:AGENT|PATIENT|BRIDGE)-\d+)\b")


class MRParseError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class MeaningRepresentation:
    kind: str
    slots: tuple

    def __post_init__(self):
        if self.kind not in (E2E, WEBNLG):
            raise ValueError(f"unknown MR kind {self.kind!r}")
        object.__setattr__(self, "slots", tuple(tuple(s) for s in self.slots))
        if not self.slots:
            raise ValueError("empty meaning representation")
        if self.kind == E2E:
            seen = set()
            for slot in self.slots:
                if len(slot) != 2:
                    raise ValueError(f"E2E slot must be (attribute, value): {slot!r}")
                if slot[0] not in E2E_ATTRIBUTES:
                    raise ValueError(f"unknown E2E attribute {slot[0]!r}")
                if slot[0] in seen:
                    raise ValueError(f"duplicate attribute {slot[0]!r}")
                seen.add(slot[0])
        else:
            for slot in self.slots:
                if len(slot) != 3:
                    raise ValueError(f"WebNLG slot must be (subject, property, object): {slot!r}")

    @classmethod
    def e2e(cls, pairs):
        if isinstance(pairs, dict):
            pairs = pairs.items()
        return cls(E2E, tuple(pairs))

    @classmethod
    def webnlg(cls, triples):
        return cls(WEBNLG, tuple(triples))

    def as_dict(self):
        if self.kind != E2E:
            raise TypeError("as_dict() only applies to E2E MRs")
        return dict(self.slots)

    def get(self, attribute, default=None):
        return self.as_dict().get(attribute, default)

    def __len__(self):
        return len(self.slots)


def canonical_attribute(raw, offset=0):
    key = re.sub(r"\s+", "", raw).lower()
    if key not in _CANON:
        raise MRParseError(f"unknown attribute {raw.strip()!r}", offset)
    return _CANON[key]


def parse_e2e_mr(text: str) -> MeaningRepresentation:
    """Parse ``attr[value], attr[value], ...`` into an E2E MR (source order)."""
    slots = []
    seen = set()
    pos, n = 0, len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        lb = text.find("[", pos)
        if lb < 0:
            raise MRParseError("expected '['", pos)
        rb = text.find("]", lb)
        if rb < 0:
            raise MRParseError("unclosed '['", lb)
        if "[" in text[lb + 1:rb]:
            raise MRParseError("nested '['", lb)
        attr = canonical_attribute(text[pos:lb], pos)
        if attr in seen:
            raise MRParseError(f"duplicate attribute {attr!r}", pos)
        seen.add(attr)
        slots.append((attr, text[lb + 1:rb].strip()))
        pos = rb + 1
        while pos < n and text[pos].isspace():
            pos += 1
        if pos < n:
            if text[pos] != ",":
                raise MRParseError("expected ',' between slots", pos)
            pos += 1
    if not slots:
        raise MRParseError("empty meaning representation", 0)
    return MeaningRepresentation(E2E, tuple(slots))


def lowercase_keep_placeholders(text: str) -> str:
    """Lowercase everything except delexicalisation placeholders."""
    out, last = [], 0
    for m in PLACEHOLDER_RE.finditer(text):
        out.append(text[last:m.start()].lower())
        out.append(m.group(0))
        last = m.end()
    out.append(text[last:].lower())
    return "".join(out)


def serialize_input(mr: MeaningRepresentation) -> str:
    """Lowercased bracketed input string.

    E2E: ``name[x], customer rating [y], ...`` (a space precedes the bracket
    only for attribute names that contain one). WebNLG:
    ``property(subject[object]), ...``.
    """
    if not mr.slots:
        raise ValueError("serialize_input: empty MR")
    if mr.kind == E2E:
        parts = []
        for attr, value in mr.slots:
            surf = E2E_SURFACE[attr]
            sep = " " if " " in surf else ""
            parts.append(f"{surf}{sep}[{value}]")
    else:
        parts = [f"{p}({s}[{o}])" for s, p, o in mr.slots]
    return lowercase_keep_placeholders(", ".join(parts))


def parse_webnlg_input(text: str) -> MeaningRepresentation:
    """Inverse of :func:`serialize_input` for WebNLG strings."""
    triples = []
    for m in re.finditer(r"\s*([^,(]+?)\(([^\[]*)\[([^\]]*)\]\)\s*(?:,|$)", text):
        triples.append((m.group(2), m.group(1), m.group(3)))
    if not triples:
        raise MRParseError("no triples found", 0)
    return MeaningRepresentation(WEBNLG, tuple(triples))
