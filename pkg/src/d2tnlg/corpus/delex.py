"""Delexicalisation of open-class values and the inverse relexicalisation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .mr import E2E, WEBNLG, PLACEHOLDER_RE, MeaningRepresentation

E2E_NAME_NEAR = "e2e_name_near"
WEBNLG_ROLES = "webnlg_roles"

UNIT_SEP = "\x1f"


@dataclass
class DelexRecord:
    strategy: str
    mapping: dict = field(default_factory=dict)  # placeholder -> original surface string
    replacements: int = 0

    def encode(self):
        return UNIT_SEP.join(f"{k}={v}" for k, v in self.mapping.items())

    @classmethod
    def decode(cls, text, strategy=""):
        mapping = {}
        for item in filter(None, text.split(UNIT_SEP)):
            key, _, value = item.partition("=")
            mapping[key] = value
        return cls(strategy, mapping)


def _boundary_pattern(values):
    """Alternation of values, longest first, matching whole words only."""
    alts = sorted({v for v in values if v}, key=lambda v: (-len(v), v))
    if not alts:
        return None
    return re.compile(r"(?<!\w)(" + "|".join(re.escape(v) for v in alts) + r")(?!\w)", re.IGNORECASE)


def replace_values(text, value_to_placeholder):
    """Replace every case-insensitive whole-word occurrence; longest match wins,
    overlaps resolve left to right. Returns ``(new_text, count)``.

    A value that already is its own placeholder is left alone, otherwise the
    ordinary word ``near`` would be rewritten when the MR says ``near[NEAR]``.
    """
    value_to_placeholder = {k: v for k, v in value_to_placeholder.items() if k != v}
    pat = _boundary_pattern(value_to_placeholder)
    if pat is None:
        return text, 0
    lookup = {k.lower(): v for k, v in value_to_placeholder.items()}
    return pat.subn(lambda m: lookup[m.group(1).lower()], text)


def relexicalize(text, record: DelexRecord):
    if not record.mapping:
        return text
    return PLACEHOLDER_RE.sub(lambda m: record.mapping.get(m.group(0), m.group(0)), text)


def delex_e2e(mr: MeaningRepresentation, text: str):
    """Replace the name and near values by NAME / NEAR in the MR and the text."""
    if mr.kind != E2E:
        raise ValueError("delex_e2e needs an E2E MR")
    placeholders = {"name": "NAME", "near": "NEAR"}
    record = DelexRecord(E2E_NAME_NEAR)
    value_map = {}
    slots = []
    for attr, value in mr.slots:
        if attr in placeholders and value:
            ph = placeholders[attr]
            record.mapping[ph] = value
            value_map[value] = ph
            slots.append((attr, ph))
        else:
            slots.append((attr, value))
    new_text, n = replace_values(text, value_map)
    record.replacements = n
    return MeaningRepresentation(E2E, tuple(slots)), new_text, record


def webnlg_roles(mr: MeaningRepresentation):
    """Placeholder per entity: AGENT (subject only), PATIENT (object only),
    BRIDGE (both); numbered per role in order of first appearance in the
    serialised input (subject before object within a triple)."""
    subjects = {s.lower() for s, _, _ in mr.slots}
    objects = {o.lower() for _, _, o in mr.slots}
    counters = {"AGENT": 0, "PATIENT": 0, "BRIDGE": 0}
    assigned = {}
    for s, _, o in mr.slots:
        for ent in (s, o):
            key = ent.lower()
            if key in assigned:
                continue
            if key in subjects and key in objects:
                role = "BRIDGE"
            elif key in subjects:
                role = "AGENT"
            else:
                role = "PATIENT"
            counters[role] += 1
            assigned[key] = (f"{role}-{counters[role]}", ent)
    return assigned


def delex_webnlg(mr: MeaningRepresentation, text: str):
    if mr.kind != WEBNLG:
        raise ValueError("delex_webnlg needs a WebNLG MR")
    assigned = webnlg_roles(mr)
    record = DelexRecord(WEBNLG_ROLES)
    value_map = {}
    for ph, original in assigned.values():
        record.mapping[ph] = original
        value_map[original] = ph
    slots = tuple((assigned[s.lower()][0], p, assigned[o.lower()][0]) for s, p, o in mr.slots)
    new_text, n = replace_values(text, value_map)
    record.replacements = n
    return MeaningRepresentation(WEBNLG, slots), new_text, record
