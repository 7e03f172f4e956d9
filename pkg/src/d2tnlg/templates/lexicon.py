"""E2E attribute-value lexicon shared by the template realiser and the reranker.

File format: UTF-8, one ``attribute TAB value TAB variant|variant|...`` triple
per line; ``#`` starts a comment line.
"""

from __future__ import annotations

import itertools
from importlib import resources

from ..corpus.mr import E2E, E2E_ATTRIBUTES, MeaningRepresentation


class LexiconError(ValueError):
    pass


class AttributeLexicon:
    def __init__(self, entries=()):
        # attribute -> {value: (variants...)}
        self.entries: dict[str, dict[str, tuple]] = {a: {} for a in E2E_ATTRIBUTES}
        for attr, value, variants in entries:
            self.add(attr, value, variants)

    def add(self, attr, value, variants):
        if attr not in self.entries:
            raise LexiconError(f"unknown attribute {attr!r}")
        variants = tuple(v.strip() for v in variants if v.strip())
        if not variants:
            raise LexiconError(f"{attr}={value!r} has no surface variants")
        self.entries[attr][value] = variants

    def values(self, attr):
        return list(self.entries[attr])

    def variants(self, attr, value):
        """Surface variants; unknown values (e.g. raw names) match verbatim."""
        return self.entries[attr].get(value, (value,))

    def knows(self, attr, value):
        return value in self.entries[attr]

    def validate(self):
        missing = [a for a in E2E_ATTRIBUTES if not self.entries[a]]
        if missing:
            raise LexiconError(f"lexicon lacks attributes: {', '.join(missing)}")
        return self

    @classmethod
    def parse(cls, text, source="<lexicon>"):
        lex = cls()
        for n, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise LexiconError(f"{source}:{n}: expected attribute, value, variants separated by tabs")
            attr, value, variants = (p.strip() for p in parts)
            lex.add(attr, value, variants.split("|"))
        return lex.validate()

    @classmethod
    def load(cls, path=None):
        if path is None:
            text = resources.files("d2tnlg.templates").joinpath("data/lexicon.tsv").read_text("utf-8")
            return cls.parse(text, "lexicon.tsv")
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read(), str(path))

    def dump(self):
        lines = []
        for attr in E2E_ATTRIBUTES:
            for value, variants in self.entries[attr].items():
                lines.append(f"{attr}\t{value}\t{'|'.join(variants)}")
        return "\n".join(lines) + "\n"


_default = None


def default_lexicon() -> AttributeLexicon:
    global _default
    if _default is None:
        _default = AttributeLexicon.load()
    return _default


def lexicon_product(lexicon: AttributeLexicon | None = None):
    """Every MR over the lexicon: name and eatType always present, each other
    attribute either absent or set to one of its values."""
    lexicon = lexicon or default_lexicon()
    choices = []
    for attr in E2E_ATTRIBUTES:
        vals = lexicon.values(attr)
        if attr in ("name", "eatType"):
            choices.append([(attr, v) for v in vals])
        else:
            choices.append([None] + [(attr, v) for v in vals])
    for combo in itertools.product(*choices):
        yield MeaningRepresentation(E2E, tuple(s for s in combo if s is not None))
