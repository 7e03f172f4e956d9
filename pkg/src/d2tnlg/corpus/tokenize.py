"""Rule-based Penn-Treebank-style word tokenizer and character splitting.

Rules, in order:

* double quotes become separate tokens;
* ``, ; : @ # $ % & ? ! ( ) [ ] { } < >`` are split off, except commas and
  colons between digits (``1,000``, ``12:30``);
* ``...`` is one token;
* a period is split off when it ends a word that is followed by whitespace,
  a closing bracket/quote, or the end of the text (``e.g.``-style words with
  an inner period keep theirs);
* clitics split at the apostrophe: ``n't``, ``'s``, ``'re``, ``'ve``,
  ``'ll``, ``'d``, ``'m``;
* hyphenated words and placeholders such as ``AGENT-1`` stay whole.
"""

from __future__ import annotations

import re

_RULES = [
    (re.compile(r'"'), r' " '),
    (re.compile(r"\.\.\."), r" ... "),
    (re.compile(r"([;@#$%&?!\[\](){}<>])"), r" \1 "),
    (re.compile(r"(?<!\d),|,(?!\d)"), r" , "),
    (re.compile(r"(?<!\d):|:(?!\d)"), r" : "),
    (re.compile(r"(?i)(\w)(n't)\b"), r"\1 \2"),
    (re.compile(r"(?i)(\w)('s|'re|'ve|'ll|'d|'m)\b"), r"\1 \2"),
]

_FINAL_PERIOD = re.compile(r"^(.*[^.])\.$")


def word_tokenize(text: str) -> list:
    for pat, rep in _RULES:
        text = pat.sub(rep, text)
    tokens = []
    for tok in text.split():
        m = _FINAL_PERIOD.match(tok)
        if m and tok != "..." and "." not in m.group(1):
            tokens.extend([m.group(1), "."])
        else:
            tokens.append(tok)
    return tokens


def char_tokenize(text: str) -> list:
    return list(text)


_NO_SPACE_BEFORE = {".", ",", "!", "?", ";", ":", ")", "]", "}", "n't", "'s", "'re", "'ve", "'ll", "'d", "'m"}
_NO_SPACE_AFTER = {"(", "[", "{"}


def detokenize(tokens) -> str:
    """Join tokens back into plain text (inverse of the tokenizer's splits)."""
    out = []
    for tok in tokens:
        if out and tok not in _NO_SPACE_BEFORE and out[-1] not in _NO_SPACE_AFTER:
            out.append(" ")
        out.append(tok)
    return "".join(out)
