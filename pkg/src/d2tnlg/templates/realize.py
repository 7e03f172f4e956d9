"""The two restaurant-description templates.

Template 1 opens with "NAME is a ... EATTYPE" and mentions the rating before
the location (joined by "and"); Template 2 opens with "The ... EATTYPE NAME"
and puts the location sentence before the rating sentence. Optional
attributes that are absent from the MR are simply left out.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from ..corpus.mr import E2E, MeaningRepresentation
from .lexicon import AttributeLexicon, LexiconError, default_lexicon


class TemplateId(str, Enum):
    T1 = "T1"
    T2 = "T2"


_NUMERIC_RATING = re.compile(r"\d+ out of \d+")


def rating_phrase(value):
    if _NUMERIC_RATING.fullmatch(value):
        return f"customer rating of {value}"
    return f"{value} customer rating"


def _article(phrase):
    return "an" if phrase[:1].lower() in "aeiou" else "a"


@dataclass(frozen=True)
class _Parts:
    name: str
    eat: str
    adjective: str
    serves: str  # "Chinese food in the low price range" or ""
    rating: str
    location: str
    not_family_friendly: bool


def _parts(mr: MeaningRepresentation, lexicon: AttributeLexicon) -> _Parts:
    if mr.kind != E2E:
        raise ValueError("templates realise E2E MRs only")
    d = mr.as_dict()
    if not d.get("name") or not d.get("eatType"):
        raise ValueError("template realisation needs both name and eatType")
    for attr, value in d.items():
        if attr not in ("name", "near") and not lexicon.knows(attr, value):
            raise LexiconError(f"value {value!r} of {attr} is not in the lexicon")
    ff = d.get("familyFriendly")
    food, price = d.get("food"), d.get("priceRange")
    serves = ""
    if food or price:
        serves = f"{food} food" if food else "food"
        if price:
            serves += f" in the {price} price range"
    area, near = d.get("area"), d.get("near")
    location = ""
    if area:
        location = f"located in the {area} area" + (f", near {near}" if near else "")
    elif near:
        location = f"located near {near}"
    rating = rating_phrase(d["customerRating"]) if d.get("customerRating") else ""
    return _Parts(d["name"], d["eatType"], "family-friendly " if ff == "yes" else "", serves,
                  rating, location, ff == "no")


def realize(template, mr: MeaningRepresentation, lexicon: AttributeLexicon | None = None) -> str:
    """Render ``mr`` with Template 1 or 2 (natural casing; lowercase downstream)."""
    template = TemplateId(template)
    p = _parts(mr, lexicon or default_lexicon())
    sentences = []
    if template is TemplateId.T1:
        first = f"{p.name} is a {p.adjective}{p.eat}"
        if p.serves:
            first += f" which serves {p.serves}"
        sentences.append(first + ".")
        if p.rating and p.location:
            sentences.append(f"It has {_article(p.rating)} {p.rating} and is {p.location}.")
        elif p.rating:
            sentences.append(f"It has {_article(p.rating)} {p.rating}.")
        elif p.location:
            sentences.append(f"It is {p.location}.")
    else:
        sentences.append(f"The {p.adjective}{p.eat} {p.name} serves {p.serves or 'food'}.")
        if p.location:
            sentences.append(f"It is {p.location}.")
        if p.rating:
            sentences.append(f"It has {_article(p.rating)} {p.rating}.")
    if p.not_family_friendly:
        sentences.append("It is not family-friendly.")
    return " ".join(sentences)
