"""UGTO tags: rule-based pre-tags, supervision labels and span extraction.

Tags describe the constituent a word plays in an entity: ``U`` uncommon
word or entity token, ``G`` generic modifier, ``T`` trigger word and
``O`` outside.  Pre-tags add ``TP`` for person triggers.  Labels may carry
the entity type as a suffix (``U-ORG``).
"""

from __future__ import annotations

from typing import Sequence

from .corpus import EntitySpan, Sentence
from .induction import InductionModel, is_uncommon
from .lexicon import Lexicon, match_word

PRETAGS = ("U", "G", "T", "TP", "O")
LABEL_BASES = ("U", "G", "T", "O")
UNTYPED_ENTITY = "ENT"


def is_proper_noun(pos: str) -> bool:
    return pos.startswith("NNP")


def pretag_word(word: str, pos: str, ind: InductionModel, lex: Lexicon) -> str:
    m = match_word(lex, word)
    if is_uncommon(word, ind) and (is_proper_noun(pos) or m.is_entity_token or m.is_hyphen_entity):
        return "U"
    if "PER" in m.trigger_categories:
        return "TP"
    if word in lex.nonper_triggers:
        return "T"
    if m.is_generic:
        return "G"
    return "O"


def pretag_sentence(s: Sentence, ind: InductionModel, lex: Lexicon) -> list[str]:
    return [pretag_word(t.surface, t.pos, ind, lex) for t in s.tokens]


def label_base(word: str, pos: str, ind: InductionModel, lex: Lexicon) -> str:
    """Base tag for a word known to lie inside an entity.

    Trigger words win over the uncommon/proper-noun test: capitalized
    triggers such as "Department" or "Cup" are tagged NNP and would
    otherwise never be labeled T.
    """
    if word in lex.nonper_triggers:
        return "T"
    m = match_word(lex, word)
    if word in ind.uncommon_list or is_proper_noun(pos) or m.is_entity_token or m.is_hyphen_entity:
        return "U"
    return "G"


def label_sentence(s: Sentence, ind: InductionModel, lex: Lexicon, typed: bool = True) -> list[str]:
    out = []
    for tok, etype in zip(s.tokens, s.covering_types()):
        if etype is None:
            out.append("O")
            continue
        base = label_base(tok.surface, tok.pos, ind, lex)
        out.append(f"{base}-{etype}" if typed else base)
    return out


def split_label(tag: str) -> tuple[str, str | None]:
    base, _, etype = tag.partition("-")
    if base not in LABEL_BASES:
        raise ValueError(f"not a UGTO label: {tag!r}")
    if base == "O":
        if etype:
            raise ValueError(f"O label cannot carry a type: {tag!r}")
        return base, None
    return base, etype or None


def extract_entities(tags: Sequence[str]) -> list[EntitySpan]:
    """Group adjacent non-O tags into spans.

    Typed tags split on a change of type; untyped tags form one span per
    maximal non-O run and get the type ``ENT``.
    """
    spans = []
    start, cur = None, None
    for i, tag in enumerate(tags):
        base, etype = split_label(tag)
        etype = etype or UNTYPED_ENTITY
        if base == "O":
            if start is not None:
                spans.append(EntitySpan(start, i, cur))
            start, cur = None, None
        elif start is None or etype != cur:
            if start is not None:
                spans.append(EntitySpan(start, i, cur))
            start, cur = i, etype
    if start is not None:
        spans.append(EntitySpan(start, len(tags), cur))
    return spans
