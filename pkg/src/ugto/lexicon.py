"""Word-level lexicon: entity tokens, generic modifiers and trigger words.

A lexicon directory holds optional one-word-per-line files::

    entity_tokens.per.txt  entity_tokens.loc.txt  entity_tokens.misc.txt
    modifiers.generic.txt
    triggers.per.txt  triggers.loc.txt  triggers.org.txt  triggers.misc.txt

Lines starting with ``#`` are comments.  Missing files give empty sets.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import LexiconError

ENTITY_CATEGORIES = ("PER", "LOC", "MISC")
TRIGGER_CATEGORIES = ("PER", "LOC", "ORG", "MISC")


@dataclass(frozen=True)
class Lexicon:
    entity_tokens: dict = field(default_factory=dict)
    generic_modifiers: frozenset = frozenset()
    triggers: dict = field(default_factory=dict)

    def __post_init__(self):
        et = {c: frozenset(self.entity_tokens.get(c, ())) for c in ENTITY_CATEGORIES}
        extra = set(self.entity_tokens) - set(ENTITY_CATEGORIES)
        if extra:
            raise LexiconError(f"unsupported entity-token categories: {sorted(extra)}")
        tr = {c: frozenset(self.triggers.get(c, ())) for c in TRIGGER_CATEGORIES}
        extra = set(self.triggers) - set(TRIGGER_CATEGORIES)
        if extra:
            raise LexiconError(f"unsupported trigger categories: {sorted(extra)}")
        object.__setattr__(self, "entity_tokens", et)
        object.__setattr__(self, "triggers", tr)
        object.__setattr__(self, "generic_modifiers", frozenset(self.generic_modifiers))
        object.__setattr__(self, "_all_entity", frozenset().union(*et.values()))
        object.__setattr__(
            self, "_nonper_triggers", tr["LOC"] | tr["ORG"] | tr["MISC"]
        )

    @property
    def all_entity_tokens(self) -> frozenset:
        return self._all_entity

    @property
    def nonper_triggers(self) -> frozenset:
        return self._nonper_triggers

    def without_entity_tokens(self, categories) -> "Lexicon":
        """Copy with the entity tokens of ``categories`` removed."""
        drop = {c.upper() for c in categories}
        unknown = drop - set(ENTITY_CATEGORIES)
        if unknown:
            raise LexiconError(f"cannot drop unknown categories {sorted(unknown)}")
        et = {c: (frozenset() if c in drop else s) for c, s in self.entity_tokens.items()}
        return Lexicon(et, self.generic_modifiers, self.triggers)

    def files(self) -> dict[str, list[str]]:
        """File name to sorted word list, the on-disk form of this lexicon."""
        out = {}
        for c in ENTITY_CATEGORIES:
            out[f"entity_tokens.{c.lower()}.txt"] = sorted(self.entity_tokens[c])
        out["modifiers.generic.txt"] = sorted(self.generic_modifiers)
        for c in TRIGGER_CATEGORIES:
            out[f"triggers.{c.lower()}.txt"] = sorted(self.triggers[c])
        return out


@dataclass(frozen=True)
class WordMatch:
    is_entity_token: bool
    entity_token_categories: frozenset
    is_generic: bool
    trigger_categories: frozenset
    is_hyphen_entity: bool


def _read_words(path: Path) -> set[str]:
    words = set()
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if any(c.isspace() for c in line):
                raise LexiconError(f"{path}:{lineno}: lexicon entries must be single words, got {line!r}")
            words.add(line)
    return words


def load_lexicon(directory) -> Lexicon:
    d = Path(directory)
    if not d.is_dir():
        raise LexiconError(f"lexicon directory not found: {d}")

    def read(name):
        p = d / name
        return _read_words(p) if p.exists() else set()

    et = {c: read(f"entity_tokens.{c.lower()}.txt") for c in ENTITY_CATEGORIES}
    tr = {c: read(f"triggers.{c.lower()}.txt") for c in TRIGGER_CATEGORIES}
    return Lexicon(et, read("modifiers.generic.txt"), tr)


def save_lexicon(lex: Lexicon, directory) -> None:
    os.makedirs(directory, exist_ok=True)
    for name, words in lex.files().items():
        with open(os.path.join(directory, name), "w", encoding="utf-8", newline="\n") as f:
            f.writelines(w + "\n" for w in words)


def starter_lexicon() -> Lexicon:
    """The small lexicon bundled with the package."""
    with resources.as_file(resources.files("ugto") / "data" / "lexicon") as d:
        return load_lexicon(d)


def hyphen_pieces(w: str) -> list[str]:
    return [p for p in w.split("-") if p]


def match_word(lex: Lexicon, w: str) -> WordMatch:
    cats = frozenset(c for c in ENTITY_CATEGORIES if w in lex.entity_tokens[c])
    hyphen = "-" in w and any(p in lex.all_entity_tokens for p in hyphen_pieces(w))
    return WordMatch(
        is_entity_token=bool(cats),
        entity_token_categories=cats,
        is_generic=w in lex.generic_modifiers,
        trigger_categories=frozenset(c for c in TRIGGER_CATEGORIES if w in lex.triggers[c]),
        is_hyphen_entity=hyphen,
    )
