"""Uncommon-word induction from entity/common-text occurrence rates.

The rate of a word is ``f_entity / (f_entity + f_common)`` where the
counts are its occurrences inside and outside gold spans.  Words whose
rate reaches the threshold form the list L; at tagging time a word is
also uncommon when it never occurred in the training common text.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .corpus import Corpus
from .errors import ConfigError, UndefinedRateError, UsageError


@dataclass
class WordCounts:
    f_entity: Counter = field(default_factory=Counter)
    f_common: Counter = field(default_factory=Counter)
    case_sensitive: bool = True

    def merge(self, other: "WordCounts") -> "WordCounts":
        return WordCounts(self.f_entity + other.f_entity, self.f_common + other.f_common,
                          self.case_sensitive)

    def words(self) -> set[str]:
        return set(self.f_entity) | set(self.f_common)

    def total(self) -> int:
        return sum(self.f_entity.values()) + sum(self.f_common.values())


@dataclass(frozen=True)
class InductionModel:
    uncommon_list: frozenset[str]
    common_vocab: frozenset[str]
    threshold: float


def count_words(corpus: Corpus, case_sensitive: bool = True) -> WordCounts:
    if not corpus.labeled:
        raise UsageError("count_words needs a labeled corpus")
    counts = WordCounts(case_sensitive=case_sensitive)
    for sent in corpus.sentences:
        inside = sent.entity_mask()
        for tok, ent in zip(sent.tokens, inside):
            w = tok.surface if case_sensitive else tok.surface.lower()
            if ent:
                counts.f_entity[w] += 1
            else:
                counts.f_common[w] += 1
    return counts


def word_rate(counts: WordCounts, w: str) -> float:
    e = counts.f_entity.get(w, 0)
    c = counts.f_common.get(w, 0)
    if e + c == 0:
        raise UndefinedRateError(f"word {w!r} never occurs; its rate is undefined")
    return e / (e + c)


def check_threshold(t: float) -> float:
    t = float(t)
    if not 0.0 < t <= 1.0:
        raise ConfigError(f"threshold t must lie in (0, 1], got {t}")
    return t


def uncommon_words(counts: WordCounts, t: float) -> set[str]:
    """Words seen in entities whose rate is at least ``t``."""
    return {w for w in counts.f_entity if counts.f_entity[w] > 0 and word_rate(counts, w) >= t}


def induce_uncommon_list(train: Corpus, t: float = 1.0) -> InductionModel:
    t = check_threshold(t)
    counts = count_words(train)
    common = frozenset(w for w, n in counts.f_common.items() if n > 0)
    return InductionModel(frozenset(uncommon_words(counts, t)), common, t)


def is_uncommon(w: str, model: InductionModel) -> bool:
    return w in model.uncommon_list or w not in model.common_vocab
