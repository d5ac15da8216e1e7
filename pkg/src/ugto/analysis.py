"""Corpus characteristic reports: uncommon-word coverage and POS makeup of entities."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .corpus import Corpus, concat
from .errors import UsageError
from .induction import check_threshold, count_words, word_rate


@dataclass(frozen=True)
class UncommonReport:
    threshold: float
    percentages: dict  # set name -> percent of entities with an uncommon word
    entity_counts: dict

    def format_table(self) -> str:
        names = list(self.percentages)
        head = "".join(f"{n:>10}" for n in names)
        row = "".join(f"{self.percentages[n]:10.2f}" for n in names)
        return f"t={self.threshold}\n{head}\n{row}"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["set", "threshold", "entities", "percent_with_uncommon"])
        for n, p in self.percentages.items():
            w.writerow([n, self.threshold, self.entity_counts[n], f"{p:.2f}"])
        return buf.getvalue()


@dataclass(frozen=True)
class PosRow:
    pos: str
    p_entity: float
    p_text: float
    in_entity: int
    total: int


@dataclass(frozen=True)
class PosReport:
    rows: tuple

    def get(self, pos: str) -> PosRow:
        for r in self.rows:
            if r.pos == pos:
                return r
        raise KeyError(pos)

    def format_table(self, top: int | None = None) -> str:
        rows = self.rows[:top] if top else self.rows
        lines = [f"{'POS':<8}{'P_entity':>10}{'P_text':>10}"]
        lines += [f"{r.pos:<8}{r.p_entity:10.2f}{r.p_text:10.2f}" for r in rows]
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pos", "p_entity", "p_text", "in_entity", "total"])
        for r in self.rows:
            w.writerow([r.pos, f"{r.p_entity:.2f}", f"{r.p_text:.2f}", r.in_entity, r.total])
        return buf.getvalue()


def uncommon_entity_percentage(corpus: Corpus, t: float) -> tuple[float, int]:
    """Percent of gold entities holding a word whose rate within ``corpus`` is >= t."""
    counts = count_words(corpus)
    hits = total = 0
    for s in corpus.sentences:
        for span in s.entities:
            total += 1
            if any(word_rate(counts, s.tokens[i].surface) >= t for i in range(span.start, span.end)):
                hits += 1
    return (100.0 * hits / total if total else 0.0), total


def uncommon_report(corpora: Corpus | Sequence[Corpus], t: float = 1.0,
                    scope: str = "entire") -> UncommonReport:
    """Rates are recomputed inside each reported set.

    ``scope="entire"`` pools every given corpus; ``"per-split"`` reports each
    one separately, keyed by its split name.
    """
    t = check_threshold(t)
    if isinstance(corpora, Corpus):
        corpora = [corpora]
    corpora = list(corpora)
    for c in corpora:
        if not c.labeled:
            raise UsageError("uncommon_report needs labeled corpora")
    sets: dict[str, Corpus] = {}
    if scope == "entire":
        sets["entire"] = concat(corpora)
    elif scope == "per-split":
        for c in corpora:
            name = c.split
            k = 2
            while name in sets:
                name = f"{c.split}{k}"
                k += 1
            sets[name] = c
    else:
        raise UsageError(f"unknown scope {scope!r}")
    pct, n = {}, {}
    for name, c in sets.items():
        pct[name], n[name] = uncommon_entity_percentage(c, t)
    return UncommonReport(t, pct, n)


def pos_report(corpus: Corpus | Sequence[Corpus]) -> PosReport:
    if not isinstance(corpus, Corpus):
        corpus = concat(list(corpus))
    if not corpus.labeled:
        raise UsageError("pos_report needs a labeled corpus")
    inside: Counter = Counter()
    overall: Counter = Counter()
    for s in corpus.sentences:
        for tok, ent in zip(s.tokens, s.entity_mask()):
            overall[tok.pos] += 1
            if ent:
                inside[tok.pos] += 1
    n_inside = sum(inside.values())
    rows = [
        PosRow(pos, 100.0 * inside[pos] / n_inside if n_inside else 0.0,
               100.0 * inside[pos] / overall[pos], inside[pos], overall[pos])
        for pos in overall
    ]
    rows.sort(key=lambda r: (-r.p_entity, r.pos))
    return PosReport(tuple(rows))
