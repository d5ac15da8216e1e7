"""Entity-level precision, recall and F1 with exact span matching."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Corpus, EntitySpan
from .errors import UsageError

MODES = ("extraction", "recognition")
_COLLAPSED = "ENT"


@dataclass(frozen=True)
class Counts:
    num_gold: int = 0
    num_pred: int = 0
    num_correct: int = 0

    @property
    def precision(self) -> float:
        return self.num_correct / self.num_pred if self.num_pred else 0.0

    @property
    def recall(self) -> float:
        return self.num_correct / self.num_gold if self.num_gold else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


@dataclass(frozen=True)
class ScoreReport:
    counts: Counts
    mode: str
    per_type: dict = field(default_factory=dict)

    @property
    def precision(self) -> float:
        return self.counts.precision

    @property
    def recall(self) -> float:
        return self.counts.recall

    @property
    def f1(self) -> float:
        return self.counts.f1

    def as_dict(self) -> dict:
        def row(c: Counts):
            return {"precision": c.precision, "recall": c.recall, "f1": c.f1,
                    "num_gold": c.num_gold, "num_pred": c.num_pred, "num_correct": c.num_correct}
        out = {"mode": self.mode, **row(self.counts)}
        if self.per_type:
            out["per_type"] = {t: row(c) for t, c in sorted(self.per_type.items())}
        return out

    def format_table(self) -> str:
        lines = [f"{'type':<12}{'P':>8}{'R':>8}{'F1':>8}{'gold':>8}{'pred':>8}{'correct':>9}"]

        def fmt(name, c):
            return (f"{name:<12}{100 * c.precision:8.2f}{100 * c.recall:8.2f}{100 * c.f1:8.2f}"
                    f"{c.num_gold:8d}{c.num_pred:8d}{c.num_correct:9d}")
        for t, c in sorted(self.per_type.items()):
            lines.append(fmt(t, c))
        lines.append(fmt("overall", self.counts))
        return "\n".join(lines)


def score(gold: Sequence[Sequence[EntitySpan]], pred: Sequence[Sequence[EntitySpan]],
          mode: str = "extraction") -> ScoreReport:
    """Score predicted spans against gold spans sentence by sentence.

    Extraction mode ignores entity types by mapping every span to one type
    and then scoring exactly as recognition mode does.
    """
    if mode not in MODES:
        raise UsageError(f"unknown scoring mode {mode!r}")
    if len(gold) != len(pred):
        raise UsageError(f"{len(gold)} gold sentences but {len(pred)} predicted")
    gold_n: Counter = Counter()
    pred_n: Counter = Counter()
    correct_n: Counter = Counter()
    for g_spans, p_spans in zip(gold, pred):
        g = {_key(s, mode) for s in g_spans}
        p = {_key(s, mode) for s in p_spans}
        for k in g:
            gold_n[k[2]] += 1
        for k in p:
            pred_n[k[2]] += 1
        for k in g & p:
            correct_n[k[2]] += 1
    total = Counts(sum(gold_n.values()), sum(pred_n.values()), sum(correct_n.values()))
    per_type = {}
    if mode == "recognition":
        per_type = {t: Counts(gold_n[t], pred_n[t], correct_n[t]) for t in set(gold_n) | set(pred_n)}
    return ScoreReport(total, mode, per_type)


def _key(span: EntitySpan, mode: str):
    return (span.start, span.end, span.etype if mode == "recognition" else _COLLAPSED)


def score_corpora(gold: Corpus, pred: Corpus, mode: str = "extraction") -> ScoreReport:
    gs, ps = gold.sentences, pred.sentences
    if len(gs) != len(ps):
        raise UsageError(f"{len(gs)} gold sentences but {len(ps)} predicted")
    for i, (a, b) in enumerate(zip(gs, ps)):
        if len(a) != len(b):
            raise UsageError(f"sentence {i}: {len(a)} gold tokens but {len(b)} predicted")
    return score([s.entities for s in gs], [s.entities for s in ps], mode)
