import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from ugto.analysis import pos_report, uncommon_report
from ugto.corpus import Corpus, EntitySpan, Sentence
from ugto.errors import UsageError


def corpus(rows, split="train"):
    sents = []
    for words, pos, spans in rows:
        sents.append(Sentence.from_words(words, pos, [EntitySpan(*s) for s in spans]))
    return Corpus.from_sentences(sents, split)


def test_single_sentence_pos_report():
    rep = pos_report(corpus([(["Japan", "won"], ["NNP", "VBD"], [(0, 1, "LOC")])]))
    assert rep.get("NNP").p_entity == 100.0
    assert rep.get("VBD").p_text == 0.0
    assert rep.get("NNP").p_text == 100.0


def test_entities_are_exactly_proper_nouns():
    c = corpus([(["Tom", "met", "Ann", "in", "Rome"], ["NNP", "VBD", "NNP", "IN", "NNP"],
                 [(0, 1, "PER"), (2, 3, "PER"), (4, 5, "LOC")])])
    rep = pos_report(c)
    assert rep.rows[0].pos == "NNP"
    assert (rep.get("NNP").p_entity, rep.get("NNP").p_text) == (100.0, 100.0)


def test_uncommon_report_zero_and_full():
    shared = corpus([(["Apple", "x"], ["NNP", "NN"], [(0, 1, "ORG")]),
                     (["Apple", "y"], ["NNP", "NN"], [])])
    assert uncommon_report(shared, 1.0).percentages["entire"] == 0.0
    unique = corpus([(["Apple", "x"], ["NNP", "NN"], [(0, 1, "ORG")]),
                     (["Pear", "y"], ["NNP", "NN"], [(0, 1, "ORG")])])
    assert uncommon_report(unique, 1.0).percentages["entire"] == 100.0


def test_per_split_rates_are_self_contained():
    train = corpus([(["Apple", "x"], ["NNP", "NN"], [(0, 1, "ORG")])], "train")
    test = corpus([(["Apple", "y"], ["NNP", "NN"], [])] * 3 + [(["Apple"], ["NNP"], [(0, 1, "ORG")])],
                  "test")
    rep = uncommon_report([train, test], 0.5, scope="per-split")
    assert rep.percentages == {"train": 100.0, "test": 0.0}
    assert uncommon_report([train, test], 0.5).percentages["entire"] == 0.0


def test_unlabeled_rejected():
    with pytest.raises(UsageError):
        uncommon_report(Corpus(split="unlabeled"))
    with pytest.raises(UsageError):
        pos_report(Corpus(split="unlabeled"))


def test_report_outputs():
    c = corpus([(["Japan", "won"], ["NNP", "VBD"], [(0, 1, "LOC")])])
    assert "NNP" in pos_report(c).format_table()
    assert pos_report(c).to_csv().splitlines()[1] == "NNP,100.00,100.00,1,1"
    assert "100.00" in uncommon_report(c).to_csv()


VOCAB = ["Japan", "won", "the", "Cup", "of", "Tom"]
POS = ["NNP", "VBD", "DT", "NN", "IN"]


@st.composite
def labeled(draw):
    rows = []
    for _ in range(draw(st.integers(1, 8))):
        n = draw(st.integers(1, 7))
        words = draw(st.lists(st.sampled_from(VOCAB), min_size=n, max_size=n))
        pos = draw(st.lists(st.sampled_from(POS), min_size=n, max_size=n))
        cuts = sorted(set(draw(st.lists(st.integers(0, n), max_size=3))) | {0, n})
        spans = [(a, b, "X") for a, b in zip(cuts, cuts[1:]) if draw(st.booleans())]
        rows.append((words, pos, spans))
    return rows


def naive_uncommon(rows, t):
    ent, com = Counter(), Counter()
    for words, _, spans in rows:
        for i, w in enumerate(words):
            (ent if any(a <= i < b for a, b, _ in spans) else com)[w] += 1
    hit = tot = 0
    for words, _, spans in rows:
        for a, b, _ in spans:
            tot += 1
            hit += any(ent[w] / (ent[w] + com[w]) >= t for w in words[a:b])
    return 100.0 * hit / tot if tot else 0.0


@settings(max_examples=150, deadline=None)
@given(labeled(), st.sampled_from([1e-9, 0.5, 1.0]))
def test_reports_match_naive_recount(rows, t):
    c = corpus(rows)
    assert uncommon_report(c, t).percentages["entire"] == pytest.approx(naive_uncommon(rows, t))
    if t == 1e-9 and c.num_entities():
        assert uncommon_report(c, t).percentages["entire"] == 100.0
    rep = pos_report(c)
    if c.num_entities():
        assert sum(r.p_entity for r in rep.rows) == pytest.approx(100.0)
    for r in rep.rows:
        assert 0.0 <= r.p_text <= 100.0


@settings(max_examples=50, deadline=None)
@given(labeled(), st.randoms(use_true_random=False))
def test_pos_report_order_invariant(rows, rnd):
    shuffled = list(rows)
    rnd.shuffle(shuffled)
    a = {r.pos: (r.p_entity, r.p_text) for r in pos_report(corpus(rows)).rows}
    b = {r.pos: (r.p_entity, r.p_text) for r in pos_report(corpus(shuffled)).rows}
    assert a.keys() == b.keys()
    for k in a:
        assert a[k] == pytest.approx(b[k])
