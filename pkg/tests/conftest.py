import pytest

from ugto.corpus import EntitySpan, Sentence
from ugto.induction import InductionModel
from ugto.lexicon import Lexicon


@pytest.fixture
def worked_lexicon():
    return Lexicon(
        entity_tokens={"LOC": {"Japan", "UK", "U.S.", "England"}, "MISC": {"Asian", "Australian"},
                       "PER": {"Tom"}},
        generic_modifiers={"of", "and"},
        triggers={"ORG": {"Department", "Transport", "University", "Inc"}, "MISC": {"Cup"},
                  "PER": {"Mr"}, "LOC": {"River"}},
    )


@pytest.fixture
def worked_induction():
    common = {"began", "its", "title", "with", "a", "lucky", "2-1", "win", "against", "on",
              "Friday", "said", "that", "took", "six", "for", "82", "but", "of"}
    return InductionModel(frozenset({"Japan", "UK", "Moody", "Tom", "Asian", "Boston"}),
                          frozenset(common), 1.0)


def _sent(text, spans):
    words, pos = zip(*(tok.rsplit("/", 1) for tok in text.split()))
    return Sentence.from_words(list(words), list(pos), [EntitySpan(*s) for s in spans])


# Worked example sentences with the POS tags the CoNLL03 files carry for them
WORKED = {
    1: _sent("Japan/NNP began/VBD its/PRP$ Asian/JJ Cup/NNP title/NN with/IN a/DT lucky/JJ "
             "2-1/CD win/NN against/IN", [(0, 1, "LOC"), (3, 5, "MISC")]),
    2: _sent("UK/NNP Department/NNP of/IN Transport/NNP on/IN Friday/NNP said/VBD that/IN",
             [(0, 4, "ORG")]),
    3: _sent("Australian/JJ Tom/NNP Moody/NNP took/VBD six/CD for/IN 82/CD but/CC",
             [(0, 1, "MISC"), (1, 3, "PER")]),
}


@pytest.fixture
def worked_sentences():
    return WORKED


# -- acceptance summary ---------------------------------------------------------

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion covered by a test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = _criterion_markers.get(report.nodeid)
    if marker is None:
        return
    n, text = marker
    prev = _criteria.get(n, (text, "PASS"))
    outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
    if prev[1] == "FAIL" or (prev[1] == "SKIP" and outcome == "PASS"):
        outcome = prev[1]
    _criteria[n] = (text, outcome)


_criterion_markers: dict = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _criterion_markers[item.nodeid] = tuple(m.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        text, outcome = _criteria[n]
        terminalreporter.write_line(f"[{outcome}] criterion {n}: {text}")
