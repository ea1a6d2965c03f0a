import pytest

from lexclean.corpus import Corpus


def make_corpus(*pairs, **kw) -> Corpus:
    """Corpus from whitespace strings, e.g. make_corpus(("a b", "x y"))."""
    return Corpus.from_pairs([(s.split(), t.split()) for s, t in pairs], **kw)


@pytest.fixture
def corpus_factory():
    return make_corpus


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
