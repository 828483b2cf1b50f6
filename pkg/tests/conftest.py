import sys

import pytest

from thd import build_hypergraph, hyperedge


def pytest_terminal_summary(terminalreporter):
    """Reprint acceptance verdicts outside capture, one line per criterion."""
    module = sys.modules.get("test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for line in verdicts:
            terminalreporter.write_line(line)


def make_g1():
    """Four developers, three reviews; the worked fixture used throughout."""
    return build_hypergraph(
        [
            hyperedge("e1", ["a", "b"], 1, 3),
            hyperedge("e2", ["b", "c"], 2, 5),
            hyperedge("e3", ["a", "c", "d"], 4, 4),
        ]
    )


def make_g2():
    """Forced-wait fixture: the only route to d departs at 0 and arrives at 5."""
    return build_hypergraph(
        [
            hyperedge("e4", ["a", "b"], 0, 0),
            hyperedge("e5", ["b", "d"], 5, 5),
        ]
    )


@pytest.fixture
def g1():
    return make_g1()


@pytest.fixture
def g2():
    return make_g2()
