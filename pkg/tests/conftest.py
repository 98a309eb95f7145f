from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"


def naive_rank(words):
    """Reference ranking written without Counter or sorted(): count with a
    plain dict, then repeatedly pull out the (max count, min word) entry."""
    counts = {}
    for w in words:
        if w in counts:
            counts[w] = counts[w] + 1
        else:
            counts[w] = 1
    out = []
    while counts:
        best = None
        for w, c in counts.items():
            if best is None or c > counts[best] or (c == counts[best] and w < best):
                best = w
        out.append((len(out) + 1, best, counts.pop(best)))
    return out


@pytest.fixture
def data_dir():
    return DATA


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
