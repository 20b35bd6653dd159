import numpy as np
import pytest

from proxilab import AffinePiece, CyclicMap, Euclidean, Segment

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    n, title = mark.args
    prev = _CRITERIA.get(n, (title, True))
    _CRITERIA[n] = (title, prev[1] and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def plane():
    return Euclidean(2, 2.0)


@pytest.fixture
def strips(plane):
    A = Segment(plane, [0, 0], [0, 1])
    B = Segment(plane, [1, 0], [1, 1])
    half = [[0, 0], [0, 0.5]]
    return CyclicMap(A, B, AffinePiece(half, [1, 0]), AffinePiece(half, [0, 0]), 0.5)


@pytest.fixture
def flats():
    sp = Euclidean(2, np.inf)
    A = Segment(sp, [0, 0], [1, 0])
    B = Segment(sp, [0, 1], [1, 1])
    M = [[-1, 0], [0, 0]]
    return CyclicMap(A, B, AffinePiece(M, [1, 1]), AffinePiece(M, [1, 0]), 0.5)
