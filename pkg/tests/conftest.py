import pytest

from metricvote.profile import VoteProfile

_CRITERIA = []


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run opt-in long checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="long run; use --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture
def record_criterion():
    """Record one pass/fail line for the acceptance summary, then assert it."""

    def record(number, ok, detail):
        _CRITERIA.append((number, bool(ok), detail))
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, f"criterion {number} failed: {detail}"

    return record


@pytest.fixture
def split():
    return VoteProfile.from_rankings([[0, 1], [1, 0]])


@pytest.fixture
def unanimous3():
    return VoteProfile.from_rankings([[0, 1, 2]] * 3)


@pytest.fixture
def cyclic3():
    return VoteProfile.from_rankings([[0, 1, 2], [1, 2, 0], [2, 0, 1]])


@pytest.fixture
def chain4():
    # x1..x4 = 0..3; hop preferences: {v1}, {v1, v2}, {v2, v3, v4}
    return VoteProfile.from_rankings([[0, 1, 3, 2], [1, 2, 3, 0], [2, 3, 1, 0], [2, 1, 0, 3]])
