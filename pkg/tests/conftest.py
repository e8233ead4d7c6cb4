import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wenkit import fixtures

ACCEPTANCE_RESULTS: list[str] = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): acceptance criterion, reported pass/fail in the summary"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        marker = item.get_closest_marker("acceptance")
        if marker:
            status = "PASS" if report.passed else "FAIL"
            ACCEPTANCE_RESULTS.append(f"{status}  {marker.args[0]}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def jttw():
    """Full-scale hundred-chapter fixture (shared, read-only)."""
    return fixtures.jttw_like()


@pytest.fixture(scope="session")
def jttw_small():
    return fixtures.jttw_like(chapters=12, cjk_per_chapter=900)


@pytest.fixture(scope="session")
def drc():
    return fixtures.drc_like()


@pytest.fixture(scope="session")
def drc_small():
    return fixtures.drc_like(chapters=15, cjk_per_chapter=700)


@pytest.fixture(scope="session")
def hgtz():
    return fixtures.hgtz_like()


@pytest.fixture(scope="session")
def difangzhi():
    return fixtures.difangzhi_fixture()


@pytest.fixture(scope="session")
def demo_gazetteer():
    return fixtures.demo_gazetteer()
