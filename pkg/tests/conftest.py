import pytest

from sfcverify import DEFAULT_CATALOG, FieldDescriptor, Scope, ValueKind, load_scenario
from sfcverify import scenarios

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and (rep.when == "call" or (rep.when == "setup" and rep.failed)):
        _criteria.append((marker.args[0], marker.args[1], rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for cid, title, passed in sorted(_criteria, key=lambda c: c[0]):
        terminalreporter.write_line(f"{cid} {'PASS' if passed else 'FAIL'}  {title}")


@pytest.fixture(scope="session")
def catalog():
    return DEFAULT_CATALOG.extend([FieldDescriptor("con_db", ValueKind.COUNTER, 32)], Scope.STATE)


@pytest.fixture(scope="session")
def correct():
    return load_scenario(scenarios.path("figure1_correct"))


@pytest.fixture(scope="session")
def wrong():
    return load_scenario(scenarios.path("figure1_wrong"))
