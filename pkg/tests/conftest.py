import pytest

_LOG = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _LOG


def pytest_terminal_summary(terminalreporter):
    if not _LOG:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _LOG:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
