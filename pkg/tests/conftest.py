import pytest

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance():
    """criterion number -> one-line PASS/FAIL summary, printed at the end of the run."""
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[k])
