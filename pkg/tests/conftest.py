import pytest

_ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(passed, detail)``."""

    def record(passed, detail):
        _ACCEPTANCE[request.node.name] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (passed, detail) in sorted(_ACCEPTANCE.items()):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
