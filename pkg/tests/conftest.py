import pytest

_LINES = []


@pytest.fixture
def report():
    """Record one acceptance line; the lines are echoed in the terminal summary."""
    def add(criterion, status, detail):
        line = f"[{status}] criterion {criterion}: {detail}"
        _LINES.append(line)
        print(line)
    return add


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance")
        for line in _LINES:
            terminalreporter.write_line(line)
