import pytest

_LINES = []


@pytest.fixture
def report():
    """Record a one-line pass/fail verdict shown in the terminal summary."""
    def record(label, ok, detail):
        _LINES.append(f"{label}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
