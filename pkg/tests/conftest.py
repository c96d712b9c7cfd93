import pytest

_LINES: list[str] = []


@pytest.fixture
def report_line():
    """Collect one pass/fail line per acceptance criterion for the terminal summary."""
    return _LINES.append


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split("#")[1].split()[0])):
            terminalreporter.write_line(line)
