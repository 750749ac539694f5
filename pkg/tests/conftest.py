import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record and print a one-line verdict for an acceptance criterion."""

    def report(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
