"""Collects one-line verdicts from the acceptance tests and prints them as a
dedicated section at the end of the pytest run."""

_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    _LINES.append(f"criterion {number} {'PASS' if ok else 'FAIL'}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_LINES, key=lambda s: int(s.split()[1])):
        terminalreporter.write_line(line)
