import pytest

CRITERIA = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: report(number, ok, detail)."""
    def report(number, ok, detail):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        CRITERIA[number] = line
        print(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[number])
