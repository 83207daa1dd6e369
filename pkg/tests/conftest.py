import pytest

_LINES = {}


class AcceptanceRecorder:
    """Collects one PASS/FAIL line per acceptance criterion."""

    def __call__(self, number, title, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number}: {status}  {title}" + (f"  ({detail})" if detail else "")
        _LINES[number] = line
        print(line)
        return passed


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_LINES):
            terminalreporter.write_line(_LINES[number])
