import pytest

_LINES_KEY = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def criterion_report(request):
    """Callable that records one pass/fail line per acceptance criterion."""
    lines = request.config.stash.setdefault(_LINES_KEY, [])

    def record(number, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        lines.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
