import pytest

from sparseinterp.sparse import canonicalize


@pytest.fixture
def worked_poly():
    # 3y^2 + 2x^3y^4 + 7x^9y^5 with D = 10
    return canonicalize([(3, (0, 2)), (2, (3, 4)), (7, (9, 5))], 2, 10)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion."""
    def record(number, ok, detail):
        status = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append(f"criterion {number}: {status}  {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
