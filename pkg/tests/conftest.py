import pytest

ACCEPTANCE = {}


@pytest.fixture
def record():
    """record(n, ok, detail) stores the outcome of one acceptance criterion."""
    def rec(n, ok, detail=""):
        ACCEPTANCE[n] = (bool(ok), detail)
        return ok
    return rec


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
