import pytest

# criterion id -> (passed, detail); filled by the acceptance tests
ACCEPTANCE = {}


@pytest.fixture
def report(request):
    """Record a criterion's outcome; a missing record after the test counts as a failure."""
    def _record(cid, title, passed, detail):
        ACCEPTANCE[cid] = (title, bool(passed), detail)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {cid}. {title}: {detail}")
