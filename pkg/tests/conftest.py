import pytest


def pytest_configure(config):
    config._acceptance_results = {}


@pytest.fixture
def report(request):
    """Record one acceptance line: ``report(num, title, passed, detail)``."""
    results = request.config._acceptance_results

    def _report(num, title, passed, detail=""):
        results[num] = (bool(passed), title, detail)
        return passed

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance_results", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        passed, title, detail = results[num]
        line = f"criterion {num}: {'PASS' if passed else 'FAIL'} - {title}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
