import re

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_outcomes: dict[int, bool] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    failed = report.failed or (report.when == "call" and report.skipped)
    _outcomes[k] = _outcomes.get(k, True) and not failed


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_outcomes):
        terminalreporter.write_line(f"criterion {k}: {'PASS' if _outcomes[k] else 'FAIL'}")
