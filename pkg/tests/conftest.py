import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    report = getattr(mod, "REPORT", None)
    if not report:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(report):
        terminalreporter.write_line(report[number])
