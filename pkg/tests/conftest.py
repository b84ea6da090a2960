import sys

from bpreduce import kernels


def pytest_report_header(config):
    return f"bpreduce enumeration backend: {kernels.BACKEND}"


def pytest_terminal_summary(terminalreporter):
    lines = getattr(sys.modules.get("test_acceptance"), "REPORT_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria (quick budget)")
        for line in lines:
            terminalreporter.write_line(line)
