"""Echo the acceptance verdict lines after the run, past output capture."""

from __future__ import annotations

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    for module in list(sys.modules.values()):
        lines = getattr(module, "ACCEPTANCE_LINES", None)
        if lines:
            terminalreporter.section("acceptance criteria")
            for line in lines:
                terminalreporter.write_line(line)
            return
