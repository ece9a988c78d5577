"""Shared test configuration: acceptance-line reporting.

Each acceptance test records a single pass/fail line; the collected lines
are printed as a block in the terminal summary so the acceptance verdicts
are readable in one place even under output capture.
"""

import sys

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line, file=sys.stderr, flush=True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
