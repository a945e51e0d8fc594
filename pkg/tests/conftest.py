import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

# One (criterion, passed, detail) entry per acceptance criterion; printed as
# a summary block at the end of the session.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record_acceptance(criterion: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS.append((criterion, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        tr.write_line(f"[{status}] {criterion}: {detail}")
