import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA.setdefault(int(m.group(1)), []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    from redcheck.decide import U_VIOLATIONS

    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok = all(o == "passed" for o in _CRITERIA[n])
        if n == 8 and U_VIOLATIONS:
            ok = False
        terminalreporter.write_line(f"CRITERION {n}: {'PASS' if ok else 'FAIL'}")
    if U_VIOLATIONS:
        terminalreporter.write_line(f"U violations recorded this session: {len(U_VIOLATIONS)}")
