import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> [title, passed, seconds, details]
_criteria: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.skipped:
        return
    n, title = marker.args
    entry = _criteria.setdefault(n, [title, True, 0.0, []])
    if rep.when == "call":
        entry[2] += rep.duration
        entry[3] += [v for k, v in item.user_properties if k == "detail"]
    if rep.failed:
        entry[1] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_criteria):
        title, ok, secs, details = _criteria[n]
        extra = f" [{'; '.join(details)}]" if details else ""
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title} ({secs:.2f} s){extra}")
