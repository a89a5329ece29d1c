import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from shiftlab.construction import build_construction  # noqa: E402


@pytest.fixture(scope="session")
def state13():
    return build_construction(13)


@pytest.fixture(scope="session")
def w13(state13):
    return state13.weights


# ---------------------------------------------------------------------------
# one line per acceptance criterion

_OUTCOMES: dict[str, list[tuple[str, str]]] = {}
_TITLES: dict[str, str] = {}
_NODES: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m:
            _NODES[item.nodeid] = str(m.args[0])
            _TITLES.setdefault(str(m.args[0]), m.args[1])


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    num = _NODES.get(report.nodeid)
    if num is not None:
        _OUTCOMES.setdefault(num, []).append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_OUTCOMES, key=int):
        parts = _OUTCOMES[num]
        ok = all(o == "passed" for _, o in parts)
        line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {_TITLES.get(num, '')}"
        if not ok:
            line += "  [" + ", ".join(f"{n}: {o}" for n, o in parts) + "]"
        tr.write_line(line)
