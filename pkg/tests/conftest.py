import os
import sys
from collections import OrderedDict

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# criterion id -> list of (part label, passed, measured)
_CRITERIA: "OrderedDict[str, list]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid, label): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    cid, label = mark.args
    measured = dict(item.user_properties).get("measured", "")
    _CRITERIA.setdefault(cid, []).append((label, rep.passed, measured))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid, parts in _CRITERIA.items():
        ok = all(p for _, p, _ in parts)
        head = f"criterion {cid}: {'PASS' if ok else 'FAIL'}"
        if len(parts) == 1:
            label, _, measured = parts[0]
            tr.write_line(f"{head}  {label}" + (f"  [{measured}]" if measured else ""))
            continue
        tr.write_line(head)
        for label, passed, measured in parts:
            extra = f"  [{measured}]" if measured else ""
            tr.write_line(f"    {'pass' if passed else 'FAIL'}  {label}{extra}")
