"""Per-criterion summary for the acceptance suite.

Tests tagged ``@pytest.mark.criterion(k, "title")`` are grouped by ``k``; a
criterion passes only when every test carrying its number passes. Expected
failures count as FAIL so known deviations stay visible in the summary.
"""

from collections import defaultdict

_titles: dict[int, str] = {}
_outcomes: dict[int, list[tuple[str, str]]] = defaultdict(list)


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _titles.setdefault(mark.args[0], mark.args[1])
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    k = dict(report.user_properties).get("criterion")
    if k is None:
        return
    # record the call phase, or a setup phase that never reached the call
    if report.when == "call" or (report.when == "setup" and not report.passed):
        outcome = "xfail" if hasattr(report, "wasxfail") else report.outcome
        _outcomes[k].append((report.nodeid.split("::")[-1], outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_outcomes):
        results = _outcomes[k]
        ok = all(o == "passed" for _, o in results)
        line = f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {_titles[k]}"
        bad = [f"{name} ({o})" for name, o in results if o != "passed"]
        if bad:
            line += "  [" + ", ".join(bad) + "]"
        terminalreporter.write_line(line)
