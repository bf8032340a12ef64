"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

TITLES = {
    1: "mixed-determinant cross-validation",
    2: "Garding campaign",
    3: "Schur identities",
    4: "isoperimetric anchor",
    5: "extreme tensor mass",
    6: "BV convolution anchor",
    7: "Gagliardo",
    8: "gas invariance suite",
    9: "direct vs compensated",
    10: "defect functional",
    11: "determinism",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        store = item.config._criteria.setdefault(mark.args[0], [])
        store.append((item.name, rep.passed, list(item.user_properties)))


def _fmt(value):
    return f"{value:.4g}" if isinstance(value, float) else str(value)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_criteria", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(TITLES):
        runs = results.get(n)
        if runs is None:
            terminalreporter.write_line(f"criterion {n:2d}  NOT RUN  {TITLES[n]}")
            continue
        ok = all(passed for _, passed, _ in runs)
        props = [f"{k}={_fmt(v)}" for _, _, p in runs for k, v in p]
        failed = [name for name, passed, _ in runs if not passed]
        tail = f"  failed: {', '.join(failed)}" if failed else ""
        line = f"criterion {n:2d}  {'PASS' if ok else 'FAIL'}  {TITLES[n]}  ({len(runs)} checks)  {' '.join(props)}{tail}"
        terminalreporter.write_line(line, green=ok, red=not ok)
