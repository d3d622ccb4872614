import pytest

from smoothprog.sieve import build_table

_ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def table_1e6():
    return build_table(10**6)


@pytest.fixture(scope="session")
def table_1e8():
    return build_table(10**8)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    num = marker.args[0]
    ok = rep.passed if rep.when == "call" else (rep.passed or rep.skipped)
    prev = _ACCEPTANCE.get(num, (True, []))
    if rep.when == "call" or not ok:
        _ACCEPTANCE[num] = (prev[0] and ok, prev[1] + [item.name])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        ok, names = _ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  ({', '.join(names)})")
