import pytest

_RESULTS: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    k = marker.args[0]
    if rep.when == "call":
        _RESULTS.setdefault(k, []).append(rep.passed and not hasattr(rep, "wasxfail"))
    elif rep.when == "setup" and not rep.passed:
        _RESULTS.setdefault(k, []).append(False)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_RESULTS):
        status = "PASS" if all(_RESULTS[k]) else "FAIL"
        terminalreporter.write_line(f"criterion {k:2d}: {status}")
