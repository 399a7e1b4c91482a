import pytest

from tracetrim.simgen import WorkloadConfig, simulate

_acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance.append((marker.kwargs.get("criterion", item.name), report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in _acceptance:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {label}")


@pytest.fixture(scope="session")
def small_workload():
    """120 requests, 80% simple, seed 11: (records_by_host, ground_truth)."""
    return simulate(WorkloadConfig(n_requests=120, seed=11))
