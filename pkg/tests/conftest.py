import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


_CRITERIA = {}  # (number, title) -> {"passed", "failed", "skipped", "deselected", "slow"}


def _tally(key):
    return _CRITERIA.setdefault(key, {"passed": 0, "failed": 0, "skipped": 0,
                                      "deselected": 0, "slow": False})


def pytest_deselected(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            tally = _tally(tuple(marker.args))
            tally["deselected"] += 1
            tally["slow"] |= item.get_closest_marker("slow") is not None


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_runtest_logreport(report):
    key = getattr(report, "criterion", None)
    if key is None:
        return
    if report.failed:
        _tally(key)["failed"] += 1
    elif report.skipped:
        _tally(key)["skipped"] += 1
    elif report.when == "call":
        _tally(key)["passed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), t in sorted(_CRITERIA.items()):
        if t["failed"]:
            status = "FAIL"
        elif t["passed"]:
            status = "PASS (partial run)" if t["deselected"] else "PASS"
        elif t["skipped"]:
            status = "SKIP"
        else:
            status = "NOT RUN (slow: use -m slow)" if t["slow"] else "NOT RUN"
        terminalreporter.write_line(f"criterion {number:>2}  {status}  {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cluster_and_far():
    """A tight 2-D cluster of 20 points and one point far away (last row)."""
    gen = np.random.default_rng(3)
    cluster = gen.normal(scale=0.1, size=(20, 2))
    return np.vstack([cluster, [[10.0, 10.0]]])
