import numpy as np
import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(num, name): acceptance criterion identifier"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and report.when == "call":
        status = "PASS" if report.passed else "FAIL"
        print(f"\n[ACCEPTANCE {marker.args[0]}] {marker.args[1]}: {status}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
