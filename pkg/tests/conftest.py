from pathlib import Path

import pytest

from stockfire import scenario_io as sio
from stockfire.regime_engine import load_regime

GOLDEN = Path(__file__).parent / "golden"

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion reported in the summary")


def pytest_runtest_logreport(report):
    label = getattr(report, "acceptance_label", None)
    if label is None:
        return
    if report.when == "call" or report.failed:
        prev = _acceptance.get(label, "PASS")
        _acceptance[label] = "FAIL" if (report.failed or prev == "FAIL") else "PASS"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result().acceptance_label = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_acceptance, key=lambda s: int(s.split()[0][2:])):
        terminalreporter.write_line(f"{_acceptance[label]}  {label}")


@pytest.fixture(scope="session")
def reference():
    return sio.reference_scenario()


@pytest.fixture(scope="session")
def regimes():
    return {name: load_regime(sio.DATA_DIR / f"{name}.regime")
            for name in ("us_baseline", "china_delandfill", "ipcc_inventory", "methane_credit_demo")}
