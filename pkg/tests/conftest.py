import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))
    elif report.when == "setup" and report.failed and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], "error"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {name}")


@pytest.fixture(scope="session")
def synth_default():
    from gemmperf.synth import SynthSpec, generate
    return generate(SynthSpec(noise_fraction=0.05, seed=7))


@pytest.fixture(scope="session")
def synth_noiseless():
    from gemmperf.synth import SynthSpec, generate
    return generate(SynthSpec(noise_fraction=0.0, seed=7))
