import sys

import pytest

from icrf.channel_model import NetworkParams


def fig3(a12, a21):
    return NetworkParams(a11=0.42, a22=0.25, a31=0.26, a32=0.1, a12=a12, a21=a21,
                         P1=10.0, P2=10.0, P3=10.0)


@pytest.fixture
def vsi_params():
    return fig3(0.7, 0.7)


@pytest.fixture
def si_params():
    return fig3(0.53, 0.36)


@pytest.fixture
def txfb_params():
    return NetworkParams(a11=0.2, a21=0.27, a31=0.1, a12=0.44, a22=0.2, a32=0.1,
                         P1=10.0, P2=10.0, P3=10.0)


@pytest.fixture
def partial_params():
    return NetworkParams(a11=0.2, a12=0.27, a21=0.44, a22=0.2, a31=0.1, a32=0.1,
                         a13=0.3, P1=10.0, P2=10.0, P3=10.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    results = mod.RESULTS
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, title, detail = results[number]
        terminalreporter.write_line(
            f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
