import numpy as np
import pytest

from lindblad_dimer import (
    DensityMatrix,
    DimerParams,
    build_liouvillian,
    make_dimer,
    spectral_decompose,
)

_acceptance = []


@pytest.fixture
def rng():
    return np.random.default_rng(20101014)


@pytest.fixture(scope="session")
def dimer():
    """Factory: (liouvillian, spectrum, rho0 = |1><1|) for a parameter point."""

    def build(**kwargs):
        params = DimerParams(**kwargs)
        liou = build_liouvillian(make_dimer(params), params.lam)
        return liou, spectral_decompose(liou), DensityMatrix.localized(2, 0)

    return build


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::", 1)[1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
