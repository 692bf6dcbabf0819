import numpy as np
import pytest

from fiberent.hilbert import build_basis
from fiberent.model import SystemParams


@pytest.fixture(scope="session")
def basis():
    return build_basis(1)


@pytest.fixture
def rng():
    return np.random.default_rng(20161)


@pytest.fixture
def fig3b_params():
    return SystemParams(omega=0.008, omega_mw=0.002, nu=1.0, beta=0.1)


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


# --------------------------------------------------------------------------
# acceptance reporting: one PASS/FAIL line per criterion

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number, title = marker.args
        detail = dict(item.user_properties).get("detail", "")
        _CRITERIA[number] = (title, report.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, detail = _CRITERIA[number]
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
