import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rkcert import catalog

settings.register_profile(
    "rkcert", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("rkcert")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def sunshu():
    return catalog.matrix("sunshu")


@pytest.fixture
def levytadmor():
    return catalog.matrix("levytadmor")


@pytest.fixture
def ww_star():
    return catalog.matrix("ww-star")


def random_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


SUITE_BUDGET_S = 60.0


def pytest_sessionstart(session):
    session.config._rkcert_t0 = __import__("time").perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    import time

    import test_acceptance

    results = test_acceptance.RESULTS
    if not results:
        return
    elapsed = time.perf_counter() - config._rkcert_t0
    terminalreporter.section("acceptance criteria")
    for k in range(1, 11):
        if k not in results:
            terminalreporter.write_line(f"criterion {k:2d}: NOT RUN")
            continue
        ok, detail = results[k]
        if k == 10:
            ok = ok and elapsed < SUITE_BUDGET_S
            detail += f"; session {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s)"
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_sessionfinish(session, exitstatus):
    import time

    if time.perf_counter() - session.config._rkcert_t0 >= SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1
