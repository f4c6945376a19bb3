import numpy as np
import pytest
from hypothesis import settings

from nonlocal_lwr import KernelSpec, PeriodicGrid

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

# filled by test_acceptance.py; printed at the end of the session
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def linear02():
    return KernelSpec.linear(0.2)


@pytest.fixture
def grid_1k():
    return PeriodicGrid(1000)


def sine_mode(k, amp=0.1, offset=0.5):
    return lambda x: offset + amp * np.sin(2 * np.pi * k * x)
