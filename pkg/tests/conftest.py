import numpy as np
import pytest

from rigidchart import sampling
from rigidchart.dynamics import InertiaTensor

# criterion label -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_inertia(rng):
    return sampling.inertia(rng)


@pytest.fixture
def asymmetric():
    return InertiaTensor.from_principal([1.0, 2.0, 3.0])


@pytest.fixture
def symmetric_top():
    return InertiaTensor.from_principal([2.0, 2.0, 1.0])


@pytest.fixture
def spherical():
    return InertiaTensor(np.eye(3))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: (int(s.split()[0].rstrip("ab.")), s)):
        passed, detail = ACCEPTANCE[label]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
