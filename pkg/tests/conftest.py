from __future__ import annotations

import numpy as np
import pytest

from ads_charges.charges import compute_charges
from ads_charges.hyperbolic import FramePoint, sphere_quadrature
from ads_charges.initial_data import provider_kn_ads_asymptotic

KN_PARAMS = dict(m=1.0, a=0.3, e=0.2, kappa=1.0)


@pytest.fixture(scope="session")
def quad():
    return sphere_quadrature(48, 96)


@pytest.fixture(scope="session")
def kn_provider():
    return provider_kn_ads_asymptotic(**KN_PARAMS)


@pytest.fixture(scope="session")
def kn_charges(kn_provider):
    return compute_charges(kn_provider)


def random_point(rng, kappa=1.0, r_range=(0.3, 4.0)):
    """Random regular point with kappa r drawn from r_range."""
    return FramePoint(
        rng.uniform(*r_range) / kappa, rng.uniform(0.15, np.pi - 0.15), rng.uniform(0, 2 * np.pi), kappa
    )


def random_lambda(rng):
    return rng.normal(size=4) + 1j * rng.normal(size=4)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
