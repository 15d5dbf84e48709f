from __future__ import annotations

import math

import numpy as np
import pytest

from ads_charges.hyperbolic import FramePoint, frame_derivative, sphere_quadrature
from ads_charges.initial_data import (
    FunctionProvider,
    aspect,
    provider_ads,
    provider_kn_ads_asymptotic,
    provider_rn_ads,
    validate_decay,
)

from .conftest import random_point


def test_ads_sample_is_zero():
    s = provider_ads(1.0).evaluate(FramePoint(2.0, 1.0, 0.5))
    for arr in (s.a, s.p, s.E, s.B, s.da):
        assert not np.any(arr)
    asp = aspect(provider_ads(1.0), FramePoint(2.0, 1.0, 0.5))
    assert not np.any(asp.Ecal) and not np.any(asp.Pcal)


def test_evaluation_is_deterministic(kn_provider):
    p = FramePoint(np.array([6.0, 7.5]), np.array([0.4, 2.0]), np.array([1.0, 5.0]))
    s1, s2 = kn_provider.evaluate(p), kn_provider.evaluate(p)
    for x, y in zip((s1.a, s1.p, s1.E, s1.B, s1.da), (s2.a, s2.p, s2.E, s2.B, s2.da)):
        assert np.array_equal(x, y)


def test_kappa_mismatch_rejected(kn_provider):
    with pytest.raises(ValueError):
        kn_provider.evaluate(FramePoint(6.0, 1.0, 0.0, kappa=2.0))


def test_kn_sigma_rejected():
    with pytest.raises(ValueError):
        provider_kn_ads_asymptotic(1.0, 2.0, 0.0, 1.0)


def test_kn_samples_symmetric_and_positive(kn_provider):
    rng = np.random.default_rng(0)
    for _ in range(10):
        s = kn_provider.evaluate(random_point(rng, r_range=(3.0, 10.0)))
        assert np.array_equal(s.a, s.a.T) and np.array_equal(s.p, s.p.T)
        assert np.all(np.linalg.eigvalsh(s.g) > 0)


def test_pcal_reproduced_exactly(kn_provider):
    p = FramePoint(6.5, 1.1, 0.3)
    s = kn_provider.evaluate(p)
    asp = aspect(kn_provider, p)
    assert np.array_equal(asp.Pcal, s.p - s.g * np.trace(s.p))


def test_schwarzschild_energy_aspect():
    m, kap = 1.0, 1.0
    prov = provider_kn_ads_asymptotic(m, 0.0, 0.0, kap)
    for r in (8.0, 12.0):
        e1 = aspect(prov, FramePoint(r, 1.0, 0.0, kap)).Ecal[0]
        lead = 32 * m * kap**2 * math.exp(-3 * kap * r)
        assert abs(e1 / lead - 1) < 5 * math.exp(-2 * kap * r) + 1e-12


def test_energy_aspect_shortcut_sign(kn_provider):
    """At leading order E_1 = 2 kappa a11 - d_r a33 for the KN fields."""
    r = 14.0
    p = FramePoint(r, np.linspace(0.2, 2.9, 7), 0.0)
    s = kn_provider.evaluate(p)
    e1 = aspect(kn_provider, p).Ecal[..., 0]
    shortcut = 2 * s.a[..., 0, 0] - s.da[..., 2, 2, 0]
    assert np.max(np.abs(e1 / shortcut - 1)) < 1e-10


def test_analytic_derivatives_match_fd():
    rng = np.random.default_rng(1)
    for params in [(1.0, 0.3, 0.2, 1.0), (2.0, 0.5, 0.0, 0.8)]:
        prov = provider_kn_ads_asymptotic(*params)
        fd = FunctionProvider(prov.kappa, a=lambda q, pr=prov: pr.fields(q)[0])
        for _ in range(10):
            p = random_point(rng, kappa=prov.kappa, r_range=(2.0, 6.0))
            exact = aspect(prov, p).Ecal
            approx = aspect(fd, p).Ecal
            assert np.max(np.abs(exact - approx)) / np.max(np.abs(exact)) < 1e-6


def test_decay_kn(kn_provider):
    rep = validate_decay(kn_provider, [6.0, 7.0, 8.0, 9.0], tau=3)
    assert rep.passed, rep.violations
    assert abs(rep.sigma["a"] - 3) < 0.05
    assert abs(rep.sigma["E"] - 2) < 0.05
    assert abs(rep.sigma["B"] - 3) < 0.05


def test_decay_ads_infinite():
    rep = validate_decay(provider_ads(1.0), [6.0, 7.0, 8.0], tau=100)
    assert rep.passed
    assert all(math.isinf(s) for s in rep.sigma.values())
    assert rep.describe("a") == "infinite order"


def test_decay_violation_flagged():
    def slow(q):
        out = np.zeros(q.shape + (3, 3))
        out[..., 0, 0] = np.exp(-q.kappa * np.asarray(q.r))
        return out

    rep = validate_decay(FunctionProvider(1.0, a=slow), [6.0, 7.0, 8.0], tau=1.5)
    assert "a" in rep.violations
    assert abs(rep.sigma["a"] - 1) < 0.05


@pytest.mark.parametrize("radii", [[6.0, 7.0], [6.0, 8.0, 7.0]])
def test_decay_radii_checked(kn_provider, radii):
    with pytest.raises(ValueError):
        validate_decay(kn_provider, radii, tau=3)


def test_rn_reduces_to_ads():
    prov = provider_rn_ads(0.0, 0.0, 1.0)
    s = prov.evaluate(FramePoint(np.array([6.0, 9.0]), 1.0, 0.0))
    for arr in (s.a, s.p, s.E, s.B, s.da):
        assert np.max(np.abs(arr)) <= 1e-12


def test_rn_chart_map_monotone_and_normalised():
    prov = provider_rn_ads(1.0, 0.5, 1.0)
    R = np.geomspace(prov.horizon * 1.01, 1e3, 40)
    r = np.array([prov.chart_radius(x) for x in R])
    assert np.all(np.diff(r) > 0)
    assert abs(1e3 - math.sinh(prov.chart_radius(1e3))) < 1e-3


def test_rn_metric_matches_areal_radius():
    M, Q, kap = 1.0, 0.5, 1.0
    prov = provider_rn_ads(M, Q, kap)
    r = 3.0
    R = float(prov.areal_radius(r))
    assert abs(prov.chart_radius(R) - r) < 1e-12
    s = prov.evaluate(FramePoint(r, 1.0, 0.0, kap))
    assert np.isclose(s.a[1, 1], kap**2 * R**2 / math.sinh(kap * r) ** 2 - 1, rtol=1e-9)
    assert s.a[0, 0] == 0 and np.isclose(s.E[0], Q / R**2)
    # analytic radial derivative against central differences of the stable form
    fd = frame_derivative(lambda q: prov.fields(q)[0], FramePoint(r, 1.0, 0.0, kap), h=1e-4)
    assert np.isclose(s.da[1, 1, 0], fd[1, 1, 0], rtol=1e-6)


def test_rn_inner_region_rejected():
    prov = provider_rn_ads(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        prov.evaluate(FramePoint(0.05, 1.0, 0.0))


def test_rn_negative_mass_rejected():
    with pytest.raises(ValueError):
        provider_rn_ads(-1.0, 0.0, 1.0)


def test_function_provider_fd_derivative():
    prov = FunctionProvider(1.0, a=lambda q: np.multiply.outer(np.exp(-3 * np.asarray(q.r)), np.eye(3)))
    s = prov.evaluate(FramePoint(2.0, 1.0, 0.0))
    assert np.isclose(s.da[0, 0, 0], -3 * math.exp(-6.0), rtol=1e-8)
    assert abs(s.da[0, 0, 1]) < 1e-12
