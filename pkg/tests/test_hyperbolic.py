from __future__ import annotations

import numpy as np
import pytest

from ads_charges.hyperbolic import (
    KILLING_FIELDS,
    SPATIAL_KILLING_FIELDS,
    FramePoint,
    area_element,
    frame_connection,
    killing_residual,
    killing_vector,
    sectional_curvature,
    spin_connection_term,
    sphere_quadrature,
)
from ads_charges import clifford

from .conftest import random_point


def test_point_validation():
    with pytest.raises(ValueError):
        FramePoint(-1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        FramePoint(1.0, 4.0, 0.0)
    with pytest.raises(ValueError):
        FramePoint(1.0, 1.0, 0.0, kappa=0.0)
    assert FramePoint(1.0, 1.0, 0.0, 2.0).cosmological_constant == -12.0


@pytest.mark.parametrize("p", [FramePoint(0.0, 1.0, 0.0), FramePoint(1.0, 0.0, 0.0), FramePoint(1.0, np.pi, 0.0)])
def test_singular_frame_rejected(p):
    with pytest.raises(ValueError):
        frame_connection(p)


def test_connection_antisymmetric():
    rng = np.random.default_rng(0)
    for _ in range(10):
        c = frame_connection(random_point(rng, kappa=rng.uniform(0.5, 2))).coeffs
        assert np.array_equal(c, -np.swapaxes(c, -1, -2))


def test_connection_values():
    kap, r, th = 1.3, 0.7, 1.1
    c = frame_connection(FramePoint(r, th, 0.2, kap)).coeffs
    assert c[0].max() == 0 and c[0].min() == 0
    assert np.isclose(c[1, 0, 1], kap / np.tanh(kap * r))
    assert np.isclose(c[2, 1, 2], kap / (np.tan(th) * np.sinh(kap * r)))


def test_spin_connection_makes_clifford_parallel():
    """[Omega_k, e_i] equals the frame rotation of e_i along e_k."""
    p = FramePoint(0.9, 0.8, 0.3, 1.2)
    c = frame_connection(p).coeffs
    for k in (1, 2, 3):
        om = spin_connection_term(k, p)
        for i in (1, 2, 3):
            comm = om @ clifford.gamma(i) - clifford.gamma(i) @ om
            rot = sum(c[k - 1, i - 1, j - 1] * clifford.gamma(j) for j in (1, 2, 3))
            assert np.allclose(comm, rot, atol=1e-14)


def test_spatial_killing_residuals():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(50):
        p = random_point(rng, kappa=rng.uniform(0.5, 2.0))
        for name in SPATIAL_KILLING_FIELDS:
            worst = max(worst, np.max(np.abs(killing_residual(name, p))))
    assert worst < 1e-8


def test_killing_aliases_and_time_components():
    p = FramePoint(1.0, 1.0, 1.0)
    assert np.array_equal(killing_vector("U12", p), killing_vector("V3", p))
    assert len(KILLING_FIELDS) == 10
    assert np.isclose(killing_vector("U40", p)[0], np.cosh(1.0))
    with pytest.raises(ValueError):
        killing_residual("U14", p)
    with pytest.raises(KeyError):
        killing_vector("U99", p)


@pytest.mark.parametrize("pair", [(1, 2), (1, 3), (2, 3)])
def test_constant_negative_curvature(pair):
    rng = np.random.default_rng(2)
    for _ in range(5):
        kap = rng.uniform(0.5, 2.0)
        p = random_point(rng, kappa=kap)
        assert np.isclose(sectional_curvature(p, *pair), -kap**2, rtol=1e-6)


def test_quadrature_exactness():
    quad = sphere_quadrature(8, 16)
    assert np.isclose(quad.weights.sum(), 4 * np.pi, rtol=1e-15)
    st = np.sin(quad.theta)
    x, y, z = st * np.cos(quad.psi), st * np.sin(quad.psi), np.cos(quad.theta)
    assert np.isclose(quad.integrate(z**2), 4 * np.pi / 3, rtol=1e-14)
    assert abs(quad.integrate(x * y)) < 1e-14
    assert np.isclose(quad.integrate(x**2 * y**2), 4 * np.pi / 15, rtol=1e-14)
    assert np.isclose(quad.integrate(z**6), 4 * np.pi / 7, rtol=1e-14)


def test_quadrature_rejects_tiny_grids():
    with pytest.raises(ValueError):
        sphere_quadrature(1, 16)
    with pytest.raises(ValueError):
        sphere_quadrature(8, 2)


def test_area_element():
    assert np.isclose(area_element(2.0, 0.5), np.sinh(1.0) ** 2 / 0.25)
