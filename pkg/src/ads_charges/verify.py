"""Self-verification suites run by ``ads-charges verify``."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import clifford
from .bounds import build_Q
from .charges import ChargeSet, compute_charges
from .hyperbolic import SPATIAL_KILLING_FIELDS, FramePoint, killing_residual, sphere_quadrature
from .initial_data import SyntheticChargeProvider, provider_kn_ads_asymptotic
from .spinor import boundary_matrix, killing_residual_spinor, killing_spinor

__all__ = ["SuiteResult", "SUITES", "run_suites"]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    max_residual: float
    seconds: float
    detail: str = ""


def _clifford() -> tuple[bool, float, str]:
    worst, failures = 0.0, []
    eta = np.diag([1.0, -1.0, -1.0, -1.0])
    for a in range(4):
        for b in range(4):
            ga, gb = clifford.gamma(a), clifford.gamma(b)
            res = float(np.max(np.abs(ga @ gb + gb @ ga - 2 * eta[a, b] * clifford.IDENTITY)))
            worst = max(worst, res)
            if res > 1e-14:
                failures.append(f"e{a} e{b} + e{b} e{a} = {2 * eta[a, b]:+g} I")
    for a in range(4):
        g = clifford.gamma(a)
        sign = 1 if a == 0 else -1
        res = float(np.max(np.abs(g.conj().T - sign * g)))
        worst = max(worst, res)
        if res > 1e-14:
            failures.append(f"e{a} {'Hermitian' if a == 0 else 'skew-Hermitian'}")
    ok = not failures
    return ok, worst, "failed relations: " + "; ".join(failures) if failures else ""


def _quadrature() -> tuple[bool, float, str]:
    quad = sphere_quadrature(8, 16)
    st = np.sin(quad.theta)
    n = np.array([st * np.cos(quad.psi), st * np.sin(quad.psi), np.cos(quad.theta)])
    cases = [
        (np.ones_like(st), 4 * np.pi),
        (n[0] ** 2, 4 * np.pi / 3),
        (n[1] * n[2], 0.0),
        (n[2] ** 4, 4 * np.pi / 5),
        (n[0] ** 2 * n[1] ** 2, 4 * np.pi / 15),
    ]
    worst = max(abs(float(quad.integrate(f)) - exact) for f, exact in cases)
    return worst < 1e-13, worst, ""


def _random_points(rng, count, kappa=1.0):
    return [
        FramePoint(rng.uniform(0.2, 4.0), rng.uniform(0.2, np.pi - 0.2), rng.uniform(0, 2 * np.pi), kappa)
        for _ in range(count)
    ]


def _killing_vectors() -> tuple[bool, float, str]:
    rng = np.random.default_rng(11)
    worst = 0.0
    for p in _random_points(rng, 20):
        for name in SPATIAL_KILLING_FIELDS:
            worst = max(worst, float(np.max(np.abs(killing_residual(name, p)))))
    return worst < 1e-8, worst, ""


def _killing_spinors() -> tuple[bool, float, str]:
    rng = np.random.default_rng(12)
    worst = 0.0
    for p in _random_points(rng, 30):
        lv = rng.normal(size=4) + 1j * rng.normal(size=4)
        k = int(rng.integers(1, 4))
        res = np.linalg.norm(killing_residual_spinor(lv, p, k)) / np.linalg.norm(killing_spinor(lv, p))
        worst = max(worst, float(res))
    return worst < 1e-8, worst, ""


def _boundary_vs_Q() -> tuple[bool, float, str]:
    # Non-magnetic test data exercising every other entry of Q.
    charges = dict(E0=1.3, c=(0.1, -0.2, 0.15), c_prime=(0.05, 0.12, -0.07), J=(0.2, -0.1, 0.3), q=0.4)
    provider = SyntheticChargeProvider(1.0, **charges)
    quad = sphere_quadrature(24, 48)
    H = boundary_matrix(provider, 12.0, quad) / (8 * np.pi)
    Q = build_Q(ChargeSet(**charges))
    worst = float(np.max(np.abs(H - Q)))
    return worst < 1e-6, worst, ""


def _kn_charges() -> tuple[bool, float, str]:
    m, a, e, kap = 1.0, 0.3, 0.2, 1.0
    sig = 1 - kap**2 * a**2
    cs = compute_charges(provider_kn_ads_asymptotic(m, a, e, kap))
    expected = {"E0": m / sig**2, "J3": m * kap * a / sig**2, "q": e / sig, "b3": 4 * kap * a * e / (3 * sig)}
    flat = cs.flat()
    worst = max(abs(flat[k] - v) / abs(v) for k, v in expected.items())
    return worst < 1e-4, worst, ""


SUITES: dict[str, list[tuple[str, Callable[[], tuple[bool, float, str]]]]] = {
    "quick": [
        ("clifford relations", _clifford),
        ("sphere quadrature", _quadrature),
        ("Killing vector residuals", _killing_vectors),
        ("Killing spinor residuals", _killing_spinors),
    ],
}
SUITES["full"] = SUITES["quick"] + [
    ("boundary form vs Q (non-magnetic)", _boundary_vs_Q),
    ("Kerr-Newman-AdS charges", _kn_charges),
]


def run_suites(level: str) -> list[SuiteResult]:
    if level not in SUITES:
        raise ValueError(f"unknown verification level {level!r}")
    out = []
    for name, fn in SUITES[level]:
        t0 = time.perf_counter()
        try:
            ok, worst, detail = fn()
        except Exception as exc:  # a crashing suite is a failed suite
            ok, worst, detail = False, float("nan"), f"{type(exc).__name__}: {exc}"
        out.append(SuiteResult(name, ok, worst, time.perf_counter() - t0, detail))
    return out
