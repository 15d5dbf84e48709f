from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ads_charges.bounds import (
    EnergyConditionSample,
    bound_report,
    bound_thm51,
    bound_thm52,
    build_Q,
    dec_check,
    far_field_sample,
    mu_nu,
    psd_report,
    thm52_branches,
)
from ads_charges.charges import CHARGE_NAMES, ChargeSet
from ads_charges.hyperbolic import FramePoint
from ads_charges.spinor import q_form

KN = ChargeSet(E0=1.207583, J=(0, 0, 0.362275), q=0.219780, b=(0, 0, 0.087912))


def random_psd_charges(rng, uncharged=False):
    v = rng.normal(size=15) * rng.choice([0.1, 1.0, 3.0])
    if uncharged:
        v[10:] = 0
    d = dict(zip(CHARGE_NAMES, v))
    d["E0"] = 0.0
    shift = -np.linalg.eigvalsh(build_Q(ChargeSet.from_flat(d)))[0]
    d["E0"] = shift + abs(rng.normal()) * rng.choice([0.0, 1e-6, 1e-2, 1.0])
    return ChargeSet.from_flat(d)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    return q if np.linalg.det(q) > 0 else -q


def test_zero_charges():
    assert not np.any(build_Q(ChargeSet()))
    assert bound_thm52(ChargeSet()) == 0
    assert bound_thm51(ChargeSet()) == 0


def test_kn_entries():
    Q = build_Q(KN)
    assert np.isclose(Q[0, 0], 1.119671, atol=1e-12)
    assert np.isclose(Q[0, 2], -0.142495j, atol=1e-12)


def test_hermitian_random():
    rng = np.random.default_rng(0)
    for _ in range(20):
        Q = build_Q(ChargeSet.from_flat(dict(zip(CHARGE_NAMES, rng.normal(size=15)))))
        assert np.max(np.abs(Q - Q.conj().T)) <= 1e-14


def test_printed_entries():
    cs = ChargeSet(E0=2.0, c=(0.1, 0.2, 0.3), c_prime=(0.4, 0.5, 0.6), J=(0.7, 0.8, 0.9), q=1.1, b0=1.2,
                   b=(1.3, 1.4, 1.5))
    Q = build_Q(cs)
    i = 1j
    assert np.isclose(Q[0, 1], 0.1 - i * 0.2 + 1.3 - i * 1.4)
    assert np.isclose(Q[1, 1], 2.0 + 0.3 + 1.2 + 1.5)
    assert np.isclose(Q[2, 2], 2.0 + 0.3 - 1.2 - 1.5)
    assert np.isclose(Q[3, 3], 2.0 - 0.3 - 1.2 + 1.5)
    assert np.isclose(Q[0, 2], 0.6 + i * (1.1 - 0.9))
    assert np.isclose(Q[0, 3], -0.4 + 0.8 + i * (0.5 + 0.7))
    assert np.isclose(Q[1, 2], -0.4 - 0.8 + i * (0.7 - 0.5))
    assert np.isclose(Q[1, 3], -0.6 + i * (0.9 + 1.1))
    # lower diagonal block: b2 enters with the sign fixed by the boundary integrals
    assert np.isclose(Q[2, 3], -0.1 + i * 0.2 + 1.3 - i * 1.4)


def test_psd_report_identity():
    rep = psd_report(build_Q(ChargeSet(E0=1.0)))
    assert len(rep.minors) == 15
    assert all(v > 0 for v in rep.minors.values())
    assert rep.psd


def test_psd_report_kn():
    assert psd_report(build_Q(KN)).psd


def test_not_psd_with_large_charge():
    rep = psd_report(build_Q(ChargeSet(E0=0.0, q=1.0)))
    assert rep.minors[(0, 2)] < 0
    assert not rep.psd


def test_thm51_examples():
    assert np.isclose(bound_thm51(ChargeSet(c_prime=(1, 0, 0), J=(0, 1, 0))), 2.0)
    assert np.isclose(bound_thm51(ChargeSet(c=(1, 0, 0))), math.sqrt(2) - 1)
    with pytest.raises(ValueError):
        bound_thm51(ChargeSet(q=0.1))
    with pytest.raises(ValueError):
        bound_thm51(ChargeSet(b=(0, 0, 0.1)))


def test_thm52_kn_branches():
    br = thm52_branches(KN)
    assert np.isclose(br[0], math.sqrt(0.0897732), atol=1e-6)
    assert np.isclose(br[0], 0.299622, atol=1e-6)
    assert bound_thm52(KN) == max(br)
    assert KN.E0 >= bound_thm52(KN)


def test_thm52_magnetic_only():
    cs = ChargeSet(E0=1.0, b0=1.0)
    assert thm52_branches(cs)[0] == 1.0
    assert bound_thm52(cs) == 1.0
    rep = psd_report(build_Q(cs))
    assert rep.psd and abs(rep.min_eigenvalue) < 1e-14


def test_psd_implies_bounds():
    rng = np.random.default_rng(1)
    worst52 = worst51 = math.inf
    for n in range(10_000):
        cs = random_psd_charges(rng, uncharged=n % 4 == 0)
        if not psd_report(build_Q(cs)).psd:
            continue
        worst52 = min(worst52, cs.E0 - bound_thm52(cs))
        if cs.q == 0 and cs.b0 == 0 and not any(cs.b):
            worst51 = min(worst51, cs.E0 - bound_thm51(cs))
    assert worst52 >= -1e-10
    assert worst51 >= -1e-10


def test_thm52_rotation_invariant():
    rng = np.random.default_rng(2)
    cs = ChargeSet.from_flat(dict(zip(CHARGE_NAMES, rng.normal(size=15))))
    base = bound_thm52(cs)
    for _ in range(100):
        R = random_rotation(rng)
        rot = ChargeSet(E0=cs.E0, c=R @ cs.c, c_prime=R @ cs.c_prime, J=R @ cs.J, q=cs.q, b0=cs.b0, b=R @ cs.b)
        assert abs(bound_thm52(rot) - base) < 1e-12


def test_q_form_nonnegative_when_psd():
    rng = np.random.default_rng(3)
    for _ in range(10):
        Q = build_Q(random_psd_charges(rng))
        for _ in range(10):
            lv = rng.normal(size=4) + 1j * rng.normal(size=4)
            assert q_form(lv, Q) >= -1e-10 * np.linalg.norm(lv) ** 2 * (1 + np.abs(Q).max())


def test_bound_report_json():
    rep = bound_report(KN)
    doc = rep.as_dict()
    assert doc["psd"] and doc["passed"]
    assert set(doc["branches"]) == {"branch1", "branch2", "branch3", "branch4"}
    assert doc["active_branch"] == 3
    assert doc["thm51_bound"] is None


def test_mu_nu_vacuum():
    for kap in (0.5, 1.0, 2.0):
        s = mu_nu(-6 * kap**2, np.zeros((3, 3)), np.zeros(3), np.zeros(3), kap)
        assert abs(s.mu) <= 1e-14 and s.nu == (0, 0, 0) and s.nu_prime == (0, 0, 0)
        ok, margin = dec_check(s)
        assert ok and abs(margin) <= 1e-14


def test_mu_nu_cross_term():
    s = mu_nu(0.0, np.zeros((3, 3)), [1.5, 0, 0], [0, 0.7, 0], 1.0)
    assert np.isclose(s.nu[2], 2 * 0.7 * 1.5)
    assert np.isclose(s.nu_prime[2], -2 * 0.7 * 1.5)


@settings(max_examples=30)
@given(st.lists(st.floats(-5, 5), min_size=9, max_size=9))
def test_mu_momentum_homogeneous(vals):
    p = np.array(vals).reshape(3, 3)
    p = p + p.T
    s1 = mu_nu(0.0, p, np.zeros(3), np.zeros(3), 1.0)
    s2 = mu_nu(0.0, 2 * p, np.zeros(3), np.zeros(3), 1.0)
    assert np.isclose(s2.mu - 3, 4 * (s1.mu - 3), rtol=1e-12, atol=1e-9)


def test_dec_examples():
    kap = 1.3
    assert dec_check(EnergyConditionSample(0, (0, 0, 0), (0, 0, 0), 0, 0, 0, kap)) == (True, 0.0)
    ok, margin = dec_check(EnergyConditionSample(10 * kap**2, (0, 0, 0), (0, 0, 0), 0, 0, kap, kap))
    assert ok and abs(margin - kap**2) < 1e-12
    ok, margin = dec_check(EnergyConditionSample(0, (0, 0, 0), (0, 0, 0), kap**2, 0, 0, kap))
    assert not ok and abs(margin + kap**2) < 1e-12


def test_far_field_margin_decays(kn_provider):
    for r in (6.0, 8.0, 10.0):
        for th in (0.4, 1.3, 2.5):
            _, margin = dec_check(far_field_sample(kn_provider, FramePoint(r, th, 0.7)))
            assert abs(margin) <= 10 * math.exp(-2 * r)
