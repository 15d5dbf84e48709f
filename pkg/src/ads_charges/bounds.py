"""The Hermitian charge matrix Q, its positivity, the energy lower bounds and
the pointwise modified dominant energy condition.

Q is assembled from 2x2 blocks [[E, L], [L^dagger, Ehat]].  Positivity of Q
is what the spinorial argument yields; the lower bounds on E0 are consequences
of non-negative principal minors.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .charges import ChargeSet, format_value
from .hyperbolic import FramePoint, frame_derivative
from .initial_data import (
    InitialDataProvider,
    covariant_tensor_derivative,
    covariant_vector_divergence,
)

__all__ = [
    "build_Q",
    "PSDReport",
    "psd_report",
    "bound_thm51",
    "thm52_branches",
    "bound_thm52",
    "BoundReport",
    "bound_report",
    "EnergyConditionSample",
    "mu_nu",
    "dec_check",
    "far_field_sample",
]


def build_Q(cs: ChargeSet) -> np.ndarray:
    """4x4 Hermitian charge matrix.

    The off-diagonal entry of the lower diagonal block is
    Ehat_12 = -c1 + i c2 + b1 - i b2; this is the sign produced by the
    boundary integrals of the Killing spinors (see tests/test_boundary.py).
    """
    E0, q, b0 = cs.E0, cs.q, cs.b0
    c1, c2, c3 = cs.c
    d1, d2, d3 = cs.c_prime
    J1, J2, J3 = cs.J
    b1, b2, b3 = cs.b
    i = 1j
    E = np.array(
        [
            [E0 - c3 + b0 - b3, c1 - i * c2 + b1 - i * b2],
            [c1 + i * c2 + b1 + i * b2, E0 + c3 + b0 + b3],
        ]
    )
    Ehat = np.array(
        [
            [E0 + c3 - b0 - b3, -c1 + i * c2 + b1 - i * b2],
            [-c1 - i * c2 + b1 + i * b2, E0 - c3 - b0 + b3],
        ]
    )
    L = np.array(
        [
            [d3 + i * (q - J3), -d1 + J2 + i * (d2 + J1)],
            [-d1 - J2 + i * (J1 - d2), -d3 + i * (J3 + q)],
        ]
    )
    return np.block([[E, L], [L.conj().T, Ehat]])


@dataclass
class PSDReport:
    minors: dict[tuple[int, ...], float]
    eigenvalues: np.ndarray
    tol: float

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def psd(self) -> bool:
        return self.min_eigenvalue >= -self.tol

    def negative_minors(self) -> list[tuple[int, ...]]:
        return [k for k, v in self.minors.items() if v < -self.tol]


def psd_report(Q: np.ndarray, tol: float = 1e-12) -> PSDReport:
    """All 15 principal minors (0-based index tuples), sorted eigenvalues and the verdict."""
    Q = np.asarray(Q, dtype=complex)
    if np.max(np.abs(Q - Q.conj().T)) > 1e-10:
        raise ValueError("Q is not Hermitian")
    minors = {}
    for size in range(1, 5):
        for idx in itertools.combinations(range(4), size):
            minors[idx] = float(np.real(np.linalg.det(Q[np.ix_(idx, idx)])))
    return PSDReport(minors, np.linalg.eigvalsh(Q), tol)


def _norm(v) -> float:
    return float(np.linalg.norm(v))


def _pos(x: float) -> float:
    return max(x, 0.0)


def bound_thm51(cs: ChargeSet, atol: float = 1e-12) -> float:
    """Lower bound on E0 for data without electromagnetic charges (q = b0 = b = 0)."""
    if abs(cs.q) > atol or abs(cs.b0) > atol or _norm(cs.b) > atol:
        raise ValueError("this bound applies only when q = b0 = b = 0")
    c = _norm(cs.c)
    L = math.sqrt(cs.L_squared)
    F2 = math.sqrt(2) * c * L + 2**0.25 * math.sqrt(c) * L**1.5
    cross = _norm(np.cross(cs.c_prime, cs.J))
    first = math.sqrt(0.5 * L * L + 2 * c * c) - c
    second = math.sqrt(_pos(0.5 * L * L + 2 * cross - F2)) - c
    return max(first, second)


def thm52_branches(cs: ChargeSet) -> tuple[float, float, float, float]:
    """The four lower bounds on E0 valid for general charges."""
    c, cp, J, b = (np.asarray(v) for v in (cs.c, cs.c_prime, cs.J, cs.b))
    b0, q = cs.b0, cs.q
    L2 = cs.L_squared
    A = cs.A
    nb, nc = _norm(b), _norm(c)
    S = float(np.sum((b0 * c + q * J) ** 2))
    X = float(np.dot(np.cross(cp, J), np.cross(cp, J)))
    root = math.sqrt(S + X)
    F = (
        32 * X
        + 4 * float(np.dot(np.cross(c, J), np.cross(c, J)))
        + 36 * S
        + 4 * float(np.dot(b, c)) ** 2
        + 4 * float(np.dot(b, J)) ** 2
        + 4 * float(np.dot(b, cp)) ** 2
        - 8 * math.sqrt(2) * root * A
    )
    one = math.sqrt(b0 * b0 + L2 / 4)
    two = math.sqrt((nc * nc + nb * nb) / 2 + L2 / 8)
    three = math.sqrt(A + nb * nb + nc * nc) - nb - nc
    four = math.sqrt(_pos(A - 4 * math.sqrt(2) * root + math.sqrt(_pos(F))))
    return one, two, three, four


def bound_thm52(cs: ChargeSet) -> float:
    """Largest of the four general lower bounds on E0."""
    return max(thm52_branches(cs))


@dataclass
class BoundReport:
    E0: float
    branches: tuple[float, ...]
    psd: bool
    min_eigenvalue: float
    Q: np.ndarray
    thm51: float | None = None
    slack: float = 1e-10
    notes: list[str] = field(default_factory=list)

    @property
    def bound(self) -> float:
        return max(self.branches)

    @property
    def active_branch(self) -> int:
        return int(np.argmax(self.branches)) + 1

    @property
    def passed(self) -> bool:
        ok = self.E0 >= self.bound - self.slack
        if self.thm51 is not None:
            ok = ok and self.E0 >= self.thm51 - self.slack
        return ok

    def as_dict(self) -> dict:
        r = lambda x: float(format_value(x))  # noqa: E731
        return {
            "E0": r(self.E0),
            "branches": {f"branch{i}": r(v) for i, v in enumerate(self.branches, 1)},
            "bound": r(self.bound),
            "active_branch": self.active_branch,
            "thm51_bound": None if self.thm51 is None else r(self.thm51),
            "psd": self.psd,
            "min_eigenvalue": r(self.min_eigenvalue),
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"


def bound_report(cs: ChargeSet, tol: float = 1e-12) -> BoundReport:
    Q = build_Q(cs)
    rep = psd_report(Q, tol)
    try:
        t51 = bound_thm51(cs)
    except ValueError:
        t51 = None
    return BoundReport(cs.E0, thm52_branches(cs), rep.psd, rep.min_eigenvalue, Q, t51)


@dataclass(frozen=True)
class EnergyConditionSample:
    mu: float
    nu: tuple[float, float, float]
    nu_prime: tuple[float, float, float]
    divE: float
    divB: float
    absB: float
    kappa: float


_EPS = np.zeros((3, 3, 3))
for _i, _j, _k in itertools.permutations(range(3)):
    _EPS[_i, _j, _k] = np.linalg.det(np.eye(3)[[_i, _j, _k]])


def mu_nu(
    R: float,
    p,
    E,
    B,
    kappa: float,
    div_p=(0.0, 0.0, 0.0),
    grad_tr_p=(0.0, 0.0, 0.0),
    divE: float = 0.0,
    divB: float = 0.0,
) -> EnergyConditionSample:
    """Energy density mu and the momentum densities nu, nu' of Einstein-Maxwell data.

    ``div_p[i] = nabla_j p_ij`` and ``grad_tr_p[i] = nabla_i tr p``.
    """
    p = np.asarray(p, dtype=float)
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    mu = 0.5 * (R + np.trace(p) ** 2 - np.sum(p * p)) + 3 * kappa**2 - E @ E - B @ B
    base = np.asarray(div_p, dtype=float) - np.asarray(grad_tr_p, dtype=float)
    em = 2 * np.einsum("ijk,j,k->i", _EPS, B, E)
    return EnergyConditionSample(
        float(mu),
        tuple(float(x) for x in base - em),
        tuple(float(x) for x in base + em),
        float(divE),
        float(divB),
        float(np.linalg.norm(B)),
        float(kappa),
    )


def dec_check(s: EnergyConditionSample) -> tuple[bool, float]:
    """(holds, margin) for the modified dominant energy condition."""
    div2 = s.divE**2 + s.divB**2
    nu2 = float(np.dot(s.nu, s.nu))
    nup2 = float(np.dot(s.nu_prime, s.nu_prime))
    rhs = max(math.sqrt(nu2 / 4 + div2) + s.kappa * s.absB, math.sqrt(nup2 / 4 + div2) + 4 * s.kappa * s.absB)
    margin = s.mu / 2 - rhs
    return margin >= 0, float(margin)


def far_field_sample(
    provider: InitialDataProvider, point: FramePoint, R: float | None = None, h: float = 1e-5
) -> EnergyConditionSample:
    """Energy-condition data of a provider at a single point far out.

    Derivatives of p, E, B come from central differences with background
    covariant corrections.  The scalar curvature defaults to the background
    value -6 kappa^2, which neglects corrections of the same order as the
    truncated terms of asymptotic providers.
    """
    kap = provider.kappa
    sample = provider.evaluate(point)
    fields = lambda q: provider.fields(q)  # noqa: E731
    dp = frame_derivative(lambda q: fields(q)[1], point, h)
    dE = frame_derivative(lambda q: fields(q)[2], point, h)
    dB = frame_derivative(lambda q: fields(q)[3], point, h)
    nab_p = covariant_tensor_derivative(sample.p, dp, point)
    div_p = np.einsum("...jij->...i", nab_p)
    grad_tr = np.einsum("...ijj->...i", nab_p)
    divE = covariant_vector_divergence(sample.E, dE, point)
    divB = covariant_vector_divergence(sample.B, dB, point)
    return mu_nu(
        -6 * kap**2 if R is None else R,
        sample.p,
        sample.E,
        sample.B,
        kap,
        div_p,
        grad_tr,
        float(divE),
        float(divB),
    )
