"""Asymptotically AdS Einstein-Maxwell initial data on the hyperbolic chart.

All tensors are frame components in the background orthonormal frame e_i
(not coordinate components): g_ij = delta_ij + a_ij, p_ij, E^i, B^i.

A provider maps a (possibly array-valued) :class:`FramePoint` to a
:class:`FieldSample`.  Subclasses implement :meth:`InitialDataProvider.fields`
and may override :meth:`InitialDataProvider.metric_derivative` with analytic
values; otherwise central differences are used.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np
from scipy import integrate, optimize

from .hyperbolic import FramePoint, SphereQuadrature, frame_connection, frame_derivative, sphere_quadrature

__all__ = [
    "FieldSample",
    "InitialDataProvider",
    "AspectVector",
    "DecayReport",
    "AdSProvider",
    "ReissnerNordstromAdSProvider",
    "KerrNewmanAdSAsymptoticProvider",
    "FunctionProvider",
    "SyntheticChargeProvider",
    "aspect",
    "covariant_tensor_derivative",
    "covariant_vector_divergence",
    "covariant_metric_derivative",
    "metric_divergence",
    "validate_decay",
    "provider_ads",
    "provider_rn_ads",
    "provider_kn_ads_asymptotic",
]


@dataclass(frozen=True)
class FieldSample:
    """Field values at sample points.

    Shapes (leading axes follow the point shape): ``a``, ``p``: (..., 3, 3);
    ``E``, ``B``: (..., 3); ``da[..., i, j, k] = e_k(a_ij)``.
    """

    a: np.ndarray
    p: np.ndarray
    E: np.ndarray
    B: np.ndarray
    da: np.ndarray

    @property
    def g(self) -> np.ndarray:
        return np.eye(3) + self.a


class InitialDataProvider(ABC):
    """Evaluation contract for asymptotically AdS initial data.

    Providers are immutable; evaluation is deterministic and side-effect free.
    """

    name = "provider"

    def __init__(self, kappa: float, tau: float, **params: float) -> None:
        if not kappa > 0:
            raise ValueError(f"kappa must be positive, got {kappa}")
        self.kappa = float(kappa)
        self.tau = float(tau)
        self.params: Mapping[str, float] = dict(params)

    @abstractmethod
    def fields(self, point: FramePoint) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Return (a, p, E, B) at ``point``."""

    def metric_derivative(self, point: FramePoint) -> np.ndarray:
        return frame_derivative(lambda q: self.fields(q)[0], point)

    def evaluate(self, point: FramePoint) -> FieldSample:
        if point.kappa != self.kappa:
            raise ValueError(f"point kappa {point.kappa} does not match provider kappa {self.kappa}")
        point.check_regular()
        a, p, E, B = self.fields(point)
        return FieldSample(a, p, E, B, self.metric_derivative(point))

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}(kappa={self.kappa!r}{', ' if args else ''}{args})"


def _zeros(point: FramePoint, *tail: int) -> np.ndarray:
    return np.zeros(point.shape + tail)


class AdSProvider(InitialDataProvider):
    """The hyperbolic slice itself: every field vanishes."""

    name = "ads"

    def __init__(self, kappa: float) -> None:
        super().__init__(kappa, tau=math.inf)

    def fields(self, point):
        return _zeros(point, 3, 3), _zeros(point, 3, 3), _zeros(point, 3), _zeros(point, 3)

    def metric_derivative(self, point):
        return _zeros(point, 3, 3, 3)


class KerrNewmanAdSAsymptoticProvider(InitialDataProvider):
    """Leading asymptotics of a t-slice of Kerr-Newman-AdS in the hyperbolic chart.

    Only the terms up to order exp(-3 kappa r) are kept; with the oblateness
    factor ``B = 1 - a^2 kappa^2 sin^2(theta)``::

        a_11 = 16 m kappa B^(-3/2) X,     a_33 = 16 m a^2 kappa^3 B^(-5/2) sin^2 X,
        p_13 = 24 m a kappa^3 B^(-5/2) sin X,
        E^1 = 4 kappa^2 e B^(-3/2) exp(-2 kappa r),  B^1 = 16 kappa^3 e a B^(-5/2) cos X,

    with X = exp(-3 kappa r).
    """

    name = "kn-ads"

    def __init__(self, m: float, a: float, e: float, kappa: float) -> None:
        super().__init__(kappa, tau=3.0, m=m, a=a, e=e)
        self.sigma = 1.0 - kappa**2 * a**2
        if self.sigma <= 0:
            raise ValueError(f"kappa^2 a^2 must be < 1 (Sigma = {self.sigma:.6g} <= 0)")
        self.m, self.a, self.e = float(m), float(a), float(e)

    def _pieces(self, point):
        kap, m, a, e = self.kappa, self.m, self.a, self.e
        r = np.asarray(point.r, dtype=float)
        th = np.asarray(point.theta, dtype=float)
        st, ct = np.sin(th), np.cos(th)
        ob = 1.0 - a * a * kap * kap * st * st
        x3 = np.exp(-3 * kap * r)
        return kap, m, a, e, r, st, ct, ob, x3

    def fields(self, point):
        kap, m, a, e, r, st, ct, ob, x3 = self._pieces(point)
        A = _zeros(point, 3, 3)
        P = _zeros(point, 3, 3)
        E = _zeros(point, 3)
        B = _zeros(point, 3)
        A[..., 0, 0] = 16 * m * kap * ob**-1.5 * x3
        A[..., 2, 2] = 16 * m * a * a * kap**3 * ob**-2.5 * st * st * x3
        P[..., 0, 2] = P[..., 2, 0] = 24 * m * a * kap**3 * ob**-2.5 * st * x3
        E[..., 0] = 4 * kap * kap * e * ob**-1.5 * np.exp(-2 * kap * r)
        B[..., 0] = 16 * kap**3 * e * a * ob**-2.5 * ct * x3
        return A, P, E, B

    def metric_derivative(self, point):
        kap, m, a, e, r, st, ct, ob, x3 = self._pieces(point)
        A = self.fields(point)[0]
        dA = _zeros(point, 3, 3, 3)
        dA[..., 0] = -3 * kap * A
        e2 = kap / np.sinh(kap * r)
        a2k2 = a * a * kap * kap
        dth11 = 16 * m * kap * x3 * 3 * a2k2 * st * ct * ob**-2.5
        dth33 = 16 * m * a * a * kap**3 * x3 * (
            5 * a2k2 * st * ct * ob**-3.5 * st * st + 2 * st * ct * ob**-2.5
        )
        dA[..., 0, 0, 1] = e2 * dth11
        dA[..., 2, 2, 1] = e2 * dth33
        return dA


class ReissnerNordstromAdSProvider(InitialDataProvider):
    """Static slice of Reissner-Nordstrom-AdS, f = 1 - 2M/R + Q^2/R^2 + kappa^2 R^2.

    The areal radius R is traded for the proper radial distance r with
    dr/dR = f^(-1/2), normalised so that R - sinh(kappa r)/kappa -> 0.  Then
    g = dr^2 + R(r)^2 dOmega^2, so a_11 = 0 and
    a_22 = a_33 = kappa^2 R^2 / sinh^2(kappa r) - 1.

    The perturbation is of order exp(-3 kappa r) while R is of order
    exp(kappa r), so every difference is evaluated in cancellation-free form.
    """

    name = "rn-ads"

    def __init__(self, M: float, Q: float, kappa: float) -> None:
        if M < 0:
            raise ValueError(f"mass must be non-negative, got {M}")
        super().__init__(kappa, tau=3.0, M=M, Q=Q)
        self.M, self.Q = float(M), float(Q)
        self.horizon = self._outer_root()
        self._radial = lru_cache(maxsize=4096)(self._radial_uncached)

    def _outer_root(self) -> float:
        # roots of R^2 f(R) = kappa^2 R^4 + R^2 - 2 M R + Q^2
        roots = np.roots([self.kappa**2, 0.0, 1.0, -2 * self.M, self.Q**2])
        real = [z.real for z in roots if abs(z.imag) < 1e-12 * max(1.0, abs(z)) and z.real > 0]
        return max(real) if real else 0.0

    def f(self, R):
        return 1 - 2 * self.M / R + self.Q**2 / R**2 + self.kappa**2 * R**2

    def _excess(self, x: float) -> float:
        # f^(-1/2) - (1 + kappa^2 x^2)^(-1/2) without cancellation
        h = 1 + self.kappa**2 * x * x
        f = self.f(x)
        sf, sh = math.sqrt(f), math.sqrt(h)
        return (2 * self.M / x - self.Q**2 / (x * x)) / (sf * sh * (sf + sh))

    def _tail(self, R: float) -> float:
        if self.M == 0 and self.Q == 0:
            return 0.0
        # x = R_h + u^2 removes the inverse square-root growth of f^(-1/2) at the horizon
        rh = self.horizon
        u0 = math.sqrt(R - rh)
        val, _ = integrate.quad(
            lambda u: 2 * u * self._excess(rh + u * u), u0, math.inf, epsabs=0.0, epsrel=1e-13, limit=200
        )
        return val

    def chart_radius(self, R: float) -> float:
        """Proper-distance coordinate r of the sphere of areal radius R."""
        if R <= self.horizon:
            raise ValueError(f"R = {R} is not outside the horizon R_h = {self.horizon}")
        return math.asinh(self.kappa * R) / self.kappa - self._tail(R)

    def _radial_uncached(self, r: float) -> tuple[float, float, float]:
        """(R, a_22, d a_22 / dr) at chart radius r."""
        kap = self.kappa
        if self.M == 0 and self.Q == 0:
            return math.sinh(kap * r) / kap, 0.0, 0.0
        floor = self.horizon if self.horizon > 0 else 0.0
        guess = max(math.sinh(kap * r) / kap, 2 * floor, 1e-6)
        hi = 2 * guess
        while self.chart_radius(hi) < r:
            hi *= 2
        # shrink towards the horizon only as far as needed to bracket the root
        lo = floor + 0.5 * (guess - floor)
        while self.chart_radius(lo) > r:
            lo = floor + 0.25 * (lo - floor)
            if lo - floor <= 1e-12 * max(1.0, floor):
                raise ValueError(f"chart radius r = {r} is not in the exterior region of the chart map")
        R = optimize.brentq(lambda x: self.chart_radius(x) - r, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
        big_a = math.asinh(kap * R)
        d = kap * self._tail(R)
        coth_a = math.sqrt(1 + (kap * R) ** 2) / (kap * R)
        D = 2 * math.sinh(d / 2) ** 2 - coth_a * math.sinh(d)
        s = -D * (2 + D) / (1 + D) ** 2
        f = self.f(R)
        h = 1 + (kap * R) ** 2
        x_part = (-2 * self.M / R + self.Q**2 / R**2) / (R * (math.sqrt(f) + math.sqrt(h)))
        y_part = -kap * math.sinh(d) / (kap * R * math.sinh(big_a - d))
        ds = (1 + s) * 2 * (x_part + y_part)
        return R, s, ds

    def _radial_arrays(self, r):
        r = np.asarray(r, dtype=float)
        flat = r.ravel()
        uniq, inv = np.unique(flat, return_inverse=True)
        vals = np.array([self._radial(float(x)) for x in uniq]).reshape(-1, 3)
        out = vals[inv].reshape(r.shape + (3,))
        return out[..., 0], out[..., 1], out[..., 2]

    def areal_radius(self, r):
        return self._radial_arrays(r)[0]

    def fields(self, point):
        R, s, _ = self._radial_arrays(np.broadcast_to(np.asarray(point.r, dtype=float), point.shape))
        A = _zeros(point, 3, 3)
        A[..., 1, 1] = s
        A[..., 2, 2] = s
        E = _zeros(point, 3)
        E[..., 0] = self.Q / R**2
        return A, _zeros(point, 3, 3), E, _zeros(point, 3)

    def metric_derivative(self, point):
        _, _, ds = self._radial_arrays(np.broadcast_to(np.asarray(point.r, dtype=float), point.shape))
        dA = _zeros(point, 3, 3, 3)
        dA[..., 1, 1, 0] = ds
        dA[..., 2, 2, 0] = ds
        return dA


Field = Callable[[FramePoint], np.ndarray]


class FunctionProvider(InitialDataProvider):
    """User-defined data from callables; omitted fields are zero.

    Each callable maps a point to an array of shape ``point.shape + (3, 3)``
    (for ``a``, ``p``) or ``point.shape + (3,)`` (for ``E``, ``B``).  Metric
    derivatives come from central differences unless ``da`` is given.
    """

    name = "function"

    def __init__(
        self,
        kappa: float,
        tau: float = 3.0,
        a: Field | None = None,
        p: Field | None = None,
        E: Field | None = None,
        B: Field | None = None,
        da: Field | None = None,
    ) -> None:
        super().__init__(kappa, tau)
        self._a, self._p, self._E, self._B, self._da = a, p, E, B, da

    def fields(self, point):
        def get(fn, *tail):
            if fn is None:
                return _zeros(point, *tail)
            return np.broadcast_to(np.asarray(fn(point), dtype=float), point.shape + tail).copy()

        return get(self._a, 3, 3), get(self._p, 3, 3), get(self._E, 3), get(self._B, 3)

    def metric_derivative(self, point):
        if self._da is not None:
            return np.asarray(self._da(point), dtype=float)
        return super().metric_derivative(point)


class SyntheticChargeProvider(InitialDataProvider):
    """Test data whose limiting charges are prescribed.

    Fields (X = exp(-3 kappa r), n = unit radial direction)::

        a_11   = 16 kappa (E0 + 3 c.n) X
        p_1j   = 24 kappa^2 X sum_i (c'_i grad(n^i)_j + J_i rot_i^j)   j = 2, 3
        E^1    = 4 kappa^2 q exp(-2 kappa r)
        B^1    = 4 kappa^2 (b0 + 3 b.n) X

    where grad(n^i) and rot_i are the angular parts of the boost and rotation
    Killing fields.  This is not a solution of the constraints; it exercises
    every entry of the charge matrix.
    """

    name = "builtin-test"

    def __init__(self, kappa: float, E0=1.0, c=(0, 0, 0), c_prime=(0, 0, 0), J=(0, 0, 0), q=0.0, b0=0.0, b=(0, 0, 0)):
        super().__init__(kappa, tau=3.0)
        self.E0, self.q, self.b0 = float(E0), float(q), float(b0)
        self.c, self.c_prime, self.J, self.b = (np.asarray(v, dtype=float) for v in (c, c_prime, J, b))
        self.params = dict(E0=self.E0, c=tuple(self.c), c_prime=tuple(self.c_prime), J=tuple(self.J),
                           q=self.q, b0=self.b0, b=tuple(self.b))

    def fields(self, point):
        kap = self.kappa
        r = np.asarray(point.r, dtype=float)
        th = np.asarray(point.theta, dtype=float)
        ps = np.asarray(point.psi, dtype=float)
        st, ct, sp, cp = np.sin(th), np.cos(th), np.sin(ps), np.cos(ps)
        n = np.stack(np.broadcast_arrays(st * cp, st * sp, ct), axis=-1)
        # angular parts (e2, e3 components) of grad n^i and of the rotation fields V_i
        grad = np.stack(np.broadcast_arrays(ct * cp, -sp, ct * sp, cp, -st, 0 * st), axis=-1).reshape(np.shape(n)[:-1] + (3, 2))
        rot = np.stack(np.broadcast_arrays(-sp, -ct * cp, cp, -ct * sp, 0 * st, st), axis=-1).reshape(np.shape(n)[:-1] + (3, 2))
        x3 = np.exp(-3 * kap * r)
        A = _zeros(point, 3, 3)
        P = _zeros(point, 3, 3)
        E = _zeros(point, 3)
        B = _zeros(point, 3)
        A[..., 0, 0] = 16 * kap * (self.E0 + 3 * n @ self.c) * x3
        tang = np.einsum("i,...ij->...j", self.c_prime, grad) + np.einsum("i,...ij->...j", self.J, rot)
        P[..., 0, 1:] = 24 * kap**2 * x3[..., None] * tang if np.ndim(x3) else 24 * kap**2 * x3 * tang
        P[..., 1:, 0] = P[..., 0, 1:]
        E[..., 0] = 4 * kap**2 * self.q * np.exp(-2 * kap * r)
        B[..., 0] = 4 * kap**2 * (self.b0 + 3 * n @ self.b) * x3
        return A, P, E, B


@dataclass(frozen=True)
class AspectVector:
    """Energy aspect ``Ecal[..., i]`` and momentum aspect ``Pcal[..., k, i]``."""

    Ecal: np.ndarray
    Pcal: np.ndarray


def covariant_tensor_derivative(t: np.ndarray, dt: np.ndarray, point: FramePoint) -> np.ndarray:
    """Background covariant derivative of a 2-tensor, ``out[..., k, i, j] = (nabla_k t)_ij``.

    ``dt[..., i, j, k] = e_k(t_ij)``.
    """
    conn = frame_connection(point).coeffs
    d = np.moveaxis(dt, -1, -3)
    return d - np.einsum("...kil,...lj->...kij", conn, t) - np.einsum("...kjl,...il->...kij", conn, t)


def covariant_vector_divergence(v: np.ndarray, dv: np.ndarray, point: FramePoint) -> np.ndarray:
    """nabla_i V^i from frame components ``v[..., i]`` and ``dv[..., i, k] = e_k(V^i)``."""
    conn = frame_connection(point).coeffs
    return np.einsum("...ii->...", dv) + np.einsum("...ili,...l->...", conn, v)


def covariant_metric_derivative(sample: FieldSample, point: FramePoint) -> np.ndarray:
    """Background covariant derivative ``out[..., k, i, j] = (nabla_k a)_ij``."""
    return covariant_tensor_derivative(sample.a, sample.da, point)


def metric_divergence(sample: FieldSample, point: FramePoint) -> np.ndarray:
    """nabla^j g_ij - nabla_i tr(g) as a frame covector."""
    nab = covariant_metric_derivative(sample, point)
    div = np.einsum("...jij->...i", nab)
    grad_tr = np.einsum("...ijj->...i", nab)
    return div - grad_tr


def aspect(provider: InitialDataProvider, p: FramePoint, sample: FieldSample | None = None) -> AspectVector:
    if sample is None:
        sample = provider.evaluate(p)
    kap = provider.kappa
    a, g = sample.a, sample.g
    tr_a = np.trace(a, axis1=-2, axis2=-1)
    ecal = metric_divergence(sample, p) - kap * (a[..., 0, :] - g[..., 0, :] * tr_a[..., None])
    tr_p = np.trace(sample.p, axis1=-2, axis2=-1)
    pcal = sample.p - g * tr_p[..., None, None]
    return AspectVector(ecal, pcal)


@dataclass
class DecayReport:
    """Fitted exponential decay orders sigma (field ~ exp(-sigma kappa r))."""

    tau: float
    radii: list[float]
    sigma: dict[str, float]
    required: dict[str, float]
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def describe(self, name: str) -> str:
        s = self.sigma[name]
        return "infinite order" if math.isinf(s) else f"{s:.4g}"


def validate_decay(
    provider: InitialDataProvider,
    radii,
    tau: float,
    quad: SphereQuadrature | None = None,
    slack: float = 0.02,
) -> DecayReport:
    """Fit sup-norm decay rates of a, nabla a, p, E, B over spheres S_r.

    A field passes when its fitted order is at least ``required * (1 - slack)``;
    the slack absorbs subleading exponentials over a finite radius window.
    """
    radii = [float(x) for x in radii]
    if len(radii) < 3:
        raise ValueError("need at least 3 radii")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    quad = quad or sphere_quadrature(8, 16)
    kap = provider.kappa
    sups: dict[str, list[float]] = {k: [] for k in ("a", "grad_a", "p", "E", "B")}
    for r in radii:
        pt = quad.points(r, kap)
        s = provider.evaluate(pt)
        nab = covariant_metric_derivative(s, pt)
        sups["a"].append(np.max(np.linalg.norm(s.a, axis=(-2, -1))))
        sups["grad_a"].append(np.max(np.sqrt(np.sum(nab**2, axis=(-3, -2, -1)))))
        sups["p"].append(np.max(np.linalg.norm(s.p, axis=(-2, -1))))
        sups["E"].append(np.max(np.linalg.norm(s.E, axis=-1)))
        sups["B"].append(np.max(np.linalg.norm(s.B, axis=-1)))
    x = kap * np.asarray(radii)
    sigma = {}
    for name, vals in sups.items():
        vals = np.asarray(vals)
        mask = vals > 0
        if mask.sum() < 2:
            sigma[name] = math.inf
            continue
        slope = np.polyfit(x[mask], np.log(vals[mask]), 1)[0]
        sigma[name] = float(-slope)
    required = {"a": tau, "grad_a": tau, "p": tau, "E": 2.0, "B": 2.0}
    violations = [k for k in sigma if sigma[k] < required[k] * (1 - slack)]
    return DecayReport(tau, radii, sigma, required, violations)


def provider_ads(kappa: float) -> AdSProvider:
    return AdSProvider(kappa)


def provider_rn_ads(M: float, Q: float, kappa: float) -> ReissnerNordstromAdSProvider:
    return ReissnerNordstromAdSProvider(M, Q, kappa)


def provider_kn_ads_asymptotic(m: float, a: float, e: float, kappa: float) -> KerrNewmanAdSAsymptoticProvider:
    return KerrNewmanAdSAsymptoticProvider(m, a, e, kappa)
