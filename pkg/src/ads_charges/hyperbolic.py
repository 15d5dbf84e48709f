"""Geometry of the hyperbolic slice of AdS in the polar chart (r, theta, psi).

Orthonormal frame::

    e1 = d/dr,  e2 = kappa / sinh(kappa r) d/dtheta,
    e3 = kappa / (sinh(kappa r) sin(theta)) d/dpsi

Array conventions: spatial frame indices are 0-based in arrays (axis entry 0
is e1), while functions taking a single frame direction ``k`` use the
1-based label 1..3.  All functions broadcast over array-valued points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import clifford

__all__ = [
    "FramePoint",
    "FrameConnection",
    "KILLING_FIELDS",
    "SPATIAL_KILLING_FIELDS",
    "SphereQuadrature",
    "frame_connection",
    "spin_connection_term",
    "killing_vector",
    "killing_residual",
    "sectional_curvature",
    "sphere_quadrature",
    "frame_derivative",
    "area_element",
]

FD_STEP = 1e-5


@dataclass(frozen=True)
class FramePoint:
    """A point (or broadcastable array of points) of the slice.

    Construction only checks that the coordinates are in the chart; operations
    that need the frame to be regular call :meth:`check_regular`, which rejects
    the origin and the poles.
    """

    r: float | np.ndarray
    theta: float | np.ndarray
    psi: float | np.ndarray
    kappa: float = 1.0

    def __post_init__(self) -> None:
        if not np.isfinite(self.kappa) or self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        r = np.asarray(self.r, dtype=float)
        th = np.asarray(self.theta, dtype=float)
        if np.any(~np.isfinite(r)) or np.any(r < 0):
            raise ValueError("r must be finite and non-negative")
        if np.any(th < 0) or np.any(th > np.pi):
            raise ValueError("theta must lie in [0, pi]")

    def check_regular(self) -> None:
        if np.any(np.asarray(self.r) <= 0):
            raise ValueError("frame is singular at r = 0")
        s = np.sin(np.asarray(self.theta, dtype=float))
        if np.any(np.abs(s) < 1e-300) or np.any(np.isin(self.theta, (0.0, np.pi))):
            raise ValueError("frame is singular at the poles theta in {0, pi}")

    def shifted(self, dr: float = 0.0, dtheta: float = 0.0, dpsi: float = 0.0) -> FramePoint:
        return FramePoint(
            np.asarray(self.r) + dr,
            np.asarray(self.theta) + dtheta,
            np.asarray(self.psi) + dpsi,
            self.kappa,
        )

    @property
    def shape(self) -> tuple[int, ...]:
        return np.broadcast(np.asarray(self.r), np.asarray(self.theta), np.asarray(self.psi)).shape

    @property
    def cosmological_constant(self) -> float:
        return -3.0 * self.kappa**2


@dataclass(frozen=True)
class FrameConnection:
    """Connection coefficients ``coeffs[..., k, i, j] = g(nabla_{e_k} e_i, e_j)``.

    Antisymmetric in (i, j) by metric compatibility.
    """

    coeffs: np.ndarray

    def along(self, k: int) -> np.ndarray:
        """3x3 block for the 1-based direction k."""
        return self.coeffs[..., k - 1, :, :]


def frame_connection(p: FramePoint) -> FrameConnection:
    p.check_regular()
    kap = p.kappa
    kr = kap * np.asarray(p.r, dtype=float)
    th = np.asarray(p.theta, dtype=float)
    ch = kap / np.tanh(kr)
    ct = kap / (np.tan(th) * np.sinh(kr))
    ch, ct = np.broadcast_arrays(ch, ct)
    c = np.zeros(ch.shape + (3, 3, 3))
    c[..., 1, 0, 1] = ch
    c[..., 1, 1, 0] = -ch
    c[..., 2, 0, 2] = ch
    c[..., 2, 2, 0] = -ch
    c[..., 2, 1, 2] = ct
    c[..., 2, 2, 1] = -ct
    return FrameConnection(c)


def spin_connection_term(k: int, p: FramePoint) -> np.ndarray:
    """Spinor lift of the frame connection along e_k (k in 1..3).

    nabla_k phi = e_k(phi) + spin_connection_term(k, p) @ phi, with the lift
    (1/4) sum_ij g(nabla_k e_i, e_j) e_i e_j.  This is the sign that makes
    Clifford multiplication parallel.
    """
    if k not in (1, 2, 3):
        raise IndexError(f"spatial frame index {k} out of range 1..3")
    omega = frame_connection(p).along(k)
    gg = np.array([[clifford.gamma(i) @ clifford.gamma(j) for j in (1, 2, 3)] for i in (1, 2, 3)])
    return 0.25 * np.einsum("...ij,ijab->...ab", omega, gg)


def frame_derivative(
    f: Callable[[FramePoint], np.ndarray], p: FramePoint, h: float = FD_STEP
) -> np.ndarray:
    """Central-difference frame derivatives of ``f``; new trailing axis is the direction.

    ``f`` maps a point to an array of shape ``p.shape + S``; the result has shape
    ``p.shape + S + (3,)``.
    """
    p.check_regular()
    kap = p.kappa
    shape = p.shape
    sh = np.broadcast_to(np.sinh(kap * np.asarray(p.r, dtype=float)), shape)
    sth = np.broadcast_to(np.sin(np.asarray(p.theta, dtype=float)), shape)
    d_r = (f(p.shifted(dr=h)) - f(p.shifted(dr=-h))) / (2 * h)
    d_t = (f(p.shifted(dtheta=h)) - f(p.shifted(dtheta=-h))) / (2 * h)
    d_p = (f(p.shifted(dpsi=h)) - f(p.shifted(dpsi=-h))) / (2 * h)
    trailing = (1,) * (np.ndim(d_r) - len(shape))
    scale2 = np.reshape(kap / sh, shape + trailing)
    scale3 = np.reshape(kap / (sh * sth), shape + trailing)
    return np.stack([d_r, scale2 * d_t, scale3 * d_p], axis=-1)


KILLING_FIELDS = ("U40", "U10", "U20", "U30", "U14", "U24", "U34", "V1", "V2", "V3")
SPATIAL_KILLING_FIELDS = ("U10", "U20", "U30", "V1", "V2", "V3")
_ALIASES = {"U23": "V1", "U31": "V2", "U12": "V3"}


def _coordinate_components(name: str, r, th, ps, kap):
    """(U^t, U^r, U^theta, U^psi) of the AdS Killing vectors along the t = 0 slice."""
    zero = np.zeros(np.broadcast(r, th, ps).shape)
    coth = 1.0 / np.tanh(kap * r)
    tanh = np.tanh(kap * r)
    st, ct, sp, cp = np.sin(th), np.cos(th), np.sin(ps), np.cos(ps)
    if name == "U40":
        return zero + 1.0 / kap, zero, zero, zero
    if name == "U10":
        return zero, st * cp / kap, coth * ct * cp, -coth * sp / st
    if name == "U20":
        return zero, st * sp / kap, coth * ct * sp, coth * cp / st
    if name == "U30":
        return zero, ct / kap + zero, -coth * st + zero, zero
    if name == "U14":
        return tanh * st * cp / kap, zero, zero, zero
    if name == "U24":
        return tanh * st * sp / kap, zero, zero, zero
    if name == "U34":
        return tanh * ct / kap + zero, zero, zero, zero
    if name == "V1":
        return zero, zero, -sp + zero, -ct * cp / st
    if name == "V2":
        return zero, zero, cp + zero, -ct * sp / st
    if name == "V3":
        return zero, zero, zero, zero + 1.0
    raise KeyError(f"unknown Killing vector {name!r}")


def killing_vector(idx: str, p: FramePoint) -> np.ndarray:
    """Frame components (U^(0), U^(1), U^(2), U^(3)) with a trailing axis of length 4."""
    p.check_regular()
    name = _ALIASES.get(idx, idx)
    kap = p.kappa
    r = np.asarray(p.r, dtype=float)
    th = np.asarray(p.theta, dtype=float)
    ps = np.asarray(p.psi, dtype=float)
    ut, ur, uth, ups = _coordinate_components(name, r, th, ps, kap)
    sh = np.sinh(kap * r)
    return np.stack(
        [np.cosh(kap * r) * ut, ur, sh / kap * uth, sh * np.sin(th) / kap * ups], axis=-1
    )


def killing_residual(idx: str, p: FramePoint, h: float = FD_STEP) -> np.ndarray:
    """Symmetrised covariant derivative nabla_a xi_b + nabla_b xi_a of a spatial Killing field."""
    name = _ALIASES.get(idx, idx)
    if name not in SPATIAL_KILLING_FIELDS:
        raise ValueError(f"{idx!r} is not tangent to the slice")
    xi = killing_vector(name, p)[..., 1:]
    dxi = frame_derivative(lambda q: killing_vector(name, q)[..., 1:], p, h)  # [..., b, a]
    conn = frame_connection(p).coeffs
    nabla = np.swapaxes(dxi, -1, -2) + np.einsum("...c,...acb->...ab", xi, conn)
    return nabla + np.swapaxes(nabla, -1, -2)


def sectional_curvature(p: FramePoint, a: int, b: int, h: float = FD_STEP) -> np.ndarray:
    """Sectional curvature of span(e_a, e_b) (1-based) from the connection coefficients.

    Uses R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z with
    finite-difference derivatives of the coefficients.
    """
    a0, b0 = a - 1, b - 1
    conn = frame_connection(p).coeffs  # [k, i, j]: nabla_k e_i = conn[k, i, j] e_j
    dconn = frame_derivative(lambda q: frame_connection(q).coeffs, p, h)  # [k, i, j, m]

    def nabla_nabla(x, y, z):
        # nabla_x (nabla_y e_z) as frame components
        return dconn[..., y, z, :, x] + np.einsum("...d,...df->...f", conn[..., y, z, :], conn[..., x, :, :])

    bracket = conn[..., a0, b0, :] - conn[..., b0, a0, :]
    riem = (
        nabla_nabla(a0, b0, b0)
        - nabla_nabla(b0, a0, b0)
        - np.einsum("...d,...df->...f", bracket, conn[..., :, b0, :])
    )
    return riem[..., a0]


@dataclass(frozen=True)
class SphereQuadrature:
    """Product rule on the unit sphere: Gauss-Legendre in cos(theta), uniform in psi.

    Nodes are flattened theta-major; weights sum to 4 pi.
    """

    n_theta: int
    n_psi: int
    theta: np.ndarray
    psi: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.weights.size

    def points(self, r: float, kappa: float) -> FramePoint:
        return FramePoint(np.full_like(self.theta, r, dtype=float), self.theta, self.psi, kappa)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integrate node values (trailing axis) against the solid-angle weights."""
        return np.sum(np.asarray(values) * self.weights, axis=-1)


def sphere_quadrature(n_theta: int, n_psi: int) -> SphereQuadrature:
    if n_theta < 2 or n_psi < 4:
        raise ValueError(f"need n_theta >= 2 and n_psi >= 4, got ({n_theta}, {n_psi})")
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    th = np.arccos(x)
    ps = 2 * np.pi * np.arange(n_psi) / n_psi
    T, P = np.meshgrid(th, ps, indexing="ij")
    W = np.outer(wx, np.full(n_psi, 2 * np.pi / n_psi))
    arrays = [T.ravel(), P.ravel(), W.ravel()]
    for arr in arrays:
        arr.setflags(write=False)
    return SphereQuadrature(n_theta, n_psi, *arrays)


def area_element(r: float | np.ndarray, kappa: float) -> float | np.ndarray:
    """Factor sinh^2(kappa r)/kappa^2 multiplying sin(theta) dtheta dpsi on S_r."""
    return np.sinh(kappa * np.asarray(r)) ** 2 / kappa**2
