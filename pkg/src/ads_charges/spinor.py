"""Imaginary Killing spinors of the hyperbolic slice and the boundary quadratic form.

An imaginary Killing spinor solves nabla_X phi + (i kappa / 2) X . phi = 0.  On
the slice they form a 4-dimensional complex space parametrised by
``lv = (lambda1, lambda2, lambda3, lambda4)``.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import clifford
from .hyperbolic import FD_STEP, FramePoint, SphereQuadrature, area_element, frame_derivative, spin_connection_term
from .initial_data import InitialDataProvider, metric_divergence

__all__ = [
    "as_lambda",
    "killing_spinor",
    "spinor_residual",
    "killing_residual_spinor",
    "boundary_terms",
    "boundary_form",
    "boundary_matrix",
    "q_form",
    "BOUNDARY_TERM_NAMES",
]

BOUNDARY_TERM_NAMES = ("metric", "trace", "momentum", "electric", "magnetic")


def as_lambda(lv) -> np.ndarray:
    out = np.asarray(lv, dtype=complex)
    if out.shape != (4,):
        raise ValueError(f"lambda vector must have 4 components, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError("lambda vector must be finite")
    return out


def killing_spinor(lv, p: FramePoint) -> np.ndarray:
    """Imaginary Killing spinor with parameters ``lv`` at ``p`` (shape p.shape + (4,)).

    Valid on the whole chart, including r = 0 and the poles.
    """
    l1, l2, l3, l4 = as_lambda(lv)
    kap = p.kappa
    r = np.asarray(p.r, dtype=float)
    th = np.asarray(p.theta, dtype=float)
    ps = np.asarray(p.psi, dtype=float)
    s, c = np.sin(th / 2), np.cos(th / 2)
    ep, em = np.exp(0.5j * ps), np.exp(-0.5j * ps)
    u_plus = l1 * ep * s + l2 * em * c
    u_minus = l3 * ep * s + l4 * em * c
    v_plus = -l3 * ep * c + l4 * em * s
    v_minus = -l1 * ep * c + l2 * em * s
    grow, decay = np.exp(kap * r / 2), np.exp(-kap * r / 2)
    comps = [
        u_plus * grow + u_minus * decay,
        v_plus * grow + v_minus * decay,
        -1j * u_plus * grow + 1j * u_minus * decay,
        1j * v_plus * grow - 1j * v_minus * decay,
    ]
    return np.stack(np.broadcast_arrays(*comps), axis=-1)


def spinor_residual(
    field: Callable[[FramePoint], np.ndarray],
    p: FramePoint,
    k: int,
    value: np.ndarray | None = None,
    h: float = FD_STEP,
) -> np.ndarray:
    """nabla_k phi + (i kappa / 2) e_k . phi for an arbitrary spinor field.

    The derivative is taken from ``field`` by central differences; ``value``
    overrides the point value used in the algebraic terms.
    """
    if k not in (1, 2, 3):
        raise IndexError(f"spatial frame index {k} out of range 1..3")
    p.check_regular()
    phi = field(p) if value is None else np.asarray(value)
    dphi = frame_derivative(field, p, h)[..., k - 1]
    omega = spin_connection_term(k, p)
    return dphi + clifford.act(omega, phi) + 0.5j * p.kappa * clifford.act(clifford.gamma(k), phi)


def killing_residual_spinor(lv, p: FramePoint, k: int, h: float = FD_STEP) -> np.ndarray:
    """Residual of the imaginary Killing equation along e_k; vanishes up to FD error."""
    lv = as_lambda(lv)
    return spinor_residual(lambda q: killing_spinor(lv, q), p, k, h=h)


def _bilinears(phi: np.ndarray) -> dict[str, np.ndarray]:
    g = [clifford.gamma(i) for i in range(4)]
    return {
        "norm": np.real(clifford.inner(phi, phi)),
        "i_e": np.stack([clifford.inner(phi, 1j * clifford.act(g[k], phi)) for k in (1, 2, 3)], axis=-1),
        "e0_e": np.stack([clifford.inner(phi, clifford.act(g[0] @ g[k], phi)) for k in (1, 2, 3)], axis=-1),
        "e0": clifford.inner(phi, clifford.act(g[0], phi)),
        "vol": clifford.inner(phi, clifford.act(clifford.volume_element(), phi)),
    }


def _term_densities(lv, provider: InitialDataProvider, pt: FramePoint) -> np.ndarray:
    """Integrand of each boundary term at the nodes, shape (5, n_nodes)."""
    sample = provider.evaluate(pt)
    kap = provider.kappa
    phi = killing_spinor(lv, pt)
    bil = _bilinears(phi)
    a, g, pm = sample.a, sample.g, sample.p
    tr_a = np.trace(a, axis1=-2, axis2=-1)[..., None]
    tr_p = np.trace(pm, axis1=-2, axis2=-1)[..., None]
    div = metric_divergence(sample, pt)[..., 0]
    metric = 0.25 * div * bil["norm"]
    trace = 0.25 * kap * np.sum((a[..., :, 0] - g[..., :, 0] * tr_a) * bil["i_e"], axis=-1)
    momentum = -0.5 * np.sum((pm[..., :, 0] - g[..., :, 0] * tr_p) * bil["e0_e"], axis=-1)
    electric = sample.E[..., 0] * bil["e0"]
    magnetic = -sample.B[..., 0] * bil["vol"]
    return np.stack(np.broadcast_arrays(metric + 0j, trace, momentum, electric, magnetic))


def boundary_terms(lv, provider: InitialDataProvider, r: float, quad: SphereQuadrature) -> np.ndarray:
    """The five complex surface integrals over S_r, in the order of BOUNDARY_TERM_NAMES."""
    lv = as_lambda(lv)
    pt = quad.points(r, provider.kappa)
    dens = _term_densities(lv, provider, pt)
    return quad.integrate(dens) * area_element(r, provider.kappa)


def boundary_form(
    lv, provider: InitialDataProvider, r: float, quad: SphereQuadrature, imag_tol: float | None = 1e-10
) -> float:
    """Real part of the summed boundary integrals at radius r.

    The imaginary residue must vanish for Hermitian integrands; it is checked
    against ``imag_tol`` times the largest term magnitude (None disables the check).
    """
    terms = boundary_terms(lv, provider, r, quad)
    total = terms.sum()
    if imag_tol is not None:
        scale = max(1.0, float(np.max(np.abs(terms))))
        if abs(total.imag) > imag_tol * scale:
            raise ArithmeticError(f"imaginary residue {total.imag:.3e} exceeds {imag_tol:g} x {scale:.3e}")
    return float(total.real)


def boundary_matrix(provider: InitialDataProvider, r: float, quad: SphereQuadrature) -> np.ndarray:
    """Hermitian 4x4 matrix H with boundary_form(lv) = Re(lv^dagger H lv).

    Obtained by polarisation over the basis spinors; comparable to 8 pi Q.
    """
    basis = np.eye(4, dtype=complex)
    diag = np.array([boundary_form(basis[i], provider, r, quad, None) for i in range(4)])
    H = np.diag(diag).astype(complex)
    for i in range(4):
        for j in range(i + 1, 4):
            re = boundary_form(basis[i] + basis[j], provider, r, quad, None) - diag[i] - diag[j]
            im = boundary_form(basis[i] + 1j * basis[j], provider, r, quad, None) - diag[i] - diag[j]
            H[i, j] = 0.5 * (re - 1j * im)
            H[j, i] = np.conj(H[i, j])
    return H


def q_form(lv, Q: np.ndarray, tol: float = 1e-10) -> float:
    """8 pi lv^dagger Q lv for Hermitian Q."""
    lv = as_lambda(lv)
    Q = np.asarray(Q, dtype=complex)
    if Q.shape != (4, 4):
        raise ValueError(f"Q must be 4x4, got {Q.shape}")
    if np.max(np.abs(Q - Q.conj().T)) > tol:
        raise ValueError("Q is not Hermitian")
    return float(8 * np.pi * np.real(np.conj(lv) @ Q @ lv))
