"""Complex Clifford algebra of the frame e0, e1, e2, e3 acting on 4-spinors.

The generators satisfy e0^2 = +1, ei^2 = -1 and pairwise anticommute.  e0 is
Hermitian and the ei are skew-Hermitian with respect to the standard pairing
sum(conj(phi_k) psi_k).  All entries are exact (0, +-1, +-i), so algebraic
identities hold to the last bit in double precision.

Spinors are plain complex arrays whose last axis has length 4; leading axes are
broadcast, which lets one call evaluate a spinor field on a whole node set.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "IDENTITY",
    "gamma",
    "act",
    "inner",
    "volume_element",
    "clifford_product",
]

_I = 1j

# Rows as printed for e0..e3 in the fixed representation.
_GAMMA = np.array(
    [
        [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]],
        [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
        [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]],
        [[0, 0, 0, _I], [0, 0, -_I, 0], [0, -_I, 0, 0], [_I, 0, 0, 0]],
    ],
    dtype=complex,
)
_GAMMA.setflags(write=False)

IDENTITY = np.eye(4, dtype=complex)
IDENTITY.setflags(write=False)


def gamma(alpha: int) -> np.ndarray:
    """Matrix of the frame vector e_alpha, alpha in 0..3 (returns a copy)."""
    if isinstance(alpha, bool) or not isinstance(alpha, (int, np.integer)):
        raise TypeError(f"frame index must be an integer, got {alpha!r}")
    if not 0 <= alpha <= 3:
        raise IndexError(f"frame index {alpha} out of range 0..3")
    return _GAMMA[alpha].copy()


def clifford_product(*indices: int) -> np.ndarray:
    """Ordered product gamma(i0) @ gamma(i1) @ ... ; the empty product is the identity."""
    out = IDENTITY.copy()
    for idx in indices:
        out = out @ gamma(idx)
    return out


def volume_element() -> np.ndarray:
    """e1 e2 e3.  In this representation it squares to +1 and is Hermitian."""
    return clifford_product(1, 2, 3)


def act(m: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Apply a Clifford element (shape (..., 4, 4)) to spinors (shape (..., 4))."""
    return np.einsum("...ij,...j->...i", m, s)


def inner(phi: np.ndarray, psi: np.ndarray) -> complex | np.ndarray:
    """Hermitian pairing, antilinear in the first slot."""
    out = np.sum(np.conj(phi) * psi, axis=-1)
    return out[()] if out.ndim == 0 else out
