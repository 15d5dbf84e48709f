"""Conserved charges as limits of surface integrals over coordinate spheres S_r.

Twelve charges: energy E0, centre-of-mass-type momenta c, linear momenta
c_prime, angular momenta J, electric charge q and magnetic momenta (b0, b).
Each is evaluated at a sequence of radii and extrapolated to r -> infinity.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .hyperbolic import SphereQuadrature, area_element, killing_vector, sphere_quadrature
from .initial_data import InitialDataProvider, aspect

__all__ = [
    "CHARGE_NAMES",
    "ChargeSet",
    "RadiusSchedule",
    "Extrapolation",
    "charge_integral",
    "charge_integrals",
    "extrapolate",
    "compute_charges",
    "format_value",
]

CHARGE_NAMES = (
    "E0",
    "c1", "c2", "c3",
    "c_prime1", "c_prime2", "c_prime3",
    "J1", "J2", "J3",
    "q",
    "b0", "b1", "b2", "b3",
)  # fmt: skip

_VECTOR_FIELDS = ("c", "c_prime", "J", "b")
SIG_DIGITS = 9


def format_value(x: float) -> str:
    """Fixed 9-significant-digit rendering used by every report."""
    return f"{x:.{SIG_DIGITS}g}"


def _rounded(x: float) -> float:
    return float(format_value(x))


def _vec(v) -> tuple[float, float, float]:
    out = tuple(float(x) for x in v)
    if len(out) != 3:
        raise ValueError(f"expected 3 components, got {len(out)}")
    return out  # type: ignore[return-value]


@dataclass(frozen=True)
class ChargeSet:
    """The twelve real charges with optional per-charge error estimates."""

    E0: float = 0.0
    c: tuple[float, float, float] = (0.0, 0.0, 0.0)
    c_prime: tuple[float, float, float] = (0.0, 0.0, 0.0)
    J: tuple[float, float, float] = (0.0, 0.0, 0.0)
    q: float = 0.0
    b0: float = 0.0
    b: tuple[float, float, float] = (0.0, 0.0, 0.0)
    errors: dict[str, float] = field(default_factory=dict, compare=False)
    converged: dict[str, bool] = field(default_factory=dict, compare=False)
    radii: tuple[float, ...] = field(default=(), compare=False)
    quadrature: tuple[int, int] | None = field(default=None, compare=False)
    condition: dict[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        for name in ("E0", "q", "b0"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in _VECTOR_FIELDS:
            object.__setattr__(self, name, _vec(getattr(self, name)))
        if not all(math.isfinite(v) for v in self.flat().values()):
            raise ValueError("charges must be finite")

    def flat(self) -> dict[str, float]:
        out = {"E0": self.E0}
        for name in ("c", "c_prime", "J"):
            for i, v in enumerate(getattr(self, name), 1):
                out[f"{name}{i}"] = v
        out["q"] = self.q
        out["b0"] = self.b0
        for i, v in enumerate(self.b, 1):
            out[f"b{i}"] = v
        return out

    @classmethod
    def from_flat(cls, values: dict[str, float], **extra) -> ChargeSet:
        unknown = set(values) - set(CHARGE_NAMES)
        if unknown:
            raise ValueError(f"unknown charge names: {sorted(unknown)}")
        get = lambda k: float(values.get(k, 0.0))  # noqa: E731
        return cls(
            E0=get("E0"),
            c=tuple(get(f"c{i}") for i in (1, 2, 3)),
            c_prime=tuple(get(f"c_prime{i}") for i in (1, 2, 3)),
            J=tuple(get(f"J{i}") for i in (1, 2, 3)),
            q=get("q"),
            b0=get("b0"),
            b=tuple(get(f"b{i}") for i in (1, 2, 3)),
            **extra,
        )

    @property
    def all_converged(self) -> bool:
        return all(self.converged.values()) if self.converged else True

    @property
    def L_squared(self) -> float:
        """|L|^2 = 2(|c'|^2 + |J|^2 + q^2), the squared Frobenius norm of the off-diagonal block."""
        return 2 * (float(np.dot(self.c_prime, self.c_prime)) + float(np.dot(self.J, self.J)) + self.q**2)

    @property
    def A(self) -> float:
        sq = lambda v: float(np.dot(v, v))  # noqa: E731
        return self.b0**2 + sq(self.c) + sq(self.b) + sq(self.c_prime) + sq(self.J) + self.q**2

    # serialization ---------------------------------------------------------

    def to_json(self) -> str:
        doc: dict = {
            "E0": _rounded(self.E0),
            "c": [_rounded(x) for x in self.c],
            "c_prime": [_rounded(x) for x in self.c_prime],
            "J": [_rounded(x) for x in self.J],
            "q": _rounded(self.q),
            "b0": _rounded(self.b0),
            "b": [_rounded(x) for x in self.b],
            "errors": {k: _rounded(self.errors.get(k, 0.0)) for k in CHARGE_NAMES},
        }
        if self.radii:
            doc["radii_used"] = [_rounded(r) for r in self.radii]
        if self.quadrature:
            doc["quadrature"] = {"n_theta": self.quadrature[0], "n_psi": self.quadrature[1]}
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ChargeSet:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed charge file: {exc}") from exc
        if not isinstance(doc, dict):
            raise ValueError("malformed charge file: top level must be an object")
        try:
            quad = doc.get("quadrature")
            return cls(
                E0=doc.get("E0", 0.0),
                c=doc.get("c", (0, 0, 0)),
                c_prime=doc.get("c_prime", (0, 0, 0)),
                J=doc.get("J", (0, 0, 0)),
                q=doc.get("q", 0.0),
                b0=doc.get("b0", 0.0),
                b=doc.get("b", (0, 0, 0)),
                errors={k: float(v) for k, v in doc.get("errors", {}).items()},
                radii=tuple(float(r) for r in doc.get("radii_used", ())),
                quadrature=(int(quad["n_theta"]), int(quad["n_psi"])) if quad else None,
            )
        except (TypeError, ValueError, KeyError) as exc:
            raise ValueError(f"malformed charge file: {exc}") from exc

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["charge", "value", "error"])
        for name, value in self.flat().items():
            w.writerow([name, format_value(value), format_value(self.errors.get(name, 0.0))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> ChargeSet:
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [h.strip() for h in rows[0]] != ["charge", "value", "error"]:
            raise ValueError("malformed charge file: expected header 'charge,value,error'")
        values, errors = {}, {}
        try:
            for row in rows[1:]:
                if not row:
                    continue
                name, value, err = (x.strip() for x in row)
                values[name] = float(value)
                errors[name] = float(err)
        except ValueError as exc:
            raise ValueError(f"malformed charge file: {exc}") from exc
        return cls.from_flat(values, errors=errors)

    @classmethod
    def load(cls, path: str) -> ChargeSet:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        if str(path).lower().endswith(".csv"):
            return cls.from_csv(text)
        return cls.from_json(text)


@dataclass(frozen=True)
class RadiusSchedule:
    """Radii at which the surface integrals are sampled before extrapolation."""

    radii: tuple[float, ...]
    quad: SphereQuadrature
    tol: float = 1e-12

    def __post_init__(self) -> None:
        radii = tuple(float(r) for r in self.radii)
        if len(radii) < 3:
            raise ValueError("a radius schedule needs at least 3 radii")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("radii must be strictly increasing")
        if radii[0] <= 0:
            raise ValueError("radii must be positive")
        object.__setattr__(self, "radii", radii)

    @classmethod
    def default(cls, kappa: float = 1.0, n_theta: int = 48, n_psi: int = 96) -> RadiusSchedule:
        """kappa r in {6, ..., 10} with a 48 x 96 product rule."""
        return cls(tuple(x / kappa for x in (6.0, 7.0, 8.0, 9.0, 10.0)), sphere_quadrature(n_theta, n_psi))


_SPATIAL_BOOSTS = ("U10", "U20", "U30")
_TRANSLATIONS = ("U14", "U24", "U34")
_ROTATIONS = ("V1", "V2", "V3")


def _terms(provider: InitialDataProvider, r: float, quad: SphereQuadrature) -> dict[str, np.ndarray]:
    """Weighted node contributions of every charge integrand at radius r."""
    kap = provider.kappa
    pt = quad.points(r, kap)
    sample = provider.evaluate(pt)
    asp = aspect(provider, pt, sample)
    w = quad.weights * area_element(r, kap)
    e1 = asp.Ecal[..., 0]
    p21, p31 = asp.Pcal[..., 1, 0], asp.Pcal[..., 2, 0]
    out = {"E0": kap / (16 * np.pi) * e1 * killing_vector("U40", pt)[..., 0] * w}
    for i, name in enumerate(_TRANSLATIONS, 1):
        out[f"c{i}"] = kap / (16 * np.pi) * e1 * killing_vector(name, pt)[..., 0] * w
    for i, name in enumerate(_SPATIAL_BOOSTS, 1):
        u = killing_vector(name, pt)
        out[f"c_prime{i}"] = kap / (8 * np.pi) * (p21 * u[..., 2] + p31 * u[..., 3]) * w
    for i, name in enumerate(_ROTATIONS, 1):
        v = killing_vector(name, pt)
        out[f"J{i}"] = kap / (8 * np.pi) * (p21 * v[..., 2] + p31 * v[..., 3]) * w
    out["q"] = sample.E[..., 0] / (4 * np.pi) * w
    st = np.sin(pt.theta)
    normals = (np.ones_like(st), st * np.cos(pt.psi), st * np.sin(pt.psi), np.cos(pt.theta))
    # growing weight applied after forming B^1 n^alpha
    for alpha, n in enumerate(normals):
        out[f"b{alpha}"] = (sample.B[..., 0] * n / (4 * np.pi)) * math.exp(kap * r) * w
    return out


def _condition(terms: np.ndarray) -> float:
    total = abs(float(np.sum(terms)))
    mag = float(np.max(np.abs(terms))) if terms.size else 0.0
    if mag == 0.0:
        return 1.0
    return math.inf if total == 0.0 else mag / total


def charge_integrals(provider: InitialDataProvider, r: float, quad: SphereQuadrature) -> tuple[dict[str, float], dict[str, float]]:
    """All twelve finite-radius integrals at once, plus the max|term|/|sum| diagnostic."""
    terms = _terms(provider, r, quad)
    values = {k: float(np.sum(v)) for k, v in terms.items()}
    cond = {k: _condition(v) for k, v in terms.items()}
    return values, cond


def charge_integral(provider: InitialDataProvider, which: str, r: float, quad: SphereQuadrature) -> float:
    """Finite-radius surface integral of one charge (names as in CHARGE_NAMES)."""
    if which not in CHARGE_NAMES:
        raise KeyError(f"unknown charge {which!r}; expected one of {', '.join(CHARGE_NAMES)}")
    return charge_integrals(provider, r, quad)[0][which]


Extrapolation = namedtuple("Extrapolation", "limit error converged beta")


def _fit_residual(beta: float, x: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    design = np.column_stack([np.ones_like(x), np.exp(-beta * x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(np.linalg.norm(design @ coef - y)), coef


def extrapolate(samples, kappa: float = 1.0, atol: float = 1e-12, beta_max: float = 60.0) -> Extrapolation:
    """Limit of v(r) ~ L + A exp(-beta kappa r) with beta >= 1.

    beta is chosen by variable projection (linear least squares in L, A for
    each beta, then a bounded scalar search over beta).  The error estimate is
    the larger of the fit residual and the last increment.  Sequences whose
    increments change sign or fail to shrink fall back to the last sample and
    are flagged as not converged.
    """
    samples = [(float(r), float(v)) for r, v in samples]
    if len(samples) < 3:
        raise ValueError("need at least 3 samples to extrapolate")
    r = np.array([s[0] for s in samples])
    y = np.array([s[1] for s in samples])
    if np.any(np.diff(r) <= 0):
        raise ValueError("sample radii must be strictly increasing")
    last_inc = abs(y[-1] - y[-2])
    spread = float(np.max(y) - np.min(y))
    if spread <= atol:
        return Extrapolation(float(y[-1]), spread, True, math.nan)
    inc = np.diff(y)
    significant = np.abs(inc) > atol
    signs = np.sign(inc[significant])
    decaying = np.all(np.abs(inc[1:]) < np.abs(inc[:-1]) + atol)
    if np.any(signs != signs[0]) or not decaying:
        return Extrapolation(float(y[-1]), float(last_inc), False, math.nan)
    x = kappa * (r - r[-1])
    grid = np.linspace(1.0, beta_max, 237)
    res = [_fit_residual(b, x, y)[0] for b in grid]
    i = int(np.argmin(res))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    opt = optimize.minimize_scalar(lambda b: _fit_residual(b, x, y)[0], bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-10})
    beta = float(opt.x) if opt.fun <= res[i] else float(grid[i])
    resid, coef = _fit_residual(beta, x, y)
    limit = float(coef[0])
    if not math.isfinite(limit):
        return Extrapolation(float(y[-1]), float(last_inc), False, math.nan)
    return Extrapolation(limit, max(resid, float(last_inc)), True, beta)


def compute_charges(provider: InitialDataProvider, schedule: RadiusSchedule | None = None) -> ChargeSet:
    """Evaluate every charge on the schedule and extrapolate each to infinite radius."""
    schedule = schedule or RadiusSchedule.default(provider.kappa)
    per_radius = [charge_integrals(provider, r, schedule.quad) for r in schedule.radii]
    limits, errors, converged = {}, {}, {}
    for name in CHARGE_NAMES:
        seq = [(r, vals[name]) for r, (vals, _) in zip(schedule.radii, per_radius)]
        ex = extrapolate(seq, provider.kappa, atol=schedule.tol)
        limits[name], errors[name], converged[name] = ex.limit, ex.error, ex.converged
    condition = {k: per_radius[-1][1][k] for k in ("b0", "b1", "b2", "b3")}
    return ChargeSet.from_flat(
        limits,
        errors=errors,
        converged=converged,
        radii=schedule.radii,
        quadrature=(schedule.quad.n_theta, schedule.quad.n_psi),
        condition=condition,
    )
