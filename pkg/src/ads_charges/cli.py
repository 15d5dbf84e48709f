"""Command-line front end.

Commands: charges, bounds, dec, boundary-form, verify.  Exit codes: 0 success,
1 verification or bound failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .bounds import EnergyConditionSample, bound_report, build_Q, dec_check, far_field_sample
from .charges import CHARGE_NAMES, ChargeSet, RadiusSchedule, compute_charges, format_value
from .hyperbolic import FramePoint, sphere_quadrature
from .initial_data import (
    InitialDataProvider,
    SyntheticChargeProvider,
    provider_ads,
    provider_kn_ads_asymptotic,
    provider_rn_ads,
)
from .spinor import BOUNDARY_TERM_NAMES, boundary_terms, q_form
from .verify import run_suites

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

SOLUTION_PARAMS = {
    "ads": (),
    "rn-ads": ("m", "Q"),
    "kn-ads": ("m", "a", "e"),
    "builtin-test": (),
}
PARAM_DEFAULTS = {"m": 1.0, "a": 0.0, "e": 0.0, "Q": 0.0}

# Charges of the built-in synthetic data set (every entry of Q non-trivial).
BUILTIN_TEST_CHARGES = dict(
    E0=1.3, c=(0.1, -0.2, 0.15), c_prime=(0.05, 0.12, -0.07), J=(0.2, -0.1, 0.3), q=0.4, b0=0.05, b=(0.03, -0.02, 0.06)
)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    solution: str = "ads"
    parameters: dict[str, float] = field(default_factory=dict)
    kappa: float = 1.0
    radii: list[float] | None = None
    n_theta: int = 48
    n_psi: int = 96
    format: str = "table"
    path: str | None = None

    def validate(self) -> None:
        if self.solution not in SOLUTION_PARAMS:
            raise ConfigError(f"unknown solution {self.solution!r}; choose from {', '.join(SOLUTION_PARAMS)}")
        extra = set(self.parameters) - set(SOLUTION_PARAMS[self.solution])
        if extra:
            raise ConfigError(f"parameters {sorted(extra)} do not apply to solution {self.solution!r}")
        if not self.kappa > 0:
            raise ConfigError(f"kappa must be positive, got {self.kappa}")
        if self.solution == "kn-ads":
            a = self.parameters.get("a", 0.0)
            if self.kappa**2 * a**2 >= 1:
                raise ConfigError(f"kappa^2 a^2 must be < 1 (Sigma = {1 - self.kappa**2 * a**2:.6g} <= 0)")
        if self.format not in ("table", "csv", "json"):
            raise ConfigError(f"unknown output format {self.format!r}")

    def provider(self) -> InitialDataProvider:
        par = {k: self.parameters.get(k, PARAM_DEFAULTS[k]) for k in SOLUTION_PARAMS[self.solution]}
        try:
            if self.solution == "ads":
                return provider_ads(self.kappa)
            if self.solution == "rn-ads":
                return provider_rn_ads(par["m"], par["Q"], self.kappa)
            if self.solution == "kn-ads":
                return provider_kn_ads_asymptotic(par["m"], par["a"], par["e"], self.kappa)
            return SyntheticChargeProvider(self.kappa, **BUILTIN_TEST_CHARGES)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def schedule(self) -> RadiusSchedule:
        try:
            quad = sphere_quadrature(self.n_theta, self.n_psi)
            if self.radii is None:
                return RadiusSchedule.default(self.kappa, self.n_theta, self.n_psi)
            return RadiusSchedule(tuple(self.radii), quad)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config file must contain a JSON object")
    return doc


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge the optional JSON config file with command-line flags (flags win)."""
    doc = _load_config_file(args.config) if getattr(args, "config", None) else {}
    params = dict(doc.get("parameters", {}))
    cfg = RunConfig(
        solution=doc.get("solution", "ads"),
        kappa=float(params.pop("kappa", doc.get("kappa", 1.0))),
        radii=doc.get("radii"),
        n_theta=int(doc.get("quadrature", {}).get("n_theta", 48)),
        n_psi=int(doc.get("quadrature", {}).get("n_psi", 96)),
        format=doc.get("output", {}).get("format", "table"),
        path=doc.get("output", {}).get("path"),
    )
    cfg.parameters = {k: float(v) for k, v in params.items()}
    if args.solution is not None:
        cfg.solution = args.solution
    for name in ("m", "a", "e", "Q"):
        val = getattr(args, name, None)
        if val is not None:
            cfg.parameters[name] = val
    if args.kappa is not None:
        cfg.kappa = args.kappa
    if args.radii is not None:
        cfg.radii = args.radii
    if args.n_theta is not None:
        cfg.n_theta = args.n_theta
    if args.n_psi is not None:
        cfg.n_psi = args.n_psi
    if getattr(args, "format", None) is not None:
        cfg.format = args.format
    if getattr(args, "output", None) is not None:
        cfg.path = args.output
    cfg.validate()
    return cfg


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def charges_table(cs: ChargeSet) -> str:
    lines = [f"{'charge':<10} {'value':>16}   {'error':>16}"]
    for name, value in cs.flat().items():
        flag = "" if cs.converged.get(name, True) else "   NOT CONVERGED"
        lines.append(f"{name:<10} {format_value(value):>16} ± {format_value(cs.errors.get(name, 0.0)):>16}{flag}")
    return "\n".join(lines) + "\n"


def render_charges(cs: ChargeSet, fmt: str) -> str:
    if fmt == "json":
        return cs.to_json()
    if fmt == "csv":
        return cs.to_csv()
    return charges_table(cs)


def cmd_charges(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    provider = cfg.provider()
    cs = compute_charges(provider, cfg.schedule())
    _emit(render_charges(cs, cfg.format), cfg.path)
    if not cs.all_converged:
        bad = [k for k, ok in cs.converged.items() if not ok]
        print(f"extrapolation did not converge for: {', '.join(bad)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _format_complex(z: complex) -> str:
    return f"{format_value(z.real)}{'+' if z.imag >= 0 else '-'}{format_value(abs(z.imag))}i"


def cmd_bounds(args: argparse.Namespace) -> int:
    if args.charges_file:
        try:
            cs = ChargeSet.load(args.charges_file)
        except (OSError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        fmt = args.format or "table"
    else:
        cfg = build_config(args)
        cs = compute_charges(cfg.provider(), cfg.schedule())
        fmt = cfg.format
    rep = bound_report(cs)
    if fmt == "json":
        doc = rep.as_dict()
        doc["Q"] = [[[float(format_value(z.real)), float(format_value(z.imag))] for z in row] for row in rep.Q]
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        out = ["Q ="]
        for row in rep.Q:
            out.append("  " + "  ".join(f"{_format_complex(z):>28}" for z in row))
        out.append(f"PSD: {'yes' if rep.psd else 'no'} (min eigenvalue {format_value(rep.min_eigenvalue)})")
        if not rep.psd:
            out.append("WARNING: Q not PSD")
        for i, v in enumerate(rep.branches, 1):
            out.append(f"branch {i}: {format_value(v)}")
        out.append(f"bound (max of branches, active branch {rep.active_branch}): {format_value(rep.bound)}")
        if rep.thm51 is not None:
            out.append(f"uncharged bound: {format_value(rep.thm51)}")
        verdict = "PASS" if rep.passed else "FAIL"
        out.append(f"E0 ≥ bound: {verdict} ({format_value(rep.E0)} ≥ {format_value(rep.bound)})")
        sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_dec(args: argparse.Namespace) -> int:
    if args.mu is not None:
        kappa = args.kappa if args.kappa is not None else 1.0
        s = EnergyConditionSample(
            args.mu, tuple(args.nu), tuple(args.nu_prime), args.divE, args.divB, args.absB, kappa
        )
        ok, margin = dec_check(s)
        print(f"margin {format_value(margin)}: {'PASS' if ok else 'FAIL'}")
        return EXIT_OK if ok else EXIT_FAIL
    cfg = build_config(args)
    provider = cfg.provider()
    r = args.radius if args.radius is not None else 8.0 / cfg.kappa
    quad = sphere_quadrature(8, 16)
    pts = quad.points(r, cfg.kappa)
    margins = []
    for th, ps in zip(pts.theta, pts.psi):
        margins.append(dec_check(far_field_sample(provider, FramePoint(r, th, ps, cfg.kappa)))[1])
    worst = min(margins)
    ok = worst >= -args.tol
    print(f"radius {format_value(r)}: minimum margin {format_value(worst)} over {len(margins)} points: "
          f"{'PASS' if ok else 'FAIL'} (tolerance {format_value(args.tol)})")
    return EXIT_OK if ok else EXIT_FAIL


def _parse_lambda(values: list[str] | None) -> np.ndarray:
    if values is None:
        return np.array([1, 0, 0, 0], dtype=complex)
    try:
        out = np.array([complex(v.replace(" ", "")) for v in values])
    except ValueError as exc:
        raise ConfigError(f"bad lambda component: {exc}") from exc
    if out.shape != (4,):
        raise ConfigError("lambda needs exactly 4 components")
    return out


def cmd_boundary_form(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    provider = cfg.provider()
    lv = _parse_lambda(args.lam)
    r = args.radius if args.radius is not None else 10.0 / cfg.kappa
    quad = sphere_quadrature(cfg.n_theta, cfg.n_psi)
    terms = boundary_terms(lv, provider, r, quad)
    total = float(terms.sum().real)
    cs = compute_charges(provider, cfg.schedule())
    qf = q_form(lv, build_Q(cs))
    for name, t in zip(BOUNDARY_TERM_NAMES, terms):
        print(f"{name:<10} {format_value(t.real)}")
    print(f"imaginary residue {format_value(terms.sum().imag)}")
    print(f"boundary form at r = {format_value(r)}: {format_value(total)}")
    print(f"8 pi lambda^dagger Q lambda: {format_value(qf)}")
    print(f"relative difference: {format_value(abs(total - qf) / (abs(qf) + 1e-12))}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_suites(args.level)
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        line = f"{status}  {res.name:<36} max residual {format_value(res.max_residual):>16}  {res.seconds:8.3f} s"
        if res.detail:
            line += f"  [{res.detail}]"
        print(line)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--solution", choices=sorted(SOLUTION_PARAMS))
    p.add_argument("--m", type=float, help="mass parameter (rn-ads, kn-ads)")
    p.add_argument("--a", type=float, help="rotation parameter (kn-ads)")
    p.add_argument("--e", type=float, help="charge parameter (kn-ads)")
    p.add_argument("--Q", type=float, help="charge (rn-ads)")
    p.add_argument("--kappa", type=float)
    p.add_argument("--radii", type=float, nargs="+", help="increasing sampling radii (at least 3)")
    p.add_argument("--n-theta", dest="n_theta", type=int)
    p.add_argument("--n-psi", dest="n_psi", type=int)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ads-charges", description="Conserved charges and energy bounds of asymptotically AdS initial data."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("charges", help="compute the twelve charges")
    _add_config_args(p)
    p.add_argument("--format", choices=("table", "csv", "json"))
    p.add_argument("--output", help="write the report to this path")
    p.set_defaults(func=cmd_charges)

    p = sub.add_parser("bounds", help="charge matrix, positivity and energy bounds")
    _add_config_args(p)
    p.add_argument("--charges-file", help="JSON or CSV charge file instead of computing charges")
    p.add_argument("--format", choices=("table", "json"))
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("dec", help="modified dominant energy condition")
    _add_config_args(p)
    p.add_argument("--radius", type=float, help="sphere radius for provider far-field checks")
    p.add_argument("--tol", type=float, default=0.0, help="accept margins >= -tol")
    p.add_argument("--mu", type=float, help="check a single sample given by the flags below")
    p.add_argument("--nu", type=float, nargs=3, default=(0.0, 0.0, 0.0))
    p.add_argument("--nu-prime", dest="nu_prime", type=float, nargs=3, default=(0.0, 0.0, 0.0))
    p.add_argument("--divE", type=float, default=0.0)
    p.add_argument("--divB", type=float, default=0.0)
    p.add_argument("--absB", type=float, default=0.0)
    p.set_defaults(func=cmd_dec)

    p = sub.add_parser("boundary-form", help="boundary integrals for one Killing spinor")
    _add_config_args(p)
    p.add_argument("--lambda", dest="lam", nargs=4, metavar="L", help="four complex components, e.g. 1 0 1j 0")
    p.add_argument("--radius", type=float)
    p.set_defaults(func=cmd_boundary_form)

    p = sub.add_parser("verify", help="run the self-verification suites")
    p.add_argument("level", nargs="?", choices=("quick", "full"), default="quick")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["main", "make_parser", "RunConfig", "build_config", "CHARGE_NAMES"]
