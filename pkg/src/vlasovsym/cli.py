"""Command-line front end.

Subcommands: verify (structure tables and symmetry multipliers), bracket
(ad-hoc commutators of operator files), nogo (the level-2 extension
obstruction), ode (profile-equation solves with CSV artifacts) and pde
(characteristics and first-order symmetry checks).  Reports print as text
or JSON (--json); exit code 0 means every record passed.  A config file of
`key = value` lines can pre-set any long option; explicit flags win.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import catalog, odes, transport
from .expr import Expr
from .fields import bracket, expand_in_basis, symmetry_multiplier
from .grammar import ParseError, format_expr, format_vfield, parse_vfield
from .params import KernelError
from .report import Report

DEFAULT_Z = ("2", "3", "-1", "1/2")
_EPS_DEFAULT = (1e-2, 5e-3, 2.5e-3)


class CliError(Exception):
    pass


def _fraction_or_none(text: str | None):
    if text is None or text == "symbolic":
        return None
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"expected a rational number or 'symbolic': {text!r}"
                       ) from exc


def _z_list(values: list[str] | None, fallback=DEFAULT_Z) -> list[Fraction]:
    raw: list[str] = []
    for chunk in values or list(fallback):
        raw.extend(p for p in chunk.split(",") if p)
    try:
        return [Fraction(p) for p in raw]
    except ValueError as exc:
        raise CliError(f"bad z list {raw}") from exc


def _rep_overrides(args) -> dict:
    out = {}
    for name in ("mu", "x", "gamma", "k", "a110", "phi0", "b120", "b121"):
        if getattr(args, name, None) is not None:
            out[name] = _fraction_or_none(getattr(args, name))
    return out


def _numeric_params(args, names=("mu", "x", "k", "phi0")) -> dict:
    values = {}
    for name in names:
        raw = getattr(args, name, None)
        if raw is None or raw == "symbolic":
            values[name] = 1.0
        else:
            values[name] = float(Fraction(raw))
    return values


# ---------------------------------------------------------------------------

def cmd_verify(args) -> Report:
    name = args.rep
    if name not in catalog.REPRESENTATIONS:
        raise CliError(f"unknown representation {args.rep!r}; pick one of "
                       f"{', '.join(catalog.REPRESENTATIONS)}")
    overrides = _rep_overrides(args)
    if name == "standard":
        z_values = [None]
    elif name == "example2_z2":
        z_values = [Fraction(2)]
    elif name == "example1":
        z_values = _z_list(args.z, fallback=("2", "3"))
    else:
        z_values = _z_list(args.z)
    report = Report("verify", {"rep": name, "z": z_values, **overrides})

    for z in z_values:
        tag = "" if z is None else f"@z={z}"
        try:
            rep = catalog.make_representation(name, z, **overrides)
        except (KernelError, ValueError) as exc:
            raise CliError(str(exc)) from exc

        with report.timed(f"table{tag}") as record:
            table = catalog.verify_table(rep)
            expected = catalog.expected_structure_constants(rep)
            detail = (f"k = {_pr(table.k)}, q = {_pr(table.q)}; "
                      f"{sum(p.ok for p in table.pairs)}/15 pairs")
            ok = table.ok
            if expected is not None and table.k is not None:
                ok = ok and table.k == expected[0] and table.q == expected[1]
            record(ok, detail if table.ok else f"{detail}; {table.note}")

        mults = catalog.expected_multipliers(rep)
        for gen_name, gen in zip(catalog.GEN_NAMES, rep.basis):
            with report.timed(f"symmetry-{gen_name}{tag}") as record:
                sym = symmetry_multiplier(rep.boltzmann, gen)
                want_rho = catalog.expected_remainder(rep, gen_name)
                ok = (sym.ok and sym.remainder == want_rho
                      and (sym.multiplier - mults[gen_name]).is_zero)
                record(ok, f"multiplier = {format_expr(sym.multiplier)}, "
                           f"remainder = {_pr(sym.remainder)}")

        if name == "example1":
            with report.timed(f"profile-system{tag}") as record:
                residuals = catalog.verify_example1_system(z, **{
                    k: v for k, v in overrides.items() if k in ("mu", "x", "k")})
                bad = [r.name for r in residuals if not r.ok]
                record(not bad, f"{len(residuals) - len(bad)}/"
                               f"{len(residuals)} equations exactly zero"
                               + (f"; nonzero: {bad}" if bad else ""))
        if name == "example2_z2":
            with report.timed("closed-forms") as record:
                residuals = catalog.verify_example2_closed_forms(**{
                    k: v for k, v in overrides.items()
                    if k in ("mu", "x", "phi0", "b120", "b121")})
                bad = [r.name for r in residuals if not r.ok]
                record(not bad, "profile ODE residuals exactly zero"
                       if not bad else f"nonzero residuals: {bad}")

    if args.dump_rep:
        rep = catalog.make_representation(name, z_values[-1], **overrides)
        catalog.save_representation(rep, args.dump_rep)
    return report


def _pr(value) -> str:
    if value is None:
        return "none"
    return format_expr(Expr.of(value))


def cmd_bracket(args) -> Report:
    z = _fraction_or_none(args.z) if args.z else None
    report = Report("bracket", {"left": args.left, "right": args.right,
                                "z": z})
    left = parse_vfield(Path(args.left).read_text(encoding="utf-8"), z=z)
    right = parse_vfield(Path(args.right).read_text(encoding="utf-8"), z=z)
    comm = bracket(left, right)
    with report.timed("bracket") as record:
        record(True, format_vfield(comm))
    if args.basis:
        rep = catalog.load_representation(args.basis)
        with report.timed("expansion") as record:
            expansion = expand_in_basis(comm, rep.basis)
            coeffs = ", ".join(
                f"{n} -> {_pr(c)}" for n, c in
                zip(catalog.GEN_NAMES, expansion.coefficients)
                if not c.is_zero) or "0"
            detail = coeffs if expansion.exact else (
                f"{coeffs}; remainder {format_vfield(expansion.remainder)}")
            record(expansion.exact, detail)
    return report


def cmd_nogo(args) -> Report:
    z_values = _z_list(args.z, fallback=("1", "2", "3", "-1", "1/2"))
    report = Report("nogo", {"z": z_values})
    for z in z_values:
        with report.timed(f"obstruction@z={z}") as record:
            field = catalog.nogo_obstruction(z)
            if field.is_zero:
                record(z == 1, "projection is exactly zero"
                       + ("" if z == 1 else " (unexpected)"))
            else:
                value = max(
                    abs(c.evaluate(1.0, 1.0, 1.0, {"mu": 1.0, "x": 1.0}))
                    for c in field.components())
                record(z != 1 and value > 1e-6,
                       f"nonzero projection {format_vfield(field)}; "
                       f"|value|(1,1,1) = {value:.3g}")
    return report


def cmd_ode(args) -> Report:
    z = Fraction(args.z)
    values = _numeric_params(args)
    mu, x, phi0 = values["mu"], values["x"], values["phi0"]
    grid = odes.make_grid(args.u_min, args.u_max, args.step)
    phi = odes.const_fn(phi0)
    report = Report("ode", {"problem": args.problem, "z": z, "mu": mu,
                            "x": x, "phi0": phi0, "step": args.step,
                            "u": (args.u_min, args.u_max)})
    tol = args.tol

    if args.problem == "d12":
        closed = odes.closed_d12_z2(mu, x, phi0)
        anchor = closed(args.u_min) if args.compare_closed else args.anchor
        sol = odes.solve_d12(z, phi, mu, x, grid, anchor=anchor)
        _record_solution(report, "d12", sol, tol)
        if args.compare_closed:
            if z != 2:
                raise CliError("--compare-closed needs z = 2")
            with report.timed("closed-form-agreement") as record:
                dev = max(abs(sol.values[i] - closed(u))
                          for i, u in enumerate(grid))
                record(dev <= 1e-8, f"max |difference| = {dev:.3e}")
    elif args.problem == "b12":
        closed = odes.closed_b12_z2(phi0, values_b(args)[0], values_b(args)[1])
        init = ((closed(args.u_min), closed.derivative(args.u_min))
                if args.compare_closed else (0.0, 0.0))
        sol = odes.solve_b12(z, phi, mu, grid, init=init)
        _record_solution(report, "b12", sol, tol)
        if args.compare_closed:
            if z != 2:
                raise CliError("--compare-closed needs z = 2")
            with report.timed("closed-form-agreement") as record:
                scale = max(abs(closed(u)) for u in grid) or 1.0
                dev = max(abs(sol.values[i] - closed(u))
                          for i, u in enumerate(grid)) / scale
                record(dev <= 1e-7, f"scaled max |difference| = {dev:.3e}")
    elif args.problem == "b0":
        pair = odes.solve_b0(z, phi, args.s, grid)
        _record_solution(report, "b0-first", pair.first, tol)
        _record_solution(report, "b0-second", pair.second, tol)
        with report.timed("wronskian") as record:
            wmin = float(np.min(np.abs(pair.wronskian.values)))
            record(pair.independent, f"min |W| = {wmin:.3e}")
        if args.csv:
            pair.wronskian.to_csv(_csv_path(args.csv, "wronskian"))
    elif args.problem == "d12quad":
        delta0 = args.delta0 if args.delta0 is not None else 2 * mu * x / float(z)
        sol = odes.quadrature_d12(z, phi0, delta0, args.base or args.u_min,
                                  grid)
        _record_solution(report, "d12quad", sol, tol)
        with report.timed("profile-equation-residual") as record:
            zf = float(z)
            res = odes.ode_residual_max(
                sol, lambda u, d, dd: zf * u * d
                + ((zf - 1) * u * u + phi0) * dd + delta0)
            record(res <= 1e-8, f"max ODE residual = {res:.3e} "
                                f"(delta0 = {delta0})")
    else:
        raise CliError(f"unknown ode problem {args.problem!r}")

    if args.csv:
        sol_attr = locals().get("sol") or locals().get("pair").first
        sol_attr.to_csv(args.csv)
    return report


def values_b(args) -> tuple[float, float]:
    return (float(Fraction(args.b120 or "1")),
            float(Fraction(args.b121 or "0")))


def _csv_path(base: str, suffix: str) -> str:
    p = Path(base)
    return str(p.with_name(p.stem + "-" + suffix + p.suffix))


def _record_solution(report: Report, name: str, sol, tol: float):
    with report.timed(f"{name}-integration") as record:
        record(sol.residual_max <= tol,
               f"residual_max = {sol.residual_max:.3e} on "
               f"[{sol.grid[0]}, {sol.grid[-1]}]")


def cmd_pde(args) -> Report:
    if args.problem == "symcheck":
        return _pde_symcheck(args)
    if args.problem == "characteristics":
        return _pde_characteristics(args)
    raise CliError(f"unknown pde problem {args.problem!r}")


def _pde_symcheck(args) -> Report:
    name = args.rep
    if name not in ("caseA", "example1"):
        raise CliError("symcheck supports representations with closed "
                       "solutions: caseA or example1")
    z = Fraction(args.z)
    values = _numeric_params(args)
    overrides = {k: Fraction(v) for k, v in values.items()
                 if k in (("mu", "x", "k") if name == "example1"
                          else ("mu", "x"))}
    rep = catalog.make_representation(name, z, **overrides)
    family = "zero" if name == "caseA" else "example1"
    sol = transport.exact_solution(family, z=z, mu=values["mu"])
    gens = [args.gen] if args.gen else list(catalog.GEN_NAMES)
    report = Report("pde-symcheck", {"rep": name, "z": z,
                                     "gen": ",".join(gens),
                                     "corrupt": args.corrupt or "none",
                                     **values})
    if args.corrupt:
        rep = catalog.with_generator_scaled(rep, args.corrupt)
        gens = [args.corrupt]
    for gen in gens:
        with report.timed(f"slope-{gen}") as record:
            rpt = transport.symmetry_firstorder_check(
                rep, sol, gen, eps_list=_EPS_DEFAULT, param_values=values)
            note = " (residuals at noise floor)" if rpt.at_noise_floor else ""
            record(rpt.passed(args.slope_min),
                   f"slope = {rpt.slope:.2f}{note}, residuals = "
                   + ", ".join(f"{r:.2e}" for r in rpt.residuals))
    return report


def _pde_characteristics(args) -> Report:
    z = Fraction(args.z)
    values = _numeric_params(args)
    mu = values["mu"]
    family = args.family
    if family == "zero":
        force = transport.ForceField("zero")
    elif family == "example1":
        force = transport.ForceField("example1", float(z))
    else:
        raise CliError(f"unknown family {args.family!r}")
    sol = transport.exact_solution(family, z=z, mu=mu)
    starts = transport.sample_cloud(args.points)
    report = Report("pde-characteristics",
                    {"family": family, "z": z, "mu": mu,
                     "points": args.points, "t_end": args.t_end,
                     "step": args.step})
    with report.timed("solution-constancy") as record:
        drift = transport.constancy_along_characteristics(
            force, sol, starts, args.t_end, args.step, mu)
        record(drift <= 1e-9, f"max |f(end) - f(start)| = {drift:.3e}")
    if family == "example1":
        with report.timed("scaling-variable-drift") as record:
            zf = float(z)
            worst = 0.0
            for p in starts:
                end = transport.integrate_characteristic(
                    force, p, args.t_end, args.step, mu)
                worst = max(worst, abs(end.r ** (zf - 1) * end.v
                                       - p.r ** (zf - 1) * p.v))
            record(worst <= 1e-9, f"max |u(end) - u(start)| = {worst:.3e}")
    if args.csv:
        transport.dump_points_csv(args.csv, starts, sol, force, mu)
    return report


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vlasovsym",
        description="verify conformal dynamical symmetries of the 1D "
                    "collisionless transport equation")
    parser.add_argument("--config", help="file of key = value defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true",
                       help="emit the report as JSON")
        p.add_argument("--out", help="write the report to a file")

    p = sub.add_parser("verify", help="structure table and symmetry checks")
    p.add_argument("--rep", required=True)
    p.add_argument("--z", action="append",
                   help="rational z (repeatable or comma separated)")
    for name in ("mu", "x", "gamma", "k", "a110", "phi0", "b120", "b121"):
        p.add_argument(f"--{name}", help="rational value or 'symbolic'")
    p.add_argument("--dump-rep", help="write the representation file here")
    common(p)

    p = sub.add_parser("bracket", help="commutator of two operator files")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--z")
    p.add_argument("--basis", help="representation file to expand against")
    common(p)

    p = sub.add_parser("nogo", help="level-2 extension obstruction")
    p.add_argument("--z", action="append")
    common(p)

    p = sub.add_parser("ode", help="profile-equation solves")
    p.add_argument("problem", choices=("d12", "b12", "b0", "d12quad"))
    p.add_argument("--z", default="2")
    for name in ("mu", "x", "phi0"):
        p.add_argument(f"--{name}")
    p.add_argument("--b120")
    p.add_argument("--b121")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--u-min", type=float, default=0.5)
    p.add_argument("--u-max", type=float, default=4.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--anchor", type=float, default=0.0)
    p.add_argument("--base", type=float)
    p.add_argument("--delta0", type=float)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--compare-closed", action="store_true")
    p.add_argument("--csv", help="write the solution table here")
    common(p)

    p = sub.add_parser("pde", help="characteristic and symmetry checks")
    p.add_argument("problem", choices=("symcheck", "characteristics"))
    p.add_argument("--rep", default="caseA")
    p.add_argument("--family", default="example1")
    p.add_argument("--z", default="2")
    for name in ("mu", "x", "k", "phi0"):
        p.add_argument(f"--{name}")
    p.add_argument("--gen")
    p.add_argument("--corrupt")
    p.add_argument("--slope-min", type=float, default=1.9)
    p.add_argument("--points", type=int, default=40)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--csv")
    common(p)
    return parser


def _apply_config(args, parser):
    if not args.config:
        return args
    overrides = {}
    for lineno, raw in enumerate(
            Path(args.config).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{args.config}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        overrides[key.replace("-", "_")] = value
    for key, value in overrides.items():
        if not hasattr(args, key):
            raise CliError(f"{args.config}: unknown option {key!r}")
        current = getattr(args, key)
        default = parser.get_default(key)
        if current == default or current is None:
            if isinstance(default, bool):
                value = value.lower() in ("1", "true", "yes")
            elif isinstance(default, int) and not isinstance(default, bool):
                value = int(value)
            elif isinstance(default, float):
                value = float(value)
            setattr(args, key, value)
    return args


_COMMANDS = {
    "verify": cmd_verify,
    "bracket": cmd_bracket,
    "nogo": cmd_nogo,
    "ode": cmd_ode,
    "pde": cmd_pde,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(args, parser)
        report = _COMMANDS[args.command](args)
    except (CliError, ParseError, KernelError, odes.OdeError,
            transport.TransportError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = report.to_json() if args.json else report.to_text()
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
