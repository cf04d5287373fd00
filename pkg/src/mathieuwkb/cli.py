"""Command-line front end: CSV emitters for tables, function values,
residual diagnostics, the WKB demo, Green fields, far-field patterns, and
a validation suite.

All CSV goes to --out (default stdout) with 17-significant-digit floats;
warnings and diagnostics go to stderr.  Exit codes: 0 success, 1 usage or
precondition error, 2 validation-suite failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from .angular_basis import CoefficientTable, SymmetryClass, angular_eval, build_tables
from .errors import MathieuError
from .evaluator import DEFAULT_CONFIG, EvaluatorConfig, classify, evaluate, radius_map, residual
from .radial_series import me1_series, ne1_series
from .scattering import (BoundaryCondition, EllipticPoint, Geometry,
                         GreenProblem, far_field, fraunhofer, green_grid,
                         half_plane_identity, to_elliptic)
from .wkb import WkbDemoProblem, demo_cosh_well, demo_regime

_ENV_CACHE = "MATHIEU_TABLE_CACHE"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _theta_from(args) -> float:
    if args.theta is not None and args.a_over_lambda is not None:
        raise UsageError("give either --theta or --a-over-lambda, not both")
    if args.theta is not None:
        return float(args.theta)
    if args.a_over_lambda is not None:
        return (math.pi * float(args.a_over_lambda) / 2.0) ** 2
    raise UsageError("one of --theta or --a-over-lambda is required")


def _cached_tables(theta: float, n_max: int, p_max: int,
                   cache_dir: str | None) -> CoefficientTable:
    cache_dir = cache_dir or os.environ.get(_ENV_CACHE)
    if not cache_dir:
        return build_tables(theta, n_max, p_max)
    path = Path(cache_dir) / f"mathieu_tables_{theta:.17g}_n{n_max}_p{p_max}.npz"
    if path.exists():
        data = np.load(path, allow_pickle=False)
        print(f"loaded table cache {path}", file=sys.stderr)
        return CoefficientTable(
            theta=float(data["theta"]), n_max=int(data["n_max"]),
            p_max=int(data["p_max"]), char_even=data["char_even"],
            char_odd=data["char_odd"], coeff_ee=data["coeff_ee"],
            coeff_eo=data["coeff_eo"], coeff_oo=data["coeff_oo"],
            coeff_oe=data["coeff_oe"], head_log_even=data["head_log_even"],
            head_sign_even=data["head_sign_even"],
            head_log_odd=data["head_log_odd"],
            head_sign_odd=data["head_sign_odd"])
    table = build_tables(theta, n_max, p_max)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(path, theta=table.theta, n_max=table.n_max, p_max=table.p_max,
             char_even=table.char_even, char_odd=table.char_odd,
             coeff_ee=table.coeff_ee, coeff_eo=table.coeff_eo,
             coeff_oo=table.coeff_oo, coeff_oe=table.coeff_oe,
             head_log_even=table.head_log_even,
             head_sign_even=table.head_sign_even,
             head_log_odd=table.head_log_odd,
             head_sign_odd=table.head_sign_odd)
    print(f"wrote table cache {path}", file=sys.stderr)
    return table


def _add_theta_flags(p):
    p.add_argument("--theta", type=float, default=None,
                   help="size parameter theta = (k a / 4)^2")
    p.add_argument("--a-over-lambda", type=float, default=None,
                   help="width-to-wavelength ratio; theta = (pi R / 2)^2")


def _build_parser() -> _Parser:
    parser = _Parser(prog="mathieuwkb",
                     description="Mathieu-function evaluation and slit/strip "
                                 "scattering Green functions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tables", help="dump characteristic values and Fourier coefficients")
    _add_theta_flags(p)
    p.add_argument("--nmax", type=int, default=100)
    p.add_argument("--pmax", type=int, default=200)
    p.add_argument("--cache-dir", default=None,
                   help=f"table cache directory (or ${_ENV_CACHE})")
    p.add_argument("--out", default="-")

    p = sub.add_parser("angular", help="evaluate ce_n / se_n on an angle grid")
    _add_theta_flags(p)
    p.add_argument("--class", dest="class_", choices=["even", "odd"], default="even")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pmax", type=int, default=200)
    p.add_argument("--vmin", type=float, default=0.0)
    p.add_argument("--vmax", type=float, default=2.0 * math.pi)
    p.add_argument("--samples", type=int, default=361)
    p.add_argument("--deriv", type=int, choices=[0, 1], default=0)
    p.add_argument("--out", default="-")

    p = sub.add_parser("radial", help="third-kind radial function via the exact series")
    _add_theta_flags(p)
    p.add_argument("--class", dest="class_", choices=["even", "odd"], default="even")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pmax", type=int, default=200)
    p.add_argument("--umin", type=float, default=0.0)
    p.add_argument("--umax", type=float, default=3.0)
    p.add_argument("--samples", type=int, default=61)
    p.add_argument("--out", default="-")

    p = sub.add_parser("residual", help="ODE residual of the dispatched evaluator")
    _add_theta_flags(p)
    p.add_argument("--nmax", type=int, default=100)
    p.add_argument("--umax", type=float, default=3.0)
    p.add_argument("--samples", type=int, default=60)
    p.add_argument("--nmin", type=int, default=6)
    p.add_argument("--out", default="-")

    p = sub.add_parser("wkbdemo", help="piecewise WKB solution of the cosh well")
    p.add_argument("--v0", type=float, required=True, help="well depth V0 > 0")
    p.add_argument("--energy", type=float, required=True, help="energy E < 0")
    p.add_argument("--xmax", type=float, default=4.0)
    p.add_argument("--samples", type=int, default=401)
    p.add_argument("--out", default="-")

    p = sub.add_parser("green", help="Green function over a cartesian window")
    p.add_argument("--geometry", choices=["slit", "strip"], required=True)
    p.add_argument("--bc", choices=["neumann", "dirichlet"], required=True)
    p.add_argument("--a-over-lambda", type=float, required=True)
    p.add_argument("--a", type=float, default=2.0,
                   help="slit/strip width in user units (sets the unit convention)")
    p.add_argument("--source-x", type=float, required=True)
    p.add_argument("--source-y", type=float, required=True)
    p.add_argument("--window", default="-4,4,-4,4", help="x0,x1,y0,y1")
    p.add_argument("--samples", default="41x41", help="NxM grid")
    p.add_argument("--nterms", type=int, default=60)
    p.add_argument("--out", default="-")

    p = sub.add_parser("farfield", help="far-field intensity vs Fraunhofer")
    p.add_argument("--bc", choices=["neumann", "dirichlet"], default="dirichlet")
    p.add_argument("--a-over-lambda", type=float, default=2.0)
    p.add_argument("--v0", type=float, required=True, help="incidence angle in (0, pi)")
    p.add_argument("--u0", type=float, default=5.0)
    p.add_argument("--um", type=float, default=5.0)
    p.add_argument("--samples", type=int, default=721)
    p.add_argument("--out", default="-")

    p = sub.add_parser("validate", help="identity, boundary-condition and reciprocity suite")
    p.add_argument("--grid-step", type=float, default=0.4)
    p.add_argument("--nterms", type=int, default=240)
    p.add_argument("--pairs", type=int, default=12,
                   help="random point pairs per reciprocity check")

    return parser


def _cmd_tables(args) -> int:
    theta = _theta_from(args)
    table = _cached_tables(theta, args.nmax, args.pmax, args.cache_dir)
    out, close = _open_out(args.out)
    try:
        out.write("class,n,p,value\r\n")
        for n in range(table.n_max + 1):
            out.write(f"a,{n},,{_fmt(table.char(SymmetryClass.EVEN, n))}\r\n")
        for n in range(1, table.n_max + 1):
            out.write(f"b,{n},,{_fmt(table.char(SymmetryClass.ODD, n))}\r\n")
        for cls, tag in ((SymmetryClass.EVEN, "A"), (SymmetryClass.ODD, "B")):
            first = 0 if cls is SymmetryClass.EVEN else 1
            for n in range(first, table.n_max + 1):
                orders, row = table.coefficients(cls, n)
                for p_idx, val in zip(orders, row):
                    out.write(f"{tag},{n},{p_idx},{_fmt(val)}\r\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_angular(args) -> int:
    theta = _theta_from(args)
    cls = SymmetryClass.EVEN if args.class_ == "even" else SymmetryClass.ODD
    table = build_tables(theta, max(args.n, 1), args.pmax)
    vs = np.linspace(args.vmin, args.vmax, args.samples)
    vals = angular_eval(table, cls, args.n, vs, deriv=args.deriv)
    out, close = _open_out(args.out)
    try:
        out.write("class,n,v,value\r\n")
        for v, y in zip(vs, vals):
            out.write(f"{args.class_},{args.n},{_fmt(v)},{_fmt(y)}\r\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_radial(args) -> int:
    theta = _theta_from(args)
    cls = SymmetryClass.EVEN if args.class_ == "even" else SymmetryClass.ODD
    if cls is SymmetryClass.ODD and args.n < 1:
        raise UsageError("odd-class modes require --n >= 1")
    table = build_tables(theta, max(args.n, 1), args.pmax)
    us = np.linspace(args.umin, args.umax, args.samples)
    out, close = _open_out(args.out)
    try:
        out.write("n,u,k_abs_x,re,im\r\n")
        for u in us:
            val = (me1_series(table, args.n, float(u)) if cls is SymmetryClass.EVEN
                   else ne1_series(table, args.n, float(u)))
            out.write(f"{args.n},{_fmt(u)},{_fmt(radius_map(theta, float(u)))},"
                      f"{_fmt(val.real)},{_fmt(val.imag)}\r\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_residual(args) -> int:
    theta = _theta_from(args)
    table = build_tables(theta, args.nmax, args.nmax + 120)
    cfg = DEFAULT_CONFIG
    grid = np.linspace(args.umax / args.samples, args.umax, args.samples)
    out, close = _open_out(args.out)
    try:
        out.write("class,n,u,branch,eps\r\n")
        for cls, tag in ((SymmetryClass.EVEN, "even"), (SymmetryClass.ODD, "odd")):
            first = max(args.nmin, 0 if cls is SymmetryClass.EVEN else 1)
            for n in range(first, args.nmax + 1):
                eps = residual(table, cfg, cls, n, grid)
                for u, e in zip(grid, eps):
                    branch = classify(table, cfg, cls, n, float(u)).value
                    etxt = _fmt(e) if np.isfinite(e) else ""
                    out.write(f"{tag},{n},{_fmt(u)},{branch},{etxt}\r\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_wkbdemo(args) -> int:
    problem = WkbDemoProblem(v0=args.v0, energy=args.energy)
    xs = np.linspace(0.0, args.xmax, args.samples)
    out, close = _open_out(args.out)
    try:
        out.write("x,psi,regime\r\n")
        for x in xs:
            out.write(f"{_fmt(x)},{_fmt(demo_cosh_well(problem, float(x)))},"
                      f"{demo_regime(problem, float(x)).value}\r\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_green(args) -> int:
    lam = args.a / args.a_over_lambda
    k = 2.0 * math.pi / lam
    source = to_elliptic(args.source_x, args.source_y, args.a)
    problem = GreenProblem(
        geometry=Geometry(args.geometry), bc=BoundaryCondition(args.bc),
        k=k, a=args.a, source=source, n_terms=args.nterms)
    try:
        x0, x1, y0, y1 = (float(t) for t in args.window.split(","))
        nx, ny = (int(t) for t in args.samples.lower().split("x"))
    except ValueError as exc:
        raise UsageError(f"bad --window/--samples: {exc}") from exc
    xs, ys = np.meshgrid(np.linspace(x0, x1, nx), np.linspace(y0, y1, ny))
    grid = green_grid(problem, xs, ys)
    if grid.meta["tail_warnings"]:
        print(f"warning: {grid.meta['tail_warnings']} grid points were not "
              "tail-converged at n_terms", file=sys.stderr)
    out, close = _open_out(args.out)
    try:
        grid.write_csv(out)
    finally:
        if close:
            out.close()
    return 0


def _cmd_farfield(args) -> int:
    theta = (math.pi * args.a_over_lambda / 2.0) ** 2
    a = 2.0
    k = 4.0 * math.sqrt(theta) / a
    problem = GreenProblem(
        geometry=Geometry.SLIT, bc=BoundaryCondition(args.bc), k=k, a=a,
        source=EllipticPoint(args.u0, -0.5 * math.pi), n_terms=60)
    alphas = np.linspace(0.02, math.pi - 0.02, args.samples)
    intensity = far_field(problem, args.um, args.v0, alphas)
    reference = fraunhofer(theta, args.v0, alphas)
    out, close = _open_out(args.out)
    try:
        out.write("alpha,I_norm,I_fraunhofer\r\n")
        for alpha, i_n, i_f in zip(alphas, intensity, reference):
            out.write(f"{_fmt(alpha)},{_fmt(i_n)},{_fmt(i_f)}\r\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_validate(args) -> int:
    theta = math.pi ** 2
    a = 2.0
    k = 4.0 * math.sqrt(theta) / a
    failures = 0

    def check(name, value, tol):
        nonlocal failures
        ok = value <= tol
        failures += 0 if ok else 1
        print(f"{name}: {value:.3e} (tol {tol:.1e}) {'PASS' if ok else 'FAIL'}")

    src = to_elliptic(1.0, 3.0, a)
    span = np.arange(-4.0, 4.0001, args.grid_step)
    xs, ys = np.meshgrid(span, span)
    for bc in (BoundaryCondition.NEUMANN, BoundaryCondition.DIRICHLET):
        _, _, err = half_plane_identity(theta, src, (xs, ys), bc, a=a,
                                        n_terms=args.nterms)
        check(f"half-plane identity ({bc.value})", err, 1e-3)

    from .scattering import green  # local import to keep CLI import light
    rng = np.random.default_rng(2024)
    for geometry in (Geometry.SLIT, Geometry.STRIP):
        for bc in (BoundaryCondition.NEUMANN, BoundaryCondition.DIRICHLET):
            problem = GreenProblem(geometry, bc, k, a,
                                   to_elliptic(1.091, -0.831, a), n_terms=60)
            worst = 0.0
            count = 0
            while count < args.pairs:
                x1, y1v, x2, y2v = rng.uniform(-3, 3, 4)
                if abs(y1v) < 0.2 or abs(y2v) < 0.2 or math.hypot(x1 - x2, y1v - y2v) < 0.3:
                    continue
                count += 1
                p1 = to_elliptic(x1, y1v, a)
                p2 = to_elliptic(x2, y2v, a)
                pr12 = GreenProblem(geometry, bc, k, a, p1, n_terms=60)
                pr21 = GreenProblem(geometry, bc, k, a, p2, n_terms=60)
                g12 = green(pr12, p2)
                g21 = green(pr21, p1)
                worst = max(worst, abs(g12 - g21) / max(abs(g12), abs(g21)))
            check(f"reciprocity ({geometry.value}/{bc.value})", worst, 1e-3)

    # boundary conditions on the scatterer
    slit_d = GreenProblem(Geometry.SLIT, BoundaryCondition.DIRICHLET, k, a,
                          to_elliptic(1.091, -0.831, a))
    scale = abs(green(slit_d, EllipticPoint(0.8, 2.0)))
    worst = max(abs(green(slit_d, EllipticPoint(u, v)))
                for u in (0.3, 1.0, 2.0) for v in (0.0, math.pi))
    check("slit Dirichlet on screen", worst / scale, 1e-10)
    slit_n = GreenProblem(Geometry.SLIT, BoundaryCondition.NEUMANN, k, a,
                          to_elliptic(1.091, -0.831, a))
    gscale = abs(green(slit_n, EllipticPoint(0.8, 2.0), deriv="v"))
    worst = max(abs(green(slit_n, EllipticPoint(u, v), deriv="v"))
                for u in (0.3, 1.0, 2.0) for v in (0.0, math.pi))
    check("slit Neumann on screen", worst / gscale, 1e-6)
    strip_d = GreenProblem(Geometry.STRIP, BoundaryCondition.DIRICHLET, k, a,
                           to_elliptic(0.0, -2.129, a))
    scale = abs(green(strip_d, EllipticPoint(0.8, 2.0)))
    worst = max(abs(green(strip_d, EllipticPoint(0.0, v)))
                for v in np.linspace(-2.9, 2.9, 7))
    check("strip Dirichlet on ribbon", worst / scale, 1e-8)
    strip_n = GreenProblem(Geometry.STRIP, BoundaryCondition.NEUMANN, k, a,
                           to_elliptic(0.0, -2.129, a))
    gscale = abs(green(strip_n, EllipticPoint(0.8, 2.0), deriv="u"))
    worst = max(abs(green(strip_n, EllipticPoint(0.0, v), deriv="u"))
                for v in np.linspace(-2.9, 2.9, 7))
    check("strip Neumann on ribbon", worst / gscale, 1e-6)

    return 2 if failures else 0


_COMMANDS = {
    "tables": _cmd_tables,
    "angular": _cmd_angular,
    "radial": _cmd_radial,
    "residual": _cmd_residual,
    "wkbdemo": _cmd_wkbdemo,
    "green": _cmd_green,
    "farfield": _cmd_farfield,
    "validate": _cmd_validate,
}


def run(argv) -> int:
    """Parse argv (without the program name) and execute; returns exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except MathieuError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
