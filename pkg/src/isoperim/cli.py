"""Command-line interface.

Subcommands: catalog, check-matrix, reconstruct, ellipticity, verify,
interpolate, monotonicity, suite. Configuration is flags only, so a logged
invocation fully describes the run. Exit codes: 0 success, 1 verification
failure, 2 config or domain error, 3 expected violation (informational),
4 numerical failure.

Commands that write a delimited report to --out also render a companion PNG
next to it (same stem) unless --no-plot is given.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import io, pipeline, semigroup, suite, verify
from .errors import (
    ConfigError,
    DomainError,
    IllPosedError,
    IsoperimError,
    PreconditionError,
    ReconstructionError,
    RegionError,
    RootBracketError,
)
from .special import gauss_hermite_rule
from .surfaces import CATALOG_NAMES, GridSpec, default_grid, make_catalog_surface, nsd_grid_sweep
from .testfunctions import catalog_function
from .verify import MeasureSpec

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_CONFIG = 2
EXIT_EXPECTED_VIOLATION = 3
EXIT_NUMERICAL = 4

VERIFY_CASES = ("master", "log-sobolev", "poincare", "bobkov", "beckner",
                "three-halves", "arccos", "b-theorem", "houdre-kagan",
                "phi-entropy", "erti")


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="isoperim",
                                  description="certificates and quadrature checks "
                                              "for Gaussian functional inequalities")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, *, surface=False, boundary=False, func=False):
        if surface:
            p.add_argument("--surface", required=True, help="catalog surface name")
            p.add_argument("--p", type=float, default=None, help="Beckner exponent")
        if boundary:
            p.add_argument("--boundary", required=True, help="boundary data name")
        if func:
            p.add_argument("--f", dest="fname", default=None, help="test function name")
        p.add_argument("--n", type=int, default=1, help="dimension (default 1)")
        p.add_argument("--sigma", type=float, default=1.0, help="Gaussian scale (default 1)")
        p.add_argument("--order", type=int, default=64, help="quadrature order (default 64)")
        p.add_argument("--grid", default=None,
                       help="grid spec x0:x1:nx,y0:y1:ny (surface-default spacing)")
        p.add_argument("--tol", type=float, default=1e-9, help="tolerance (default 1e-9)")
        p.add_argument("--t-max", dest="t_max", type=float, default=None,
                       help="horizon / largest characteristic time")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
        p.add_argument("--no-plot", dest="no_plot", action="store_true",
                       help="skip the companion figure next to --out")

    sub.add_parser("catalog", help="list the surface catalog")

    p = sub.add_parser("check-matrix", help="sweep the certificate matrix over a grid")
    common(p, surface=True)
    p.add_argument("--report-residual", action="store_true",
                   help="note the degeneracy residual statistics on stdout")

    p = sub.add_parser("reconstruct", help="rebuild a surface from boundary data")
    common(p, boundary=True)
    p.add_argument("--method", choices=("exact", "spectral"), default="exact")
    p.add_argument("--modes", type=int, default=20, help="spectral mode count")
    p.add_argument("--weight-sigma", type=float, default=1.0,
                   help="spectral expansion weight scale")
    p.add_argument("--weight-center", type=float, default=0.0,
                   help="spectral expansion weight center")

    p = sub.add_parser("ellipticity", help="certificate check for a heat solution")
    common(p, boundary=True)

    p = sub.add_parser("verify", help="run one inequality check")
    common(p, func=True)
    p.add_argument("--case", required=True, choices=VERIFY_CASES)
    p.add_argument("--surface", default=None, help="surface for master / phi-entropy")
    p.add_argument("--p", type=float, default=None, help="Beckner exponent")
    p.add_argument("--d", type=int, default=1, help="sandwich depth")
    p.add_argument("--m", type=int, default=3, help="derivative order for erti")

    p = sub.add_parser("interpolate", help="pointwise semigroup interpolation check")
    common(p, surface=True, func=True)

    p = sub.add_parser("monotonicity", help="trace of the semigroup functional")
    common(p, surface=True, func=True)

    p = sub.add_parser("suite", help="run the acceptance suite")
    common(p)
    return top


def _parse_grid(text: str, surface=None) -> GridSpec:
    try:
        xpart, ypart = text.split(",")
        x0, x1, nx = xpart.split(":")
        y0, y1, ny = ypart.split(":")
        log_x = bool(surface.log_x_grid) if surface is not None else False
        return GridSpec(float(x0), float(x1), int(nx), float(y0), float(y1), int(ny),
                        log_x=log_x)
    except (ValueError, DomainError) as exc:
        raise ConfigError(f"bad --grid {text!r}: expected x0:x1:nx,y0:y1:ny") from exc


def _emit(args, header, rows, payload=None, plot=None):
    """Write the delimited output (and figure) or print to stdout."""
    fmt = args.fmt or ("json" if header is None else "csv")
    if header is None:
        fmt = "json"  # structured reports have no tabular form
    elif fmt == "json" and payload is None:
        payload = [dict(zip(header, (v if isinstance(v, str) else float(v)
                                     for v in row))) for row in rows]
    if args.out:
        out = Path(args.out)
        if fmt == "json":
            io.write_json(out, payload)
        else:
            io.write_csv(out, header, rows)
        if plot is not None and not args.no_plot:
            plot(out.with_suffix(".png"))
    else:
        if fmt == "json":
            sys.stdout.write(io.json_text(payload))
        else:
            sys.stdout.write(io.csv_text(header, rows))


def _surface_from(args):
    return make_catalog_surface(args.surface, p=getattr(args, "p", None))


def cmd_catalog(args) -> int:
    print(f"{len(CATALOG_NAMES)} surfaces:")
    for name in CATALOG_NAMES:
        surf = make_catalog_surface(name, p=1.5 if name == "beckner" else None)
        lo, hi = surf.domain_x
        flag = "" if surf.elliptic else "  [non-elliptic: fails the matrix condition]"
        extra = "" if name != "beckner" else "  (p in [1, 2]; shown at p=1.5)"
        print(f"  {name:13s} domain x in [{lo:g}, {hi:g}]   M(x,y) = {surf.formula}")
        print(f"  {'':13s} certifies: {surf.inequality}{extra}{flag}")
    return EXIT_OK


def cmd_check_matrix(args) -> int:
    surface = _surface_from(args)
    grid = _parse_grid(args.grid, surface) if args.grid else default_grid(surface)
    report = nsd_grid_sweep(surface, grid, tol=args.tol)

    def plot(path):
        from . import plots

        plots.save_sweep_heatmap(report, path)

    _emit(args, report.CSV_HEADER, report.rows(), plot=plot)
    if args.report_residual:
        frac = report.positive_residual_fraction()
        print(f"max relative residual {report.max_rel_residual:.3e}; "
              f"positive residual at {100 * frac:.1f}% of y>0 nodes", file=sys.stderr)
    if report.violations:
        print(f"{len(report.violations)} violating nodes on {surface.name}",
              file=sys.stderr)
        return EXIT_EXPECTED_VIOLATION if not surface.elliptic else EXIT_VERIFY_FAIL
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    name = args.boundary
    boundary = pipeline.catalog_boundary(name)
    if args.method == "spectral":
        sol = pipeline.solve_backward_heat(boundary, "spectral", horizon=args.t_max,
                                           modes=args.modes, sigma=args.weight_sigma,
                                           center=args.weight_center)
        reference = None
    else:
        if name not in pipeline.RECONSTRUCTIBLE:
            raise ConfigError(f"no exact backwards solution for {name!r}; "
                              f"use --method spectral")
        sol = pipeline.heat_solution_for_boundary(name, horizon=args.t_max)
        reference = make_catalog_surface(name).m

    if args.grid:
        grid = _parse_grid(args.grid)
        xs, ys = grid.x_values(), grid.y_values()
    elif name in pipeline.RECONSTRUCTIBLE:
        xs, ys = suite.reconstruction_grid(name)
    else:
        xs = np.linspace(*boundary.omega, 40) if all(map(math.isfinite, boundary.omega)) \
            else np.linspace(-2.0, 2.0, 40)
        ys = np.linspace(0.0, 1.0, 40)

    table = pipeline.reconstruct_grid(sol, xs, ys, boundary=boundary,
                                      reference=reference, t_max=args.t_max)

    def plot(path):
        from . import plots

        plots.save_reconstruction_map(table, path)

    _emit(args, table.CSV_HEADER, table.rows(), plot=plot)
    n_nodes = table.x.size
    if table.n_failed > 0.001 * n_nodes:
        print(f"{table.n_failed}/{n_nodes} nodes failed to converge", file=sys.stderr)
        return EXIT_NUMERICAL
    if reference is not None and table.max_deviation > 1e-8:
        print(f"max deviation {table.max_deviation:.3e} exceeds 1e-8", file=sys.stderr)
        return EXIT_VERIFY_FAIL
    print(f"reconstructed {table.n_ok}/{n_nodes} nodes"
          + (f", max deviation {table.max_deviation:.3e}" if reference is not None else "")
          + (f", {table.n_skipped} outside the region" if table.n_skipped else ""),
          file=sys.stderr)
    return EXIT_OK


def cmd_ellipticity(args) -> int:
    name = args.boundary
    if name == "three_halves":
        sol = pipeline.heat_solution_for_boundary(name, horizon=args.t_max)
    else:
        sol = pipeline.solve_backward_heat(pipeline.catalog_boundary(name),
                                           "closed_form", horizon=args.t_max)
    report = pipeline.ellipticity_check(sol, tol=args.tol)
    payload = {
        "solution": report.solution,
        "min_certificate": report.min_certificate,
        "max_u_t": report.max_u_t,
        "n_nodes": report.n_nodes,
        "n_near_singular": report.n_near_singular,
        "pass": report.passed,
    }
    rows = [(report.solution, report.min_certificate, report.max_u_t,
             report.n_nodes, report.n_near_singular, str(report.passed))]
    header = ("solution", "min_certificate", "max_u_t", "n_nodes",
              "n_near_singular", "pass")
    _emit(args, header, rows, payload=payload)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def cmd_verify(args) -> int:
    spec = MeasureSpec(args.n, args.sigma)
    case = args.case
    if case == "erti":
        rep = verify.erti_random_sweep(args.m, n_points=1000, seed=args.seed)
        payload = {"case": f"erti[m={args.m}]", "max_abs_form": rep.max_abs_form,
                   "max_abs_cleared": rep.max_abs_cleared, "pass": rep.passed,
                   "seed": rep.seed}
        _emit(args, None, None, payload=payload)
        return EXIT_OK if rep.passed else EXIT_VERIFY_FAIL

    f = catalog_function(args.fname or "const_07", args.n)
    if case == "master" or case == "phi-entropy":
        if not args.surface:
            raise ConfigError(f"--surface is required for {case}")
        surf = make_catalog_surface(args.surface, p=args.p)
        fn = verify.verify_master if case == "master" else verify.phi_entropy_bound
        rep = fn(surf, f, spec, order=args.order, tol=args.tol)
    elif case == "log-sobolev":
        rep = verify.verify_log_sobolev(f, spec, order=args.order, tol=args.tol)
    elif case == "poincare":
        rep = verify.verify_poincare(f, spec, order=args.order, tol=args.tol)
    elif case == "bobkov":
        rep = verify.verify_bobkov(f, spec, order=args.order, tol=args.tol)
    elif case == "beckner":
        rep = verify.verify_beckner(f, args.p if args.p is not None else 1.5, spec,
                                    order=args.order, tol=args.tol)
    elif case == "three-halves":
        rep = verify.verify_three_halves(f, spec, order=args.order, tol=args.tol)
    elif case == "arccos":
        rep = verify.verify_arccos(f, spec, order=args.order, tol=args.tol)
    elif case == "b-theorem":
        rep = verify.verify_b_theorem_even(f, spec, order=args.order, tol=args.tol)
    elif case == "houdre-kagan":
        rep = verify.verify_houdre_kagan(f, args.d, spec, order=args.order, tol=args.tol)
    else:
        raise ConfigError(f"unknown case {case!r}")
    _emit(args, None, None, payload=rep.to_json_dict())
    return EXIT_OK if rep.passed else EXIT_VERIFY_FAIL


def _t_grid(args):
    if args.t_max is not None:
        return tuple(np.linspace(0.0, args.t_max, 6)) + (math.inf,)
    return suite.T_GRID


def cmd_interpolate(args) -> int:
    surf = _surface_from(args)
    f = catalog_function(args.fname or "one_plus_half_tanh", args.n)
    rule = gauss_hermite_rule(args.order, args.n)
    xs = np.linspace(-2.0, 2.0, 5)
    x_grid = np.column_stack([xs] * args.n)
    report = semigroup.interpolation_check(surf, f, _t_grid(args), x_grid, rule,
                                           tol=max(args.tol, 1e-8))

    def plot(path):
        from . import plots

        plots.save_interpolation(report, path)

    header = ("t",) + tuple(f"x{i}" for i in range(args.n)) + ("lhs", "rhs")
    _emit(args, header, report.rows, plot=plot)
    print(f"max violation {report.max_violation:.3e}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def cmd_monotonicity(args) -> int:
    surf = _surface_from(args)
    f = catalog_function(args.fname or "exp_03", args.n)
    rule = gauss_hermite_rule(args.order, args.n)
    report = semigroup.monotonicity_check(surf, f, _t_grid(args), rule)

    def plot(path):
        from . import plots

        plots.save_trace(report, path)

    _emit(args, report.CSV_HEADER, report.rows(), plot=plot)
    print(f"monotone={report.monotone} equilibrium={report.equilibrium_value:.12g}",
          file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def cmd_suite(args) -> int:
    result = suite.run_acceptance(seed=args.seed, order=args.order)
    payload = result.to_payload()
    for crit in result.criteria:
        status = "PASS" if crit.passed else "FAIL"
        print(f"[{status}] {crit.name}: {crit.notes or crit.description}")
    summary = payload["summary"]
    print(f"{summary['passed']}/{summary['total']} checks passed")
    if args.out:
        io.write_json(Path(args.out), payload)
        if not args.no_plot:
            from . import plots

            plots.save_margin_chart(result.reports, Path(args.out).with_suffix(".png"))
    if not result.passed:
        failing = [c.name for c in result.criteria if not c.passed]
        print("failing criteria: " + ", ".join(failing), file=sys.stderr)
        return EXIT_VERIFY_FAIL
    return EXIT_OK


_COMMANDS = {
    "catalog": cmd_catalog,
    "check-matrix": cmd_check_matrix,
    "reconstruct": cmd_reconstruct,
    "ellipticity": cmd_ellipticity,
    "verify": cmd_verify,
    "interpolate": cmd_interpolate,
    "monotonicity": cmd_monotonicity,
    "suite": cmd_suite,
}


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, DomainError, RegionError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ReconstructionError, IllPosedError, RootBracketError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except IsoperimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAIL


if __name__ == "__main__":
    sys.exit(main())
