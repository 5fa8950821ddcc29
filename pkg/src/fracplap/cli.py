"""Command-line front end.

Subcommands
-----------
solve      first eigenpair: prints lambda1, writes eigenfunction + iteration log
spectrum   p=2 spectrum, counting function on a log grid, slope fit (+ figure)
bounds     two-sided counting bounds, optionally merged with a spectrum CSV
check      property checks, JSON-lines report, exit 0 iff all pass
grid-dump  grid nodes and complement potential as CSV

Precedence: built-in defaults < command-line flags < config file (--config).
A config file holds 'key = value' lines with the same names as the long flags
(dashes may be written as underscores); 'domain' uses the inline grammar

    interval:A,B
    box:LO1[,LO2]:HI1[,HI2]
    ball:C1[,C2]:RADIUS
    cube_union:SIDE:X1[,Y1];X2[,Y2];...

Exit codes: 0 success | 1 failed property checks | 2 usage | 3 invalid
parameters or domain | 4 empty grid | 5 wrong exponent | 6 subcritical
exponent | 7 window too small | 8 not nested / not a ball | 10 i/o error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from pathlib import Path

import numpy as np

from . import artifacts, figures
from .domain_mesh import (
    Ball,
    Box,
    CubeUnion,
    DomainSpec,
    FracParams,
    Interval,
    build_grid,
    complement_potential,
    dilate,
)
from .energy import DiscreteFunction, NonlocalEnergy, assemble, energy_report
from .eigensolver import (
    SolverConfig,
    counting_function,
    first_eigenpair,
    linear_spectrum,
    percentile_window,
    weyl_slope,
)
from .errors import (
    EmptyGrid,
    FracplapError,
    InvalidDomain,
    InvalidParams,
    NonpositiveScale,
    NotABall,
    NotNested,
    SizeOrder,
    OrderViolation,
    SubcriticalExponent,
    WindowTooSmall,
    WrongExponent,
    ZeroFunction,
    GridMismatch,
)
from .properties import (
    check_domain_monotonicity,
    check_poincare,
    check_scaling,
    check_sign_change,
    check_simplicity_gap,
    check_symmetry,
)
from .weyl_bounds import CubeCalibration, bound_report

EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_EMPTY_GRID = 4
EXIT_WRONG_EXPONENT = 5
EXIT_SUBCRITICAL = 6
EXIT_WINDOW = 7
EXIT_PROPERTY_INPUT = 8
EXIT_IO = 10

_ERROR_CODES = [
    ((InvalidParams, InvalidDomain, NonpositiveScale, SizeOrder, OrderViolation,
      ZeroFunction, GridMismatch), EXIT_INVALID),
    ((EmptyGrid,), EXIT_EMPTY_GRID),
    ((WrongExponent,), EXIT_WRONG_EXPONENT),
    ((SubcriticalExponent,), EXIT_SUBCRITICAL),
    ((WindowTooSmall,), EXIT_WINDOW),
    ((NotNested, NotABall), EXIT_PROPERTY_INPUT),
    ((OSError,), EXIT_IO),
]

DEFAULT_SLOPE_WINDOW = (50.0, 80.0)  # percent positions on the log lambda range

KNOWN_PROPERTIES = ("scaling", "monotonicity", "sign_change", "symmetry",
                    "simplicity_gap", "poincare")


def parse_domain(text: str) -> DomainSpec:
    parts = text.strip().split(":")
    kind = parts[0]
    try:
        if kind == "interval":
            a, b = (float(v) for v in parts[1].split(","))
            return Interval(a, b)
        if kind == "box":
            lo = tuple(float(v) for v in parts[1].split(","))
            hi = tuple(float(v) for v in parts[2].split(","))
            return Box(lo, hi)
        if kind == "ball":
            center = tuple(float(v) for v in parts[1].split(","))
            return Ball(center, float(parts[2]))
        if kind == "cube_union":
            side = float(parts[1])
            corners = tuple(
                tuple(float(v) for v in chunk.split(","))
                for chunk in parts[2].split(";")
            )
            return CubeUnion(side, corners)
    except (IndexError, ValueError) as exc:
        raise InvalidDomain(f"cannot parse domain spec {text!r}: {exc}") from exc
    raise InvalidDomain(f"unknown domain kind {kind!r}")


def load_config_file(path: str) -> dict:
    """Flat 'key = value' grammar; '#' starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidParams(f"cannot read config file {path!r}: {exc}") from exc
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParams(f"config line without '=': {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="config file; its entries override flags")
    parser.add_argument("--domain", default="interval:0,1", help="inline domain spec")
    parser.add_argument("--s", type=float, default=0.5, help="fractional order in (0,1)")
    parser.add_argument("--p", type=float, default=2.0, help="integrability exponent > 1")
    parser.add_argument("--n", type=int, default=64, help="resolution per axis")
    parser.add_argument("--tol", type=float, default=1e-8, help="solver tolerance")
    parser.add_argument("--max-iters", type=int, default=20000)
    parser.add_argument("--step0", type=float, default=0.0, help="0 = automatic")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--threads", type=int, default=None,
                        help="pin the BLAS thread count for determinism")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip PNG rendering next to the CSV artifacts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracplap",
        description="Nonlocal p-eigenvalue toolkit: solve, spectra, counting bounds, checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="first eigenpair by Rayleigh minimization")
    _add_common(sp)

    sp = sub.add_parser("spectrum", help="full p=2 spectrum and slope fit")
    _add_common(sp)
    sp.add_argument("--lambda-window", default=None,
                    help="fit window 'LO,HI' in absolute lambda (default: "
                    f"{DEFAULT_SLOPE_WINDOW[0]:g}%%-{DEFAULT_SLOPE_WINDOW[1]:g}%% of the log range)")
    sp.add_argument("--save-eigenvectors", type=int, default=0, metavar="K",
                    help="also write the first K eigenvectors as CSV")

    sp = sub.add_parser("bounds", help="two-sided counting-function bounds")
    _add_common(sp)
    sp.add_argument("--lambda0", type=float, default=None,
                    help="calibration level (default: measured unit-cube lambda1)")
    sp.add_argument("--r", type=int, default=1, help="unit-cube sublevel genus")
    sp.add_argument("--q", type=int, default=1, help="unit-cube sublevel co-genus")
    sp.add_argument("--granularity", type=int, default=8,
                    help="cube granularity for packing/covering of balls")
    sp.add_argument("--spectrum-file", default=None,
                    help="spectrum CSV to merge measured counts from")
    sp.add_argument("--lambda-window", default=None,
                    help="sampling window 'LO,HI' when no spectrum file is given")
    sp.add_argument("--no-upper", action="store_true",
                    help="evaluate only the lower bound")

    sp = sub.add_parser("check", help="run property checks")
    _add_common(sp)
    sp.add_argument("--properties", default="scaling,poincare",
                    help="comma list from: " + ",".join(KNOWN_PROPERTIES))
    sp.add_argument("--tau", type=float, default=2.0, help="dilation for the scaling check")
    sp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    sp = sub.add_parser("grid-dump", help="dump grid nodes and complement potential")
    _add_common(sp)
    return parser


_CONFIG_TYPES = {
    "s": float, "p": float, "n": int, "tol": float, "max_iters": int,
    "step0": float, "seed": int, "threads": int, "tau": float,
    "lambda0": float, "r": int, "q": int, "granularity": int,
    "save_eigenvectors": int,
    "no_figures": lambda v: v.lower() in ("1", "true", "yes"),
    "no_upper": lambda v: v.lower() in ("1", "true", "yes"),
    "inject_fault": lambda v: v.lower() in ("1", "true", "yes"),
}

# a domain may be written as flat geometry keys instead of the inline form
_DOMAIN_KEYS = ("kind", "a", "b", "lo", "hi", "center", "radius", "side", "corners")


def _domain_from_keys(geo: dict) -> str:
    kind = geo.get("kind")
    try:
        if kind == "interval":
            return f"interval:{geo['a']},{geo['b']}"
        if kind == "box":
            return f"box:{geo['lo']}:{geo['hi']}"
        if kind == "ball":
            return f"ball:{geo['center']}:{geo['radius']}"
        if kind == "cube_union":
            return f"cube_union:{geo['side']}:{geo['corners']}"
    except KeyError as exc:
        raise InvalidParams(f"domain kind {kind!r} is missing key {exc}") from exc
    raise InvalidDomain(f"unknown domain kind {kind!r}")


def apply_config_overrides(args: argparse.Namespace) -> argparse.Namespace:
    if not getattr(args, "config", None):
        return args
    overrides = load_config_file(args.config)
    geo = {k: overrides.pop(k) for k in list(overrides) if k in _DOMAIN_KEYS}
    if geo:
        args.domain = _domain_from_keys(geo)
    for key, raw in overrides.items():
        if not hasattr(args, key):
            raise InvalidParams(f"unknown config key {key!r}")
        caster = _CONFIG_TYPES.get(key, str)
        try:
            setattr(args, key, caster(raw))
        except ValueError as exc:
            raise InvalidParams(f"bad value for config key {key!r}: {raw!r}") from exc
    return args


def resolved_config(args: argparse.Namespace, domain: DomainSpec) -> dict:
    # paths name where artifacts live, not what the run computes; leaving
    # them out keeps artifacts byte-identical across output locations
    skip = {"config", "no_figures", "out", "spectrum_file"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        out[key] = value
    out["domain"] = domain.to_dict()
    return out


def _solver_cfg(args) -> SolverConfig:
    return SolverConfig(max_iters=args.max_iters, tol=args.tol,
                        step0=args.step0, seed=args.seed)


def _parse_window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise InvalidParams(f"bad window {text!r}, expected 'LO,HI'") from exc
    if not 0 < lo < hi:
        raise InvalidParams(f"window must satisfy 0 < LO < HI, got {text!r}")
    return lo, hi


def cmd_solve(args) -> int:
    domain = parse_domain(args.domain)
    params = FracParams(args.s, args.p, domain.dim)
    grid = build_grid(domain, params, args.n)
    energy = assemble(grid)
    result = first_eigenpair(energy, _solver_cfg(args))
    cfg = resolved_config(args, domain)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    artifacts.function_csv(out / "eigenfunction.csv", result.eigenfunction, cfg)
    hist = result.history
    artifacts.write_csv(out / "solve_iterations.csv",
                        {"iter": hist[:, 0].astype(int), "rayleigh": hist[:, 1],
                         "residual": hist[:, 2], "step": hist[:, 3]}, cfg)
    summary = {
        "lambda1": result.lambda1,
        "converged": result.converged,
        "status": result.status,
        "iterations": result.iterations,
        "residual": result.residual,
        **energy_report(energy, result.eigenfunction),
    }
    artifacts.write_json(out / "solve_summary.json", summary, cfg)
    if not args.no_figures:
        figures.eigenfunction_figure(out / "eigenfunction.png",
                                     result.eigenfunction, result.lambda1)
    if not result.converged:
        print(f"warning: solver stopped with status {result.status} "
              f"(residual {result.residual:.3e})", file=sys.stderr)
    print(f"{result.lambda1:.12g}")
    return 0


def cmd_spectrum(args) -> int:
    domain = parse_domain(args.domain)
    params = FracParams(args.s, args.p, domain.dim)
    grid = build_grid(domain, params, args.n)
    spec = linear_spectrum(assemble(grid))
    vals = spec.eigenvalues
    cfg = resolved_config(args, domain)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    artifacts.write_csv(out / "spectrum.csv",
                        {"k": np.arange(1, len(vals) + 1), "lambda": vals}, cfg)
    for k in range(min(args.save_eigenvectors, len(vals))):
        fn = DiscreteFunction(spec.eigenvectors[:, k], grid)
        artifacts.function_csv(out / f"eigenvector_{k + 1}.csv", fn, cfg)
    lam_grid = np.geomspace(vals[0] * 0.9, vals[-1] * 1.05, 200)
    counts = [counting_function(spec, lam) for lam in lam_grid]
    artifacts.write_csv(out / "counting.csv",
                        {"lambda": lam_grid, "N": counts}, cfg)

    if args.lambda_window:
        window = _parse_window(args.lambda_window)
    else:
        window = percentile_window(spec, *DEFAULT_SLOPE_WINDOW)
    fit = weyl_slope(spec, window)
    target = params.dim / params.sp
    artifacts.write_json(out / "slope.json", {
        "slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2,
        "window": list(fit.window), "points": fit.points,
        "upper_tail_flag": fit.upper_tail_flag,
        "conjectured_slope": target,
    }, cfg)
    if not args.no_figures:
        figures.spectrum_figure(out / "spectrum.png", vals, fit, target)
    if fit.upper_tail_flag:
        print("warning: fit window touches the top 20% of the spectrum",
              file=sys.stderr)
    print(f"slope = {fit.slope:.12g}")
    print(f"conjectured = {target:.12g}")
    print(f"r2 = {fit.r2:.12g}")
    return 0


def _measured_unit_cube_lambda0(params: FracParams, n: int) -> float:
    cube = Interval(0.0, 1.0) if params.dim == 1 else Box((0.0,) * 2, (1.0,) * 2)
    grid = build_grid(cube, params, n)
    if params.p == 2.0:
        return float(linear_spectrum(assemble(grid)).eigenvalues[0])
    return first_eigenpair(assemble(grid), SolverConfig(tol=1e-12)).lambda1


def cmd_bounds(args) -> int:
    domain = parse_domain(args.domain)
    params = FracParams(args.s, args.p, domain.dim)
    calibrated = args.lambda0 is not None
    lam0 = args.lambda0 if calibrated else _measured_unit_cube_lambda0(params, args.n)
    cal = CubeCalibration(lam0, args.r, args.q, calibrated=calibrated)

    spectrum_vals = None
    if args.spectrum_file:
        cols = artifacts.read_csv(args.spectrum_file)
        if "lambda" not in cols:
            raise InvalidParams(f"no 'lambda' column in {args.spectrum_file!r}")
        spectrum_vals = np.sort(cols["lambda"])
        # sample just above each jump so the strict count at the listed level
        # reflects the eigenvalue being reached
        lambdas = np.unique(spectrum_vals) * (1.0 + 1e-9)
    elif args.lambda_window:
        lo, hi = _parse_window(args.lambda_window)
        lambdas = np.geomspace(lo, hi, 101)
    else:
        lambdas = np.geomspace(lam0, lam0 * 1e4, 101)

    class _Vals:
        eigenvalues = spectrum_vals

    report = bound_report(cal, params, domain, lambdas,
                          granularity=args.granularity,
                          spectrum=_Vals if spectrum_vals is not None else None,
                          want_upper=False if args.no_upper else None)
    cfg = resolved_config(args, domain)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cols = {
        "lambda": report.lambdas,
        "lower": report.lower,
        "lower_valid": report.lower_valid,
    }
    if report.upper is not None:
        cols["upper"] = report.upper
        cols["upper_valid"] = report.upper_valid
    if report.measured is not None:
        cols["measured_N"] = report.measured
    artifacts.write_csv(out / "bounds.csv", cols, cfg)
    if not args.no_figures:
        figures.bounds_figure(out / "bounds.png", report)
    print(f"c1 = {report.c1:.12g}")
    if report.c2 is not None:
        print(f"c2 = {report.c2:.12g}")
    if not report.calibrated:
        print("note: uncalibrated template constants (r = q = 1)", file=sys.stderr)
    return 0


def cmd_check(args) -> int:
    domain = parse_domain(args.domain)
    params = FracParams(args.s, args.p, domain.dim)
    names = [t.strip() for t in args.properties.split(",") if t.strip()]
    for name in names:
        if name not in KNOWN_PROPERTIES:
            print(f"error: unknown property {name!r}; known: {', '.join(KNOWN_PROPERTIES)}",
                  file=sys.stderr)
            return EXIT_USAGE
    cfg_solver = _solver_cfg(args)
    reports = []
    energy = None

    def get_energy() -> NonlocalEnergy:
        nonlocal energy
        if energy is None:
            energy = assemble(build_grid(domain, params, args.n))
        return energy

    for name in names:
        if name == "scaling":
            rep = check_scaling(domain, params, args.tau, args.n, seed=args.seed)
        elif name == "monotonicity":
            rep = check_domain_monotonicity(dilate(domain, 0.5), domain, params, args.n)
        elif name == "sign_change":
            rep = check_sign_change(get_energy())
        elif name == "symmetry":
            rep = check_symmetry(domain, params, args.n)
        elif name == "simplicity_gap":
            rep = check_simplicity_gap(get_energy(), seed=args.seed)
        else:
            e = get_energy()
            lam1 = first_eigenpair(e, cfg_solver).lambda1
            if args.inject_fault:
                import dataclasses
                e = NonlocalEnergy(
                    grid=e.grid,
                    weights=e.weights * 0.1,
                    kappa=dataclasses.replace(e.kappa, kappa=e.kappa.kappa * 0.1),
                )
            rep = check_poincare(e, lam1, seed=args.seed)
        reports.append(rep)

    cfg = resolved_config(args, domain)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    artifacts.write_jsonl(out / "checks.jsonl",
                          [r.to_json_dict() for r in reports], cfg)
    for rep in reports:
        print(f"{rep.property_id}: {rep.verdict}")
    return 0 if all(r.passed for r in reports) else EXIT_CHECK_FAILED


def cmd_grid_dump(args) -> int:
    domain = parse_domain(args.domain)
    params = FracParams(args.s, args.p, domain.dim)
    grid = build_grid(domain, params, args.n)
    kappa = complement_potential(grid).kappa
    cfg = resolved_config(args, domain)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    artifacts.grid_csv(out / "grid.csv", grid, kappa, cfg)
    if not args.no_figures:
        figures.kappa_figure(out / "grid.png", grid, kappa)
    print(f"nodes = {grid.num_nodes}")
    return 0


_COMMANDS = {
    "solve": cmd_solve,
    "spectrum": cmd_spectrum,
    "bounds": cmd_bounds,
    "check": cmd_check,
    "grid-dump": cmd_grid_dump,
}


@contextlib.contextmanager
def _thread_limit(threads):
    if threads is None:
        yield
        return
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        print("warning: threadpoolctl unavailable, --threads ignored", file=sys.stderr)
        yield
        return
    with threadpool_limits(limits=threads):
        yield


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = apply_config_overrides(args)
        with _thread_limit(args.threads):
            return _COMMANDS[args.command](args)
    except FracplapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for types, code in _ERROR_CODES:
            if isinstance(exc, types):
                return code
        return EXIT_INVALID
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def console_entry():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
