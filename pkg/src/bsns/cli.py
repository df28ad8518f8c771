"""Command-line interface: solves, verification runs and exponent arithmetic.

Usage:
    bsns solve-linear --config run.yaml --out out/
    bsns solve-nonlinear --config run.yaml --out out/
    bsns verify-dispersive --a 0.5 --out out/
    bsns verify-strichartz --config run.yaml --estimate forcing --ensemble 16 --out out/
    bsns verify-restriction --config run.yaml --out out/
    bsns verify-mass --config run.yaml --out out/
    bsns verify-trace --config run.yaml --out out/
    bsns admissible --a 0 --d 1 --r 3
    bsns kernel-eval --a 0 --z 1 --zeta 1 --t 1

Exit codes: 0 success, 1 invalid configuration or usage, 2 numerical failure, 3 non-convergence.
"""

import argparse
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import NoReturn

import numpy as np

from bsns.analysis.exponents import INF, is_admissible, regime_of, solve_q
from bsns.analysis.verify import (
    ESTIMATES,
    dispersive_fit,
    restriction_check,
    strichartz_ratio,
    trace_continuity_profile,
)
from bsns.config import RunConfig, load_config, parse_config
from bsns.evolution.nonlinear import mass_derivative_residual, require_unforced
from bsns.exceptions import InvalidParameterError, NonConvergenceError, SolverError
from bsns.fixtures import GaussianEnsemble, rough_boundary
from bsns.numerics.kernels import kernel_sa
from bsns.snapshot import write_csv, write_manifest, write_snapshot
from bsns.solver import HalfSpaceSolver, SolveResult

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_NONCONVERGENCE = 3


def _config(args: argparse.Namespace) -> RunConfig:
    if args.config is None:
        return parse_config({})
    return load_config(args.config)


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _exponents(config: RunConfig, solver: HalfSpaceSolver, args: argparse.Namespace) -> tuple[float, float]:
    """(q, r) from flags, then the configuration, then r = p + 1 and the admissible q."""
    r = args.r if args.r is not None else config.exponents.r
    if r is None:
        r = solver.power + 1.0
    q = args.q if args.q is not None else config.exponents.q
    if q is None:
        q = solve_q(config.a, config.d, r)
    return q, r


def _finish(out: Path, files: list[Path], config: RunConfig | None) -> None:
    manifest = write_manifest(out, files, config.digest if config is not None else None)
    print(f"Wrote {len(files)} files and {manifest}")


def _write_solution(out: Path, result: SolveResult) -> list[Path]:
    U = result.solution
    provenance = {"config_sha256": result.config_digest, "nonlinear": result.nonlinear}
    files = write_snapshot(out / "solution.bsns", U, provenance)
    mass = U.mass_profile()
    files.append(write_csv(out / "mass.csv", ("t", "mass"), zip(U.tgrid.nodes, mass, strict=True)))
    if result.neumann is not None:
        rows = zip(result.neumann.times, *result.neumann.residual, strict=True)
        header = ("t",) + tuple(f"residual_z{z:.6g}" for z in result.neumann.depths)
        files.append(write_csv(out / "neumann.csv", header, rows))
    if result.diagnostics is not None:
        factors = (math.nan,) + result.diagnostics.contraction_factors
        rows = [(k + 1, diff, factors[k]) for k, diff in enumerate(result.diagnostics.differences)]
        files.append(write_csv(out / "picard.csv", ("iteration", "difference", "contraction"), rows))
    return files


def _solve(args: argparse.Namespace, nonlinear: bool) -> int:
    config = _config(args)
    result = HalfSpaceSolver(config).solve_with_diagnostics(nonlinear)
    if result.error is not None:
        raise result.error
    out = _out_dir(args)
    files = _write_solution(out, result)
    print(f"mass drift: {result.mass_drift:.3e}")
    _finish(out, files, config)
    return EXIT_OK


def cmd_solve_linear(args: argparse.Namespace) -> int:
    return _solve(args, nonlinear=False)


def cmd_solve_nonlinear(args: argparse.Namespace) -> int:
    return _solve(args, nonlinear=True)


def cmd_verify_dispersive(args: argparse.Namespace) -> int:
    times = np.geomspace(args.t_min, args.t_max, args.samples)
    fit = dispersive_fit(args.a, times, alpha=args.alpha)
    out = _out_dir(args)
    rows = zip(fit.times, fit.sup_values, fit.envelope_ratios, strict=True)
    files = [write_csv(out / "dispersive.csv", ("t", "sup", "envelope_ratio"), rows)]
    print(f"slope: {fit.slope:.6f} expected: {fit.expected_slope:.6f} relative error: {fit.relative_error:.3e}")
    print(f"envelope ratio spread: {fit.ratio_spread:.4f}")
    _finish(out, files, None)
    return EXIT_OK


def cmd_verify_strichartz(args: argparse.Namespace) -> int:
    config = _config(args)
    solver = HalfSpaceSolver(config)
    q, r = _exponents(config, solver, args)
    q_inf = args.q_inf if args.q_inf is not None else config.exponents.q_inf
    ensemble = GaussianEnsemble(config.seed, args.ensemble)
    xgrid, zgrid, tgrid = solver.xgrid, solver.zgrid, solver.tgrid

    if args.estimate in ("homogeneous", "trace"):
        members = ensemble.data(xgrid, zgrid)
    elif args.estimate == "forcing":
        if regime_of(config.a) == "anomalous_a":
            members = ensemble.compact_forcings(xgrid, zgrid, tgrid)
        else:
            members = ensemble.forcings(xgrid, zgrid, tgrid)
    else:
        members = ensemble.boundaries(xgrid, tgrid)

    table = strichartz_ratio(
        config.a, config.d, args.estimate, members, q, r, q_inf, zgrid, tgrid, config.solver.substeps
    )
    out = _out_dir(args)
    rows = [(s.index, s.energy, s.mixed, s.rhs, s.ratio) for s in table.samples]
    header = ("member", "energy", "mixed", "rhs", "ratio")
    files = [write_csv(out / f"strichartz_{args.estimate}.csv", header, rows)]
    print(f"{args.estimate}: max ratio {table.max_ratio:.6g} over {len(rows)} members")
    _finish(out, files, config)
    return EXIT_OK


def cmd_verify_restriction(args: argparse.Namespace) -> int:
    config = _config(args)
    solver = HalfSpaceSolver(config)
    forcings = GaussianEnsemble(config.seed, args.ensemble).forcings(solver.xgrid, solver.zgrid, solver.tgrid)
    table = restriction_check(forcings, args.q, args.r)
    out = _out_dir(args)
    rows = [(s.index, s.extension_norm, s.restriction_norm, s.data_norm, s.ratio) for s in table.samples]
    header = ("member", "extension_norm", "restriction_norm", "data_norm", "ratio")
    files = [write_csv(out / "restriction.csv", header, rows)]
    print(f"max ratio {table.max_ratio:.6g}, max Plancherel residual {table.max_plancherel_residual:.3e}")
    _finish(out, files, config)
    return EXIT_OK


def cmd_verify_mass(args: argparse.Namespace) -> int:
    config = _config(args)
    solver = HalfSpaceSolver(config)
    _, F, _ = solver.build_data()
    require_unforced(F)
    result = solver.solve_with_diagnostics(nonlinear=True)
    if result.error is not None:
        raise result.error
    identity = mass_derivative_residual(result.solution, config.mu, solver.power, F)
    out = _out_dir(args)
    rows = zip(identity.times, identity.derivative, identity.predicted, identity.residual, strict=True)
    files = [write_csv(out / "mass_identity.csv", ("t", "derivative", "predicted", "residual"), rows)]
    files.append(write_csv(out / "mass.csv", ("t", "mass"), zip(solver.tgrid.nodes, identity.mass, strict=True)))
    print(f"relative mass drift: {identity.relative_drift:.3e}")
    _finish(out, files, config)
    return EXIT_OK


def cmd_verify_trace(args: argparse.Namespace) -> int:
    config = _config(args)
    solver = HalfSpaceSolver(config)
    q, r = _exponents(config, solver, args)
    boundaries = GaussianEnsemble(config.seed, args.ensemble).boundaries(solver.xgrid, solver.tgrid)
    boundaries.append(rough_boundary(solver.xgrid, solver.tgrid, config.seed))
    report = trace_continuity_profile(config.a, boundaries, solver.zgrid, q, r, substeps=config.solver.substeps)
    out = _out_dir(args)
    rows = [
        (i, depth, distance, profile.trace_norm)
        for i, profile in enumerate(report.profiles)
        for depth, distance in zip(profile.depths, profile.distances, strict=True)
    ]
    files = [write_csv(out / "trace_profile.csv", ("member", "z", "distance", "trace_norm"), rows)]
    print(f"all decreasing: {report.all_decreasing}, max relative end: {report.max_relative_end:.3e}")
    _finish(out, files, config)
    return EXIT_OK


def cmd_admissible(args: argparse.Namespace) -> int:
    m = INF if args.m is None else args.m
    if args.q is not None:
        triple = is_admissible(args.a, args.d, args.q, args.r, m)
        status = "endpoint" if triple.endpoint else ("admissible" if triple.admissible else "inadmissible")
        print(f"q={args.q:g} r={args.r:g} m={m:g} residual={triple.residual:.3e} status={status}")
        return EXIT_OK
    q = solve_q(args.a, args.d, args.r)
    line = f"q={q:g} r={args.r:g} m=inf status=admissible"
    if regime_of(args.a) == "anomalous_a":
        line += f" q_inf={solve_q(args.a, args.d, args.r, 'nonneg_a'):g}"
    print(line)
    return EXIT_OK


def cmd_kernel_eval(args: argparse.Namespace) -> int:
    value = complex(kernel_sa(args.a, args.z, args.zeta, args.t))
    print(f"re={value.real:.17g} im={value.imag:.17g} abs={abs(value):.17g}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Reports usage errors as invalid parameters instead of exiting with status 2."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise InvalidParameterError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bsns", description="Bessel-Schrödinger half-space solver")
    parser.add_argument("--verbose", "-v", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    commands = parser.add_subparsers(dest="command", required=True)

    def configured(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--config", "-c", type=Path, default=None, help="JSON or YAML run configuration")
        sub.add_argument("--out", "-o", type=Path, default=Path("bsns-out"), help="Output directory")
        return sub

    configured("solve-linear", "Solve the linear problem").set_defaults(handler=cmd_solve_linear)
    configured("solve-nonlinear", "Solve the nonlinear problem by Picard iteration").set_defaults(
        handler=cmd_solve_nonlinear
    )

    sub = commands.add_parser("verify-dispersive", help="Fit the transverse dispersive decay rate")
    sub.add_argument("--a", type=float, required=True)
    sub.add_argument("--alpha", type=float, default=4.0, help="Gaussian rate of the datum")
    sub.add_argument("--t-min", type=float, default=1.0)
    sub.add_argument("--t-max", type=float, default=16.0)
    sub.add_argument("--samples", type=int, default=9)
    sub.add_argument("--out", "-o", type=Path, default=Path("bsns-out"))
    sub.set_defaults(handler=cmd_verify_dispersive)

    sub = configured("verify-strichartz", "Strichartz ratios over a seeded ensemble")
    sub.add_argument("--estimate", choices=ESTIMATES, default="homogeneous")
    sub.add_argument("--ensemble", type=int, default=16)
    sub.add_argument("--q", type=float, default=None)
    sub.add_argument("--r", type=float, default=None)
    sub.add_argument("--q-inf", type=float, default=None)
    sub.set_defaults(handler=cmd_verify_strichartz)

    sub = configured("verify-restriction", "Restriction ratios and the Plancherel identity")
    sub.add_argument("--ensemble", type=int, default=8)
    sub.add_argument("--q", type=float, default=None)
    sub.add_argument("--r", type=float, default=None)
    sub.set_defaults(handler=cmd_verify_restriction)

    configured("verify-mass", "Mass identity of a nonlinear solve").set_defaults(handler=cmd_verify_mass)

    sub = configured("verify-trace", "Trace continuity profiles of the boundary operator")
    sub.add_argument("--ensemble", type=int, default=4)
    sub.add_argument("--q", type=float, default=None)
    sub.add_argument("--r", type=float, default=None)
    sub.set_defaults(handler=cmd_verify_trace)

    sub = commands.add_parser("admissible", help="Solve or classify an exponent triple")
    sub.add_argument("--a", type=float, required=True)
    sub.add_argument("--d", type=int, required=True)
    sub.add_argument("--r", type=float, required=True)
    sub.add_argument("--q", type=float, default=None, help="Classify (q, r, m) instead of solving for q")
    sub.add_argument("--m", type=float, default=None, help="Transverse exponent (default inf)")
    sub.set_defaults(handler=cmd_admissible)

    sub = commands.add_parser("kernel-eval", help="Evaluate the transverse kernel S_a(z, zeta, t)")
    sub.add_argument("--a", type=float, required=True)
    sub.add_argument("--z", type=float, required=True)
    sub.add_argument("--zeta", type=float, default=0.0)
    sub.add_argument("--t", type=float, required=True)
    sub.set_defaults(handler=cmd_kernel_eval)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Parse argv, run one subcommand and map solver errors to exit codes."""
    try:
        args = build_parser().parse_args(argv)
    except InvalidParameterError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID
    level = logging.WARNING if args.verbose == 0 else (logging.INFO if args.verbose == 1 else logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return args.handler(args)
    except InvalidParameterError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except NonConvergenceError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except SolverError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
