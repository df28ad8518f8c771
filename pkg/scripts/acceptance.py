#!/usr/bin/env python3
"""Acceptance checks for the half-space solver at desk scale.

Runs each property check, prints one row per check and exits non-zero if any fails.

Usage:
    python scripts/acceptance.py
    python scripts/acceptance.py --only 1 5 13
    python scripts/acceptance.py -v
"""

import argparse
import logging
import math
import sys
import tempfile
import time
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Add src to path for development
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from bsns import cli
from bsns.analysis.exponents import solve_q
from bsns.analysis.verify import (
    dispersive_fit,
    kernel_selfcorrelation_check,
    restriction_check,
    scaling_invariance,
    strichartz_ratio,
    trace_continuity_profile,
)
from bsns.evolution import (
    NonlinearProblem,
    adjoint_T,
    amplitude_threshold,
    mass_derivative_residual,
    op_Theta,
    op_Thetastar,
    op_Tstar,
    picard_solve,
    propagate_z,
    propagate_z_kernel,
    uniqueness_probe,
)
from bsns.fixtures import GaussianEnsemble, gaussian_datum
from bsns.numerics import (
    CartesianGrid,
    TimeGrid,
    build_radial_grid,
    hankel_forward,
    hankel_inverse,
    hankel_transform,
    kernel_sa,
    self_dual_radial_grid,
)

SEED = 20240611


@dataclass
class CheckResult:
    """Outcome of one acceptance check."""

    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _l2a(values: np.ndarray, weights: np.ndarray) -> float:
    return math.sqrt(float(np.sum(weights * np.abs(values) ** 2)))


def check_mass_conservation() -> tuple[bool, str]:
    worst = 0.0
    for a in (-0.5, 0.0, 0.5, 1.0):
        grid = self_dual_radial_grid(a, 128)
        phi = np.exp(-(grid.nodes**2)).astype(np.complex128)
        for t in (0.1, 1.0, 10.0):
            ratio = _l2a(propagate_z(a, t, phi, grid), grid.weights) / _l2a(phi, grid.weights)
            worst = max(worst, abs(ratio - 1.0))
    return worst <= 1e-6, f"max |ratio - 1| = {worst:.2e}"


def check_spectral_vs_kernel() -> tuple[bool, str]:
    worst = 0.0
    for a in (-0.5, 0.0, 1.0):
        grid = build_radial_grid(a, 48.0, 256)
        phi = np.exp(-(grid.nodes**2))
        for t in (0.5, 1.0, 2.0):
            spectral = propagate_z(a, t, phi, grid)
            quadrature = propagate_z_kernel(a, t, lambda z: np.exp(-(z**2)), grid)
            difference = _l2a(spectral - quadrature, grid.weights) / _l2a(spectral, grid.weights)
            worst = max(worst, difference)
    return worst <= 1e-4, f"max relative L2_a difference = {worst:.2e}"


def check_cosine_kernel() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED)
    z, zeta = rng.uniform(0.0, 5.0, size=(2, 100))
    t = rng.uniform(0.1, 5.0, size=100)
    worst = 0.0
    for zi, zetai, ti in zip(z, zeta, t, strict=True):
        value = complex(kernel_sa(0.0, zi, zetai, ti))
        closed = (
            np.exp(-0.25j * np.pi)
            / math.sqrt(math.pi * ti)
            * math.cos(zi * zetai / (2.0 * ti))
            * np.exp(1j * (zi**2 + zetai**2) / (4.0 * ti))
        )
        worst = max(worst, abs(value - closed))
    return worst <= 1e-12, f"max pointwise difference = {worst:.2e}"


def check_dispersive() -> tuple[bool, str]:
    errors = {a: dispersive_fit(a).relative_error for a in (0.0, 0.5)}
    anomalous = dispersive_fit(-0.5)
    steps = np.diff(anomalous.envelope_ratios)
    monotone = bool(np.all(steps > 0.0) or np.all(steps < 0.0))
    passed = all(e <= 0.05 for e in errors.values()) and anomalous.ratio_spread < 2.0 and not monotone
    detail = ", ".join(f"a={a:g}: {e:.2%}" for a, e in errors.items())
    return passed, f"{detail}; a=-0.5 spread {anomalous.ratio_spread:.3f}, monotone={monotone}"


def check_selfcorrelation() -> tuple[bool, str]:
    worst = max(kernel_selfcorrelation_check(a).max_residual for a in (-0.5, 0.0, 0.5))
    return worst <= 1e-3, f"max residual = {worst:.2e}"


def check_hankel() -> tuple[bool, str]:
    worst_fixed = worst_trip = worst_plancherel = 0.0
    for a in (-0.5, 0.0, 0.5, 1.0):
        grid = self_dual_radial_grid(a, 128)
        hankel = hankel_transform(grid)
        phi = np.exp(-0.5 * grid.nodes**2)
        spectrum = hankel_forward(a, grid, phi)
        fixed = np.exp(-0.5 * hankel.frequencies**2)
        worst_fixed = max(worst_fixed, float(np.max(np.abs(spectrum - fixed))))
        worst_trip = max(worst_trip, float(np.max(np.abs(hankel_inverse(a, grid, spectrum) - phi))))
        ratio = _l2a(spectrum, hankel.spectral_weights) / _l2a(phi, grid.weights)
        worst_plancherel = max(worst_plancherel, abs(ratio - 1.0))
    passed = max(worst_fixed, worst_trip, worst_plancherel) <= 1e-6
    return passed, f"fixed point {worst_fixed:.1e}, round trip {worst_trip:.1e}, Plancherel {worst_plancherel:.1e}"


def check_duality() -> tuple[bool, str]:
    xgrid = CartesianGrid(1, 8.0, 32)
    zgrid = self_dual_radial_grid(0.0, 32)
    tgrid = TimeGrid(1.0, 16)
    ensemble = GaussianEnsemble(SEED, 8)
    data = ensemble.data(xgrid, zgrid)
    forcings = ensemble.forcings(xgrid, zgrid, tgrid)
    boundaries = ensemble.boundaries(xgrid, tgrid)

    worst = 0.0
    for u0, F, Phi in zip(data, forcings, boundaries, strict=True):
        left = op_Thetastar(0.0, 1, Phi, zgrid).inner(F)
        right = Phi.inner(op_Theta(0.0, 1, F))
        worst = max(worst, abs(left - right) / max(abs(left), 1e-300))
        left = op_Tstar(0.0, 1, u0, tgrid).inner(F)
        right = u0.inner(adjoint_T(0.0, 1, F))
        worst = max(worst, abs(left - right) / max(abs(left), 1e-300))
    return worst <= 1e-4, f"max relative pairing gap = {worst:.2e}"


def check_strichartz_stability() -> tuple[bool, str]:
    xgrid = CartesianGrid(1, 8.0, 32)
    tgrid = TimeGrid(1.0, 32)
    drifts = []
    for a in (0.0, -0.5):
        zgrid = self_dual_radial_grid(a, 48)
        q_inf = solve_q(a, 1, 3.0, "nonneg_a") if a < 0.0 else None
        tables = [
            strichartz_ratio(
                a, 1, "homogeneous", GaussianEnsemble(SEED, n).data(xgrid, zgrid), 3.0, 3.0, q_inf, zgrid, tgrid
            )
            for n in (16, 32)
        ]
        drifts.append(tables[0].drift(tables[1]))
    return max(drifts) <= 0.2, ", ".join(f"drift {d:.2%}" for d in drifts)


def check_scaling() -> tuple[bool, str]:
    xgrid = CartesianGrid(1, 8.0, 64)
    zgrid = self_dual_radial_grid(0.0, 64)
    tgrid = TimeGrid(0.25, 32)
    u0 = gaussian_datum(xgrid, zgrid)
    q = solve_q(0.0, 1, 3.0)
    admissible = scaling_invariance(u0, tgrid, q, 3.0)
    perturbed = scaling_invariance(u0, tgrid, 1.0 / (1.0 / q + 0.1), 3.0)
    passed = admissible.spread <= 0.05 and perturbed.is_monotone
    return passed, f"admissible spread {admissible.spread:.2e}, perturbed monotone={perturbed.is_monotone}"


def check_trace_continuity() -> tuple[bool, str]:
    xgrid = CartesianGrid(1, 8.0, 32)
    zgrid = build_radial_grid(0.0, 4.0, 64, "gauss_jacobi")
    tgrid = TimeGrid(1.0, 32)
    boundaries = GaussianEnsemble(SEED, 4).boundaries(xgrid, tgrid)
    report = trace_continuity_profile(0.0, boundaries, zgrid, solve_q(0.0, 1, 3.0), 3.0)
    passed = report.all_decreasing and report.max_relative_end < 0.1
    return passed, f"decreasing={report.all_decreasing}, max relative end {report.max_relative_end:.3f}"


def _small_problem(mu: complex, amplitude: float = 0.1) -> NonlinearProblem:
    xgrid = CartesianGrid(1, 8.0, 32)
    zgrid = self_dual_radial_grid(0.0, 48)
    u0 = gaussian_datum(xgrid, zgrid, amplitude=amplitude)
    return NonlinearProblem(a=0.0, d=1, mu=mu, p=2.0, u0=u0, tgrid=TimeGrid(1.0, 32))


def check_nonlinear_mass() -> tuple[bool, str]:
    real_prob = _small_problem(1.0)
    U, _ = picard_solve(real_prob)
    conserved = mass_derivative_residual(U, real_prob.mu, real_prob.p, real_prob.F)

    damped_prob = _small_problem(0.5j)
    V, _ = picard_solve(damped_prob)
    damped = mass_derivative_residual(V, damped_prob.mu, damped_prob.p, damped_prob.F)
    decreasing = bool(np.all(np.diff(damped.mass) < 0.0))
    late = slice(2, None)
    mismatch = float(np.max(np.abs(damped.residual[late]) / np.abs(damped.predicted[late])))

    passed = conserved.relative_drift <= 1e-3 and decreasing and mismatch <= 0.05
    return passed, (
        f"Im(mu)=0 drift {conserved.relative_drift:.2e}; Im(mu)=0.5 decreasing={decreasing}, mismatch {mismatch:.2%}"
    )


def check_picard_contraction() -> tuple[bool, str]:
    prob = _small_problem(1.0, amplitude=1.0)
    threshold = amplitude_threshold(prob)
    below = prob.scaled(0.5 * threshold.amplitude)
    tol = 1e-8
    _, diagnostics = picard_solve(below, tol=tol)
    gap = uniqueness_probe(below, tol=tol)
    passed = diagnostics.max_contraction <= 0.6 and gap <= 5.0 * tol
    return passed, (
        f"threshold {threshold.amplitude:.3g}, max contraction {diagnostics.max_contraction:.3f}, "
        f"uniqueness gap {gap:.1e}"
    )


def check_restriction() -> tuple[bool, str]:
    worst_residual = 0.0
    worst_ratio = 0.0
    for a in (0.0, 1.0):
        xgrid = CartesianGrid(1, 8.0, 32)
        zgrid = self_dual_radial_grid(a, 32)
        tgrid = TimeGrid(1.0, 32)
        forcings = GaussianEnsemble(SEED, 8).forcings(xgrid, zgrid, tgrid)
        table = restriction_check(forcings)
        worst_residual = max(worst_residual, table.max_plancherel_residual)
        worst_ratio = max(worst_ratio, table.max_ratio)
    passed = worst_residual <= 1e-4 and math.isfinite(worst_ratio)
    return passed, f"Plancherel residual {worst_residual:.2e}, max ratio {worst_ratio:.3g}"


def check_reproducibility() -> tuple[bool, str]:
    with tempfile.TemporaryDirectory() as tmp:
        outputs = []
        for run in ("first", "second"):
            out = Path(tmp) / run
            code = cli.run(["verify-strichartz", "--ensemble", "4", "--out", str(out)])
            if code != 0:
                return False, f"CLI exited with {code}"
            outputs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
    identical = outputs[0] == outputs[1] and bool(outputs[0])
    return identical, f"{len(outputs[0])} CSV files compared"


CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("Mass conservation of the transverse propagator", check_mass_conservation),
    ("Spectral vs kernel propagator", check_spectral_vs_kernel),
    ("a = 0 kernel cosine closed form", check_cosine_kernel),
    ("Dispersive decay rate", check_dispersive),
    ("Kernel self-correlation identity", check_selfcorrelation),
    ("Hankel fixed point, round trip, Plancherel", check_hankel),
    ("Duality pairings", check_duality),
    ("Strichartz ratio stability", check_strichartz_stability),
    ("Scaling invariance", check_scaling),
    ("Trace continuity", check_trace_continuity),
    ("Nonlinear mass identity", check_nonlinear_mass),
    ("Picard contraction and uniqueness", check_picard_contraction),
    ("Restriction and Plancherel", check_restriction),
    ("Reproducible CSV output", check_reproducibility),
]


def run_checks(selected: set[int] | None) -> list[CheckResult]:
    results = []
    for number, (name, check) in enumerate(CHECKS, start=1):
        if selected and number not in selected:
            continue
        print(f"[{number:2d}] {name}...")
        start = time.perf_counter()
        try:
            passed, detail = check()
        except Exception as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        results.append(CheckResult(number, name, passed, detail, time.perf_counter() - start))
    return results


def print_results(results: list[CheckResult]) -> None:
    print("\n" + "=" * 60)
    print("ACCEPTANCE RESULTS")
    print("=" * 60)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.number:>3} {status:<5} {r.name:<44} {r.seconds:7.1f}s  {r.detail}")
    passed = sum(r.passed for r in results)
    print(f"\n{passed}/{len(results)} checks passed")


def main():
    parser = argparse.ArgumentParser(description="Run the acceptance checks")
    parser.add_argument(
        "--only",
        type=int,
        nargs="+",
        default=None,
        help="Run only these check numbers",
    )
    parser.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Log solver progress at INFO level",
    )
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    results = run_checks(set(args.only) if args.only else None)
    print_results(results)
    if not all(r.passed for r in results):
        sys.exit(1)


if __name__ == "__main__":
    main()
