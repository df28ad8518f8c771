"""Picard iteration for the half-space problem with nonlinear boundary interaction.

The boundary condition z^a dU/dz = -mu |U|^(p-1) U at z = 0 turns the mild solution into
the fixed point of

    Lambda(U) = T*(u0) + D(F) + Theta*(-mu |U|^(p-1) U(., 0, .)),

iterated in the norm sup_t ||U(t)||_(L^2_a) + sup_z ||k(z) U(., z, .)||_(L^q_t L^r_x),
where k = 1 for a >= 0. The nonlinearity always acts on the exact z = 0 trace layer.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from bsns.analysis.exponents import (
    INF,
    anomalous_gap,
    critical_p,
    dual_exponent,
    regime_of,
    solve_q,
    subcritical_gain,
)
from bsns.analysis.norms import MixedNormSpec, mixed_norm
from bsns.evolution.duhamel import boundary_trace, op_D, op_Thetastar, op_Tstar
from bsns.exceptions import InvalidParameterError, NonConvergenceError, NumericalFailureError
from bsns.fields import BoundaryTrace, HalfSpaceField, SpaceTimeField, check_same_grids
from bsns.numerics.grids import TimeGrid

logger = logging.getLogger(__name__)

InitialIterate = Literal["linear", "zero"]

# Contraction factor a window or amplitude must reach to count as small.
TARGET_CONTRACTION = 0.5


@dataclass(frozen=True, slots=True, eq=False)
class NonlinearProblem:
    """Data of the nonlinear boundary problem on a fixed time window.

    Attributes:
        a: Bessel parameter, -1 < a < 1.
        d: Tangential dimension.
        mu: Complex coupling of the boundary nonlinearity.
        p: Power, 1 < p <= p_c(a, d).
        u0: Initial datum; its grids fix x and z.
        tgrid: Time grid on [0, T].
        F: Bulk forcing, zero when None.
        r: Tangential exponent; p + 1 when None.
        q: Time exponent making (q, r, inf) admissible; solved when None.
        q_inf: Partner exponent of the anomalous regime; solved when None.
        substeps: Sub-cells of the boundary quadrature; automatic when None.
    """

    a: float
    d: int
    mu: complex
    p: float
    u0: HalfSpaceField
    tgrid: TimeGrid
    F: SpaceTimeField | None = None
    r: float | None = None
    q: float | None = None
    q_inf: float | None = None
    substeps: int | None = None

    def __post_init__(self) -> None:
        if not -1.0 < self.a < 1.0:
            raise InvalidParameterError(message=f"Nonlinear problem needs -1 < a < 1, got {self.a}")
        if self.p <= 1.0:
            raise InvalidParameterError(message=f"Power must exceed 1, got {self.p}")
        p_c = critical_p(self.a, self.d)
        if self.p > p_c + 1e-12:
            raise InvalidParameterError(message=f"Power {self.p} is above the critical power {p_c:g}")
        if self.u0.a != self.a or self.u0.xgrid.d != self.d:
            raise InvalidParameterError(message="Initial datum does not match (a, d)")
        if self.F is not None:
            check_same_grids(self.u0, self.F)
            if self.F.tgrid.key != self.tgrid.key:
                raise InvalidParameterError(message="Forcing lives on a different time grid")

        r = self.r if self.r is not None else self.p + 1.0
        object.__setattr__(self, "r", r)
        if self.q is None:
            object.__setattr__(self, "q", solve_q(self.a, self.d, r))
        if self.regime == "anomalous_a" and self.q_inf is None:
            object.__setattr__(self, "q_inf", solve_q(self.a, self.d, r, "nonneg_a"))

    @property
    def T(self) -> float:
        return self.tgrid.T

    @property
    def regime(self) -> str:
        return regime_of(self.a)

    @property
    def is_critical(self) -> bool:
        return abs(self.p - critical_p(self.a, self.d)) < 1e-12

    def forcing(self) -> SpaceTimeField:
        if self.F is not None:
            return self.F
        return SpaceTimeField.zeros(self.u0.xgrid, self.u0.zgrid, self.tgrid)

    def scaled(self, amplitude: float) -> "NonlinearProblem":
        """The same problem with u0 and F multiplied by amplitude."""
        F = None if self.F is None else self.F.scaled(amplitude)
        return replace(self, u0=self.u0.with_values(amplitude * self.u0.values), F=F)

    def on_window(self, u0: HalfSpaceField, tgrid: TimeGrid) -> "NonlinearProblem":
        """The unforced problem restarted from u0 on a new time grid."""
        if self.F is not None:
            raise InvalidParameterError(message="Only unforced problems can be moved to another window")
        return replace(self, u0=u0, tgrid=tgrid)


@dataclass(frozen=True, slots=True, eq=False)
class SolveDiagnostics:
    """What a Picard run observed.

    Attributes:
        iterations: Number of Lambda evaluations.
        differences: ||Lambda(U_k) - U_k|| per iteration.
        contraction_factors: Ratios of successive differences.
        mass: t -> ||U(t)||^2 in L^2_a for the returned iterate.
        boundary_power: t -> integral of |U(x, 0, t)|^(p+1) dx.
        residual: The last difference.
        converged: Whether the residual reached the tolerance.
    """

    iterations: int
    differences: tuple[float, ...]
    contraction_factors: tuple[float, ...]
    mass: NDArray[np.float64] = field(repr=False)
    boundary_power: NDArray[np.float64] = field(repr=False)
    residual: float
    converged: bool

    @property
    def max_contraction(self) -> float:
        """Largest contraction factor after the first iteration, 0 if there is none."""
        tail = self.contraction_factors[1:] or self.contraction_factors
        return max(tail, default=0.0)


def solution_norm(U: SpaceTimeField, prob: NonlinearProblem) -> float:
    """sup_t ||U(t)||_(L^2_a) + sup_z ||k U(., z, .)||_(L^q_T L^r_x), z = 0 included."""
    energy = float(np.sqrt(np.max(U.mass_profile())))
    weight = "k" if prob.regime == "anomalous_a" else "none"
    return energy + mixed_norm(U, MixedNormSpec(m=INF, q=prob.q, r=prob.r, weight=weight))


def boundary_power(U: SpaceTimeField, p: float) -> NDArray[np.float64]:
    """t -> integral of |U(x, 0, t)|^(p+1) dx."""
    trace = boundary_trace(U)
    return U.xgrid.integrate(np.abs(trace.values) ** (p + 1.0))


def boundary_nonlinearity(U: SpaceTimeField, mu: complex, p: float) -> BoundaryTrace:
    """Neumann datum -mu |U|^(p-1) U on the trace of U."""
    trace = boundary_trace(U)
    values = trace.values
    return trace.with_values(-mu * np.abs(values) ** (p - 1.0) * values)


def _iterate(
    prob: NonlinearProblem, tol: float, max_iter: int, ceiling: float, initial: InitialIterate
) -> tuple[SpaceTimeField, SolveDiagnostics]:
    linear = op_Tstar(prob.a, prob.d, prob.u0, prob.tgrid)
    if prob.F is not None:
        linear = linear + op_D(prob.a, prob.d, prob.F)

    U = linear if initial == "linear" else SpaceTimeField.zeros(prob.u0.xgrid, prob.u0.zgrid, prob.tgrid)
    differences: list[float] = []
    factors: list[float] = []
    converged = False

    for iteration in range(1, max_iter + 1):
        datum = boundary_nonlinearity(U, prob.mu, prob.p)
        update = linear + op_Thetastar(prob.a, prob.d, datum, prob.u0.zgrid, prob.substeps)
        size = solution_norm(update, prob)
        if not np.isfinite(size) or size > ceiling:
            raise NumericalFailureError(
                message=f"Picard iterate norm {size:.3e} exceeds ceiling {ceiling:.3e} at iteration {iteration}"
            )
        diff = solution_norm(update + U.scaled(-1.0), prob)
        if differences and differences[-1] > 0.0:
            factors.append(diff / differences[-1])
        differences.append(diff)
        U = update
        logger.debug("Picard iteration %d: norm=%.6e, difference=%.3e", iteration, size, diff)
        if diff <= tol:
            converged = True
            break

    diagnostics = SolveDiagnostics(
        iterations=len(differences),
        differences=tuple(differences),
        contraction_factors=tuple(factors),
        mass=U.mass_profile(),
        boundary_power=boundary_power(U, prob.p),
        residual=differences[-1] if differences else 0.0,
        converged=converged,
    )
    return U, diagnostics


def picard_solve(
    prob: NonlinearProblem,
    tol: float = 1e-8,
    max_iter: int = 50,
    ceiling: float = 1e6,
    initial: InitialIterate = "linear",
) -> tuple[SpaceTimeField, SolveDiagnostics]:
    """Iterate Lambda to its fixed point.

    Args:
        prob: The problem.
        tol: Stop once ||Lambda(U) - U|| <= tol.
        max_iter: Iteration budget.
        ceiling: Iterates with a larger norm count as divergence.
        initial: Start from the linear part ("linear") or from zero ("zero").

    Returns:
        Tuple of (solution, diagnostics).

    Raises:
        NumericalFailureError: If an iterate exceeds the ceiling or is not finite.
        NonConvergenceError: If max_iter is reached before tol; carries the diagnostics.
    """
    if max_iter < 1:
        raise InvalidParameterError(message=f"max_iter must be positive, got {max_iter}")
    U, diagnostics = _iterate(prob, tol, max_iter, ceiling, initial)
    if not diagnostics.converged:
        raise NonConvergenceError(
            message="Picard iteration did not reach the tolerance",
            iterations=diagnostics.iterations,
            residual=diagnostics.residual,
            tolerance=tol,
            diagnostics=diagnostics,
        )
    logger.info(
        "Picard converged: %d iterations, residual %.3e, max contraction %.3f",
        diagnostics.iterations,
        diagnostics.residual,
        diagnostics.max_contraction,
    )
    return U, diagnostics


def uniqueness_probe(prob: NonlinearProblem, tol: float = 1e-8, max_iter: int = 50) -> float:
    """Distance between the fixed points reached from the linear part and from zero."""
    from_linear, _ = picard_solve(prob, tol, max_iter, initial="linear")
    from_zero, _ = picard_solve(prob, tol, max_iter, initial="zero")
    return solution_norm(from_linear + from_zero.scaled(-1.0), prob)


@dataclass(frozen=True, slots=True)
class SmallnessReport:
    """Norms entering the smallness hypothesis of the well-posedness theory.

    No pass/fail verdict is given: the threshold constant is not known.

    Attributes:
        regime: nonneg_a or anomalous_a.
        critical: Whether p equals the critical power.
        datum_norm: ||u0|| in L^2_a.
        forcing_energy: ||F|| in L^1_t L^2_a.
        forcing_dual: ||F|| in L^1_(a,z) L^r'_t L^r'_x, with 1/k inserted in the anomalous regime.
        gap: 1/q - 1/q_inf in the anomalous regime, None otherwise.
        window_factor: max(1, T^gap), 1 outside the anomalous regime.
        total: window_factor times the sum of the three norms.
    """

    regime: str
    critical: bool
    datum_norm: float
    forcing_energy: float
    forcing_dual: float
    gap: float | None
    window_factor: float
    total: float


def smallness_report(prob: NonlinearProblem) -> SmallnessReport:
    datum_norm = prob.u0.norm()
    forcing_energy = 0.0
    forcing_dual = 0.0
    if prob.F is not None:
        forcing_energy = float(np.sqrt(prob.F.mass_profile()) @ prob.tgrid.weights)
        r_dual = dual_exponent(prob.r)
        weight = "k_inverse" if prob.regime == "anomalous_a" else "none"
        forcing_dual = mixed_norm(prob.F, MixedNormSpec(m=1.0, q=r_dual, r=r_dual, weight=weight))

    gap = None
    window_factor = 1.0
    if prob.regime == "anomalous_a":
        gap = anomalous_gap(prob.q, prob.q_inf)
        window_factor = max(1.0, prob.T**gap)

    return SmallnessReport(
        regime=prob.regime,
        critical=prob.is_critical,
        datum_norm=datum_norm,
        forcing_energy=forcing_energy,
        forcing_dual=forcing_dual,
        gap=gap,
        window_factor=window_factor,
        total=window_factor * (datum_norm + forcing_energy + forcing_dual),
    )


@dataclass(frozen=True, slots=True, eq=False)
class MassIdentity:
    """Discrete check of d/dt ||U||^2 = -2 Im(mu) integral of |U(x, 0, t)|^(p+1) dx.

    Attributes:
        times: Midpoints of the time cells.
        derivative: Divided differences of the mass.
        predicted: -2 Im(mu) times the cell average of the boundary power.
        residual: derivative - predicted.
        mass: The mass at the time nodes.
    """

    times: NDArray[np.float64] = field(repr=False)
    derivative: NDArray[np.float64] = field(repr=False)
    predicted: NDArray[np.float64] = field(repr=False)
    residual: NDArray[np.float64] = field(repr=False)
    mass: NDArray[np.float64] = field(repr=False)

    @property
    def relative_drift(self) -> float:
        """max_t |m(t) - m(0)| / m(0); 0 for the zero field."""
        if self.mass[0] == 0.0:
            return 0.0
        return float(np.max(np.abs(self.mass - self.mass[0])) / self.mass[0])


def require_unforced(F: SpaceTimeField | None) -> None:
    """Raise unless F is absent or identically zero; the mass identity has no bulk source term.

    Raises:
        InvalidParameterError: If F has a nonzero value.
    """
    if F is not None and np.any(F.values != 0.0):
        raise InvalidParameterError(message="The mass identity holds only without bulk forcing (F = 0)")


def mass_derivative_residual(
    U: SpaceTimeField, mu: complex, p: float, F: SpaceTimeField | None = None
) -> MassIdentity:
    """Compare the discrete mass derivative of an unforced solution with the boundary term.

    Raises:
        InvalidParameterError: If the forcing F the solution was computed with is nonzero.
    """
    require_unforced(F)
    tgrid = U.tgrid
    mass = U.mass_profile()
    power = boundary_power(U, p)
    derivative = np.diff(mass) / tgrid.step
    predicted = -2.0 * complex(mu).imag * 0.5 * (power[1:] + power[:-1])
    return MassIdentity(
        times=0.5 * (tgrid.nodes[1:] + tgrid.nodes[:-1]),
        derivative=derivative,
        predicted=predicted,
        residual=derivative - predicted,
        mass=mass,
    )


def _contraction_at(prob: NonlinearProblem, tol: float, max_iter: int) -> float:
    try:
        _, diagnostics = _iterate(prob, tol, max_iter, ceiling=1e6, initial="linear")
    except NumericalFailureError:
        return INF
    return diagnostics.max_contraction


@dataclass(frozen=True, slots=True)
class SubcriticalWindow:
    """Suggested local existence time below the critical power.

    Attributes:
        gain: delta = 1/q' - p/q, the power of T in the contraction estimate.
        T0: Largest window found with contraction at most TARGET_CONTRACTION.
        contraction: Contraction factor observed on that window.
    """

    gain: float
    T0: float
    contraction: float


def subcritical_window(
    prob: NonlinearProblem, bisections: int = 6, tol: float = 1e-10, probe_iterations: int = 4
) -> SubcriticalWindow:
    """Bisect the window length until Picard contracts by TARGET_CONTRACTION.

    The time step count of prob.tgrid is kept on every trial window.

    Raises:
        InvalidParameterError: If p is not below the critical power.
    """
    if prob.p >= critical_p(prob.a, prob.d):
        raise InvalidParameterError(message=f"Power {prob.p} is not subcritical")
    gain = subcritical_gain(prob.p, prob.q)
    if prob.mu == 0:
        return SubcriticalWindow(gain=gain, T0=prob.T, contraction=0.0)

    def trial(T: float) -> float:
        window = prob.on_window(prob.u0, TimeGrid(T, prob.tgrid.nt))
        return _contraction_at(window, tol, probe_iterations)

    good, bad = 0.0, prob.T
    contraction = trial(prob.T)
    if contraction <= TARGET_CONTRACTION:
        return SubcriticalWindow(gain=gain, T0=prob.T, contraction=contraction)

    best = INF
    for _ in range(bisections):
        mid = 0.5 * (good + bad)
        observed = trial(mid)
        logger.debug("Window %.4g: contraction %.3f", mid, observed)
        if observed <= TARGET_CONTRACTION:
            good, best = mid, observed
        else:
            bad = mid
    if good == 0.0:
        raise NumericalFailureError(message=f"No contracting window found down to T = {bad:.3e}")
    return SubcriticalWindow(gain=gain, T0=good, contraction=best)


@dataclass(frozen=True, slots=True)
class AmplitudeThreshold:
    """Largest datum amplitude found with contraction at most TARGET_CONTRACTION.

    Attributes:
        amplitude: Multiplier of (u0, F).
        contraction: Contraction observed there.
    """

    amplitude: float
    contraction: float


def amplitude_threshold(
    prob: NonlinearProblem, upper: float = 1.0, bisections: int = 8, tol: float = 1e-10, probe_iterations: int = 4
) -> AmplitudeThreshold:
    """Bisect the amplitude of the data in (0, upper] for a contracting Picard iteration."""
    good, bad = 0.0, upper
    contraction = _contraction_at(prob.scaled(upper), tol, probe_iterations)
    if contraction <= TARGET_CONTRACTION:
        return AmplitudeThreshold(amplitude=upper, contraction=contraction)

    best = 0.0
    for _ in range(bisections):
        mid = 0.5 * (good + bad)
        observed = _contraction_at(prob.scaled(mid), tol, probe_iterations)
        if observed <= TARGET_CONTRACTION:
            good, best = mid, observed
        else:
            bad = mid
    return AmplitudeThreshold(amplitude=good, contraction=best)


@dataclass(frozen=True, slots=True, eq=False)
class ContinuationReport:
    """Masses at the ends of consecutive Picard windows.

    Attributes:
        window_ends: End time of each window.
        masses: ||U||^2 at each window end, preceded by the initial mass.
        drift: max |m - m(0)| / m(0) over the recorded masses.
        iterations: Picard iterations per window.
    """

    window_ends: NDArray[np.float64] = field(repr=False)
    masses: NDArray[np.float64] = field(repr=False)
    drift: float
    iterations: tuple[int, ...]


def extend_in_time(
    prob: NonlinearProblem, windows: int, tol: float = 1e-8, max_iter: int = 50
) -> ContinuationReport:
    """Restart the solver on [kT, (k+1)T] from the last slice of the previous window.

    Only reports the accumulated discrete mass drift; it makes no global existence claim.

    Raises:
        InvalidParameterError: Unless a >= 0, p is subcritical, F = 0 and Im(mu) = 0.
    """
    if prob.a < 0.0 or prob.p >= critical_p(prob.a, prob.d):
        raise InvalidParameterError(message="Continuation needs a >= 0 and a subcritical power")
    if prob.F is not None or complex(prob.mu).imag != 0.0:
        raise InvalidParameterError(message="Continuation needs F = 0 and real mu")
    if windows < 1:
        raise InvalidParameterError(message=f"windows must be positive, got {windows}")

    masses = [prob.u0.norm() ** 2]
    iterations = []
    current = prob
    for _ in range(windows):
        U, diagnostics = picard_solve(current, tol, max_iter)
        masses.append(float(diagnostics.mass[-1]))
        iterations.append(diagnostics.iterations)
        current = current.on_window(U.slice(prob.tgrid.nt), prob.tgrid)

    masses_arr = np.array(masses)
    drift = float(np.max(np.abs(masses_arr - masses_arr[0])) / masses_arr[0]) if masses_arr[0] > 0 else 0.0
    logger.info("Continued over %d windows: mass drift %.3e", windows, drift)
    return ContinuationReport(
        window_ends=prob.T * np.arange(1, windows + 1),
        masses=masses_arr,
        drift=drift,
        iterations=tuple(iterations),
    )
