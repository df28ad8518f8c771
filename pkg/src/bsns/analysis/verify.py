"""Numerical checks of the dispersive, Strichartz, scaling, trace and restriction estimates.

Each check returns a frozen report and asserts nothing; thresholds belong to the caller.
Ensemble members are evaluated on a thread pool sized by BSNS_THREADS and reduced in
submission order, so tables do not depend on scheduling.
"""

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, TypeVar

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from bsns.analysis.exponents import (
    INF,
    dual_exponent,
    is_admissible,
    regime_of,
    restriction_dual_exponent,
    scaling_exponent,
    solve_q,
    weight_k,
)
from bsns.analysis.norms import MixedNormSpec, lebesgue_t, lebesgue_x, mixed_norm, sum_norm, weighted_lp
from bsns.config import worker_count
from bsns.evolution.duhamel import (
    TraceProfile,
    boundary_trace,
    boundary_trace_with_profile,
    op_D,
    op_Thetastar,
    op_Tstar,
)
from bsns.evolution.propagators import adjoint_T, propagate_z_kernel
from bsns.exceptions import InvalidParameterError, NumericalFailureError
from bsns.fields import BoundaryTrace, HalfSpaceField, SpaceTimeField
from bsns.numerics.grids import CartesianGrid, TimeGrid, WeightedRadialGrid, build_radial_grid
from bsns.numerics.kernels import KernelParams, kernel_sa_boundary
from bsns.numerics.specfun import oscillatory_tail
from bsns.numerics.transforms import apply_along, fourier_x, hankel_transform

logger = logging.getLogger(__name__)

Estimate = Literal["homogeneous", "forcing", "boundary", "trace"]

ESTIMATES: tuple[Estimate, ...] = ("homogeneous", "forcing", "boundary", "trace")

_Member = TypeVar("_Member")
_Row = TypeVar("_Row")


def _run_members(
    evaluate: Callable[[int, _Member], _Row], members: Sequence[_Member], threads: int | None = None
) -> list[_Row]:
    workers = threads or worker_count()
    if workers == 1 or len(members) <= 1:
        return [evaluate(i, member) for i, member in enumerate(members)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate, range(len(members)), members))


def _relative(difference: float, reference: float) -> float:
    if reference == 0.0:
        return 0.0 if difference == 0.0 else INF
    return difference / reference


# Dispersive decay


@dataclass(frozen=True, slots=True, eq=False)
class DispersiveFit:
    """Decay of the transverse propagator applied to a Gaussian.

    Attributes:
        a: Bessel parameter.
        times: Sample times.
        sup_values: sup_z |S_a(t) phi|, times k(z) when a < 0.
        slope: Least-squares slope of log sup_values against log t.
        expected_slope: -(a+1)/2.
        envelope_ratios: sup_values over the dispersive bound at each time.
    """

    a: float
    times: NDArray[np.float64] = field(repr=False)
    sup_values: NDArray[np.float64] = field(repr=False)
    slope: float
    expected_slope: float
    envelope_ratios: NDArray[np.float64] = field(repr=False)

    @property
    def relative_error(self) -> float:
        return abs(self.slope - self.expected_slope) / abs(self.expected_slope)

    @property
    def ratio_spread(self) -> float:
        """max/min of the envelope ratios."""
        return float(np.max(self.envelope_ratios) / np.min(self.envelope_ratios))


def dispersive_fit(
    a: float,
    times: ArrayLike | None = None,
    alpha: float = 4.0,
    nz: int = 128,
    samples: int = 257,
) -> DispersiveFit:
    """Fit the decay rate of sup_z |S_a(t) e^(-alpha z^2)| by kernel quadrature.

    For a >= 0 the bound is |t|^(-(a+1)/2) ||phi||_(L^1_a); for -1 < a < 0 it is
    (|t|^(-(a+1)/2) + |t|^(-1/2)) ||phi / k||_(L^1_a) with k(z) multiplying the solution.

    Args:
        a: Bessel parameter, a > -1.
        times: Positive sample times; 9 log-spaced times in [1, 16] when None.
        alpha: Gaussian rate of the datum; narrow data reach the decay regime sooner.
        nz: Nodes of the Gauss-Jacobi rule the datum is integrated on.
        samples: Evaluation points per time, spread over the region the solution reaches.

    Raises:
        InvalidParameterError: If a <= -1, alpha <= 0 or the times are degenerate.
    """
    params = KernelParams(a)
    t = np.geomspace(1.0, 16.0, 9) if times is None else np.asarray(times, dtype=np.float64)
    if t.ndim != 1 or np.unique(t).size < 2 or np.any(t <= 0.0):
        raise InvalidParameterError(message="Dispersive fit needs at least two distinct positive times")
    if alpha <= 0.0:
        raise InvalidParameterError(message=f"Gaussian rate must be positive, got {alpha}")

    zmax = 6.0 / math.sqrt(alpha)
    grid = build_radial_grid(a, zmax, nz, "gauss_jacobi")

    def datum(z: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.exp(-alpha * z**2)

    anomalous = a < 0.0
    data = datum(grid.nodes)
    if anomalous:
        mass = float(grid.integrate(np.abs(data) / weight_k(a, grid.nodes)))
    else:
        mass = float(grid.integrate(np.abs(data)))

    sups = np.empty_like(t)
    for i, ti in enumerate(t):
        points = np.linspace(0.0, zmax + 8.0 * math.sqrt(alpha) * ti, samples)
        values = np.abs(propagate_z_kernel(a, float(ti), datum, grid, points))
        if anomalous:
            values = values * weight_k(a, np.maximum(points, np.finfo(float).tiny))
        sups[i] = float(np.max(values))
    if not np.all(np.isfinite(sups)):
        raise NumericalFailureError(message="Kernel quadrature produced non-finite values")

    bound = t ** (-params.beta) + (t ** (-0.5) if anomalous else 0.0)
    slope = float(np.polyfit(np.log(t), np.log(sups), 1)[0])
    logger.info("Dispersive fit a=%g: slope %.4f (expected %.4f)", a, slope, -params.beta)
    return DispersiveFit(
        a=a,
        times=t,
        sup_values=sups,
        slope=slope,
        expected_slope=-params.beta,
        envelope_ratios=sups / (bound * mass),
    )


# Strichartz ensembles


@dataclass(frozen=True, slots=True)
class StrichartzSample:
    """Both sides of one estimate for one ensemble member.

    Attributes:
        index: Member index.
        energy: sup_t ||U(t)||_(L^2_a); 0 for the trace estimate.
        mixed: The mixed-norm part of the left side.
        rhs: Right side.
    """

    index: int
    energy: float
    mixed: float
    rhs: float

    @property
    def lhs(self) -> float:
        return self.energy + self.mixed

    @property
    def ratio(self) -> float:
        return _relative(self.lhs, self.rhs)

    @property
    def energy_ratio(self) -> float:
        return _relative(self.energy, self.rhs)


@dataclass(frozen=True, slots=True)
class StrichartzTable:
    """Per-member ratios of one Strichartz estimate.

    Attributes:
        estimate: Which estimate was measured.
        a: Bessel parameter.
        d: Tangential dimension.
        q: Time exponent.
        r: Tangential exponent.
        q_inf: Partner exponent in the anomalous regime, None otherwise.
        samples: One row per member, in ensemble order.
    """

    estimate: Estimate
    a: float
    d: int
    q: float
    r: float
    q_inf: float | None
    samples: tuple[StrichartzSample, ...]

    @property
    def max_ratio(self) -> float:
        return max((s.ratio for s in self.samples), default=0.0)

    def drift(self, larger: "StrichartzTable") -> float:
        """Relative change of the maximum ratio against a table over a larger ensemble."""
        return _relative(abs(larger.max_ratio - self.max_ratio), self.max_ratio)


def _check_strichartz_exponents(a: float, d: int, q: float, r: float, q_inf: float | None) -> float | None:
    triple = is_admissible(a, d, q, r, INF)
    if not triple.admissible or q <= 2.0:
        raise InvalidParameterError(
            message=f"({q}, {r}, inf) is not admissible with q > 2 (residual {triple.residual:.3e})"
        )
    if regime_of(a) == "nonneg_a":
        return None
    if q_inf is None:
        q_inf = solve_q(a, d, r, "nonneg_a")
    partner = is_admissible(a, d, q_inf, r, INF, "nonneg_a")
    if not partner.admissible:
        raise InvalidParameterError(message=f"q_inf = {q_inf} does not satisfy the a >= 0 relation with r = {r}")
    return q_inf


def _solution_spec(a: float, q: float, r: float, q_inf: float | None) -> MixedNormSpec:
    if q_inf is None:
        return MixedNormSpec(m=INF, q=q, r=r)
    return MixedNormSpec(m=INF, q=q, r=r, q_pair=q_inf, combination="sum", weight="k")


def _trace_norm(trace: BoundaryTrace, q: float, r: float, q_inf: float | None) -> float:
    per_time = lebesgue_x(trace.values, trace.xgrid, r)
    weights = trace.tgrid.weights
    if q_inf is None:
        return float(lebesgue_t(per_time, weights, q))
    return sum_norm(per_time, q, q_inf, weights)


def _forcing_rhs(F: SpaceTimeField, q: float, r: float, q_inf: float | None) -> float:
    energy = float(np.sqrt(F.mass_profile()) @ F.tgrid.weights)
    q_dual, r_dual = dual_exponent(q), dual_exponent(r)
    if q_inf is None:
        spec = MixedNormSpec(m=1.0, q=q_dual, r=r_dual)
    else:
        spec = MixedNormSpec(
            m=1.0, q=q_dual, r=r_dual, q_pair=dual_exponent(q_inf), combination="intersection", weight="k_inverse"
        )
    return energy + mixed_norm(F, spec)


def _boundary_rhs(Phi: BoundaryTrace, q: float, r: float, q_inf: float | None) -> float:
    per_time = lebesgue_x(Phi.values, Phi.xgrid, dual_exponent(r))
    weights = Phi.tgrid.weights
    value = float(lebesgue_t(per_time, weights, dual_exponent(q)))
    if q_inf is not None:
        value += float(lebesgue_t(per_time, weights, dual_exponent(q_inf)))
    return value


def strichartz_ratio(
    a: float,
    d: int,
    estimate: Estimate,
    members: Sequence[HalfSpaceField] | Sequence[SpaceTimeField] | Sequence[BoundaryTrace],
    q: float,
    r: float,
    q_inf: float | None = None,
    zgrid: WeightedRadialGrid | None = None,
    tgrid: TimeGrid | None = None,
    substeps: int | None = None,
    threads: int | None = None,
) -> StrichartzTable:
    """Left over right side of a Strichartz estimate for every ensemble member.

    The left side is sup_t ||U||_(L^2_a) + sup_z ||U||_(L^q_t L^r_x); in the anomalous regime
    the second term weighs U by k(z) and uses the L^q + L^q_inf time norm, and the right side
    uses the dual intersection norms with 1/k on the forcing.

    Args:
        a: Bessel parameter.
        d: Tangential dimension.
        estimate: homogeneous and trace take data u0, forcing takes F, boundary takes Phi.
        members: The ensemble.
        q, r: Exponents of an admissible (q, r, inf) with q > 2.
        q_inf: Anomalous partner of q; solved from r when None.
        zgrid: Radial grid for the boundary estimate.
        tgrid: Time grid for the homogeneous and trace estimates.
        substeps: Boundary quadrature sub-cells.
        threads: Worker threads; BSNS_THREADS when None.

    Raises:
        InvalidParameterError: On inadmissible exponents, an unknown estimate or missing grids.
    """
    if estimate not in ESTIMATES:
        raise InvalidParameterError(message=f"Unknown estimate {estimate!r}; expected one of {ESTIMATES}")
    q_inf = _check_strichartz_exponents(a, d, q, r, q_inf)
    if estimate in ("homogeneous", "trace") and tgrid is None:
        raise InvalidParameterError(message=f"The {estimate} estimate needs a time grid")
    if estimate == "boundary" and zgrid is None:
        raise InvalidParameterError(message="The boundary estimate needs a radial grid")
    spec = _solution_spec(a, q, r, q_inf)

    def evaluate(index: int, member: HalfSpaceField | SpaceTimeField | BoundaryTrace) -> StrichartzSample:
        if estimate == "homogeneous":
            U, rhs = op_Tstar(a, d, member, tgrid), member.norm()
        elif estimate == "trace":
            U = op_Tstar(a, d, member, tgrid)
            sample = StrichartzSample(index, 0.0, _trace_norm(boundary_trace(U), q, r, q_inf), member.norm())
            logger.debug("trace member %d: ratio %.4g", index, sample.ratio)
            return sample
        elif estimate == "forcing":
            U, rhs = op_D(a, d, member), _forcing_rhs(member, q, r, q_inf)
        else:
            U, rhs = op_Thetastar(a, d, member, zgrid, substeps), _boundary_rhs(member, q, r, q_inf)
        sample = StrichartzSample(index, float(np.sqrt(np.max(U.mass_profile()))), mixed_norm(U, spec), rhs)
        logger.debug("%s member %d: ratio %.4g", estimate, index, sample.ratio)
        return sample

    samples = tuple(_run_members(evaluate, members, threads))
    table = StrichartzTable(estimate=estimate, a=a, d=d, q=q, r=r, q_inf=q_inf, samples=samples)
    logger.info(
        "Strichartz %s a=%g d=%d (q, r)=(%g, %g): max ratio %.4g over %d members",
        estimate,
        a,
        d,
        q,
        r,
        table.max_ratio,
        len(samples),
    )
    return table


# Scaling


@dataclass(frozen=True, slots=True, eq=False)
class ScalingScan:
    """Ratio of the homogeneous estimate under X -> lambda X.

    Attributes:
        lambdas: Scale factors.
        ratios: ||T* u0_lambda||_(L^m_a L^q_t L^r_x) / ||u0_lambda||_(L^2_a).
        residual: Left minus right side of the admissibility relation.
        slope: Fitted slope of log ratio against log lambda; -residual in the continuum.
    """

    lambdas: NDArray[np.float64] = field(repr=False)
    ratios: NDArray[np.float64] = field(repr=False)
    residual: float
    slope: float

    @property
    def spread(self) -> float:
        """max/min - 1 of the ratios."""
        return float(np.max(self.ratios) / np.min(self.ratios) - 1.0)

    @property
    def is_monotone(self) -> bool:
        order = np.argsort(self.lambdas)
        steps = np.diff(self.ratios[order])
        return bool(np.all(steps > 0.0) or np.all(steps < 0.0))


def _dilation_matrix_x(xgrid: CartesianGrid, lam: float) -> NDArray[np.complex128]:
    """Rows evaluate the trigonometric interpolant of one axis at lam * x_j, zero outside the box."""
    n, h = xgrid.nx, xgrid.spacing
    shift = lam * xgrid.axis_nodes + xgrid.xmax
    freq = np.fft.fftfreq(n, d=h)
    matrix = np.exp(2j * np.pi * np.outer(shift, freq))
    # Nyquist mode split symmetrically
    matrix[:, n // 2] = np.cos(np.pi * shift / h)
    inside = np.abs(lam * xgrid.axis_nodes) < xgrid.xmax
    return (matrix * inside[:, None]) @ np.fft.fft(np.eye(n), axis=0) / n


def dilate_datum(u0: HalfSpaceField, lam: float) -> HalfSpaceField:
    """u0(lam x, lam z) on the grids of u0.

    Evaluates the band-limited interpolants of the samples (Fourier in x, Hankel in z);
    u0 is taken as zero outside its box, so the datum must be negligible near the edges.

    Raises:
        InvalidParameterError: If lam is not positive.
    """
    if not lam > 0.0:
        raise InvalidParameterError(message=f"Scale factor must be positive, got {lam}")
    zgrid = u0.zgrid
    points = lam * zgrid.nodes
    inside = points <= zgrid.zmax
    hankel = hankel_transform(zgrid)
    synthesis = np.zeros((zgrid.size, zgrid.size))
    synthesis[inside] = hankel.synthesis_matrix(points[inside]) @ hankel.forward_matrix
    values = apply_along(synthesis, np.asarray(u0.values, dtype=np.complex128), -1)

    dilation = _dilation_matrix_x(u0.xgrid, lam)
    for axis in range(u0.xgrid.d):
        values = apply_along(dilation, values, axis)
    return HalfSpaceField(u0.xgrid, zgrid, values)


def scaling_invariance(
    u0: HalfSpaceField,
    tgrid: TimeGrid,
    q: float,
    r: float,
    m: float = INF,
    lambdas: ArrayLike = (0.5, 1.0, 2.0),
) -> ScalingScan:
    """Measure the homogeneous estimate on u0(lambda X) for each lambda.

    Every rescaled datum is interpolated onto the grids of u0 and evolved there, over the
    window [0, T/lambda^2] that maps onto [0, T] under the rescaling. The data and windows
    must stay well inside the box for the widest rescaling.

    Raises:
        InvalidParameterError: If a < 0 or a scale factor is not positive.
    """
    a, d = u0.a, u0.xgrid.d
    if a < 0.0:
        raise InvalidParameterError(message=f"Scaling scan needs a >= 0, got {a}")
    scales = np.asarray(lambdas, dtype=np.float64)
    if scales.size < 2 or np.any(scales <= 0.0):
        raise InvalidParameterError(message="Scaling scan needs at least two positive scale factors")

    spec = MixedNormSpec(m=m, q=q, r=r)
    residual = scaling_exponent(a, d, q, r, m) - 0.5 * (d + a + 1.0)
    ratios = np.empty_like(scales)
    for i, lam in enumerate(scales):
        scaled = u0 if lam == 1.0 else dilate_datum(u0, float(lam))
        U = op_Tstar(a, d, scaled, TimeGrid(tgrid.T / lam**2, tgrid.nt))
        ratios[i] = mixed_norm(U, spec) / scaled.norm()
        logger.debug("lambda=%g: ratio %.6g", lam, ratios[i])

    slope = float(np.polyfit(np.log(scales), np.log(ratios), 1)[0])
    return ScalingScan(lambdas=scales, ratios=ratios, residual=residual, slope=slope)


# Kernel self-correlation


def selfcorrelation_closed_form(a: float, lag: float) -> complex:
    """(2^-a / Gamma((a+1)/2)) e^(i (a+1) pi sgn(lag) / 4) |lag|^(-(a+1)/2), lag = tau - sigma."""
    if lag == 0.0:
        raise InvalidParameterError(message="Self-correlation diverges at tau = sigma")
    params = KernelParams(a)
    phase = np.sign(lag) * params.beta * np.pi / 2.0
    return complex(params.boundary_constant * abs(lag) ** (-params.beta) * np.exp(1j * phase))


@dataclass(frozen=True, slots=True)
class SelfCorrelationRow:
    """Quadrature and closed form of the boundary kernel correlation at one lag."""

    lag: float
    numerical: complex
    closed_form: complex

    @property
    def residual(self) -> float:
        return abs(self.numerical - self.closed_form) / abs(self.closed_form)


@dataclass(frozen=True, slots=True)
class SelfCorrelationTable:
    a: float
    rows: tuple[SelfCorrelationRow, ...]

    @property
    def max_residual(self) -> float:
        return max(row.residual for row in self.rows)


def _selfcorrelation_quadrature(a: float, lag: float, nodes: int, phase_span: float) -> complex:
    params = KernelParams(a)
    # Times t - tau and t - sigma, both positive, for tau - sigma = lag.
    s1, s2 = (1.0, 1.0 + lag) if lag > 0.0 else (1.0 - lag, 1.0)
    b = 0.25 * (1.0 / s1 - 1.0 / s2)
    zmax = math.sqrt(phase_span / abs(b))

    x, w = special.roots_jacobi(nodes, 0.0, a)
    z = 0.5 * zmax * (1.0 + x)
    weights = (0.5 * zmax) ** (a + 1.0) * w
    head = complex(weights @ (kernel_sa_boundary(a, z, s1) * np.conj(kernel_sa_boundary(a, z, s2))))

    # Past zmax the product is c^2 (s1 s2)^-beta e^(i b z^2); substitute u = |b| z^2.
    scale = params.boundary_constant**2 * (s1 * s2) ** (-params.beta) * 0.5 * abs(b) ** (-params.beta)
    tail = complex(oscillatory_tail(params.beta, phase_span))
    if b < 0.0:
        tail = tail.conjugate()
    return head + scale * tail


def kernel_selfcorrelation_check(
    a: float, lags: ArrayLike = (0.25, 1.0, 4.0), nodes: int = 256, phase_span: float = 60.0
) -> SelfCorrelationTable:
    """Compare the z^a dz correlation of boundary kernels at two times with its closed form.

    The integral is split at the radius where the relative phase reaches phase_span: a
    Gauss-Jacobi rule covers the head and the exact oscillatory tail the rest.

    Raises:
        InvalidParameterError: If a is outside (-1, 1) or a lag is 0.
        NumericalFailureError: If the quadrature is not finite.
    """
    if not -1.0 < a < 1.0:
        raise InvalidParameterError(message=f"Self-correlation needs -1 < a < 1, got {a}")
    rows = []
    for lag in np.atleast_1d(np.asarray(lags, dtype=np.float64)):
        closed = selfcorrelation_closed_form(a, float(lag))
        numerical = _selfcorrelation_quadrature(a, float(lag), nodes, phase_span)
        if not np.isfinite(numerical):
            raise NumericalFailureError(message=f"Self-correlation quadrature failed at lag {lag}")
        rows.append(SelfCorrelationRow(lag=float(lag), numerical=numerical, closed_form=closed))
    table = SelfCorrelationTable(a=a, rows=tuple(rows))
    logger.info("Self-correlation a=%g: max residual %.3e", a, table.max_residual)
    return table


# Trace continuity


@dataclass(frozen=True, slots=True, eq=False)
class TraceContinuityReport:
    """Trace profiles of Theta*(Phi) for a family of boundary data.

    Attributes:
        q: Time exponent.
        r: Tangential exponent.
        profiles: One profile per datum, in input order.
    """

    q: float
    r: float
    profiles: tuple[TraceProfile, ...]

    @property
    def all_decreasing(self) -> bool:
        return all(profile.is_decreasing for profile in self.profiles)

    @property
    def max_relative_end(self) -> float:
        """Largest distance at the smallest node, relative to the trace norm."""
        ends = [_relative(float(p.distances[0]), p.trace_norm) for p in self.profiles]
        return max(ends, default=0.0)


def trace_continuity_profile(
    a: float,
    boundaries: Sequence[BoundaryTrace],
    zgrid: WeightedRadialGrid,
    q: float,
    r: float,
    layers: int = 5,
    substeps: int | None = None,
    threads: int | None = None,
) -> TraceContinuityReport:
    """z -> ||Theta*(Phi)(., z, .) - Theta*(Phi)(., 0, .)||_(L^q_t L^r_x) on the smallest nodes.

    Raises:
        InvalidParameterError: If a is outside (-1, 1) or (q, r, inf) is not admissible with q > 2.
    """
    if not -1.0 < a < 1.0:
        raise InvalidParameterError(message=f"Trace profiles need -1 < a < 1, got {a}")
    if boundaries:
        d = boundaries[0].xgrid.d
        triple = is_admissible(a, d, q, r, INF)
        if not triple.admissible or q <= 2.0:
            raise InvalidParameterError(message=f"({q}, {r}, inf) is not admissible with q > 2")

    def evaluate(index: int, Phi: BoundaryTrace) -> TraceProfile:
        U = op_Thetastar(a, Phi.xgrid.d, Phi, zgrid, substeps)
        profile = boundary_trace_with_profile(U, q, r, layers)
        if not profile.is_decreasing:
            logger.warning("Trace profile %d is not monotone: %s", index, profile.distances)
        return profile

    profiles = tuple(_run_members(evaluate, boundaries, threads))
    return TraceContinuityReport(q=q, r=r, profiles=profiles)


# Restriction


@dataclass(frozen=True, slots=True)
class RestrictionSample:
    """One forcing of the restriction check.

    Attributes:
        index: Member index.
        extension_norm: ||T F||_(L^2_a), T F = integral of S_a(-t) F(t) dt.
        restriction_norm: L^2 norm of the Fourier-Hankel transform of F on the paraboloid.
        data_norm: ||F||_(L^q'_t L^r'_(x,z)).
    """

    index: int
    extension_norm: float
    restriction_norm: float
    data_norm: float

    @property
    def ratio(self) -> float:
        return _relative(self.extension_norm, self.data_norm)

    @property
    def plancherel_residual(self) -> float:
        return _relative(abs(self.extension_norm - self.restriction_norm), self.extension_norm)


@dataclass(frozen=True, slots=True)
class RestrictionTable:
    """Restriction ratios and Plancherel residuals.

    Attributes:
        a: Bessel parameter.
        d: Tangential dimension.
        q_dual: Time exponent of the data norm.
        r_dual: Space exponent of the data norm.
        samples: One row per forcing.
    """

    a: float
    d: int
    q_dual: float
    r_dual: float
    samples: tuple[RestrictionSample, ...]

    @property
    def max_ratio(self) -> float:
        return max((s.ratio for s in self.samples), default=0.0)

    @property
    def max_plancherel_residual(self) -> float:
        return max((s.plancherel_residual for s in self.samples), default=0.0)


def paraboloid_restriction(F: SpaceTimeField) -> NDArray[np.complex128]:
    """Space-time Fourier-Hankel transform of F at tau = -(4 pi^2 |xi|^2 + zeta^2) / (2 pi).

    Returned on the (xi, zeta) grid, xi in centered order; the time integral is trapezoidal.
    """
    hankel = hankel_transform(F.zgrid)
    spectral = hankel.forward(fourier_x(F.values, F.xgrid), axis=-2)
    xi = np.meshgrid(*([F.xgrid.axis_frequencies] * F.xgrid.d), indexing="ij")
    omega = 4.0 * np.pi**2 * sum(k**2 for k in xi)[..., None] + hankel.frequencies**2
    phases = np.exp(1j * omega[..., None] * F.tgrid.nodes)
    return np.einsum("...t,t->...", phases * spectral, F.tgrid.weights)


def _restriction_norm(F: SpaceTimeField) -> float:
    hankel = hankel_transform(F.zgrid)
    values = paraboloid_restriction(F)
    xi_cell = (1.0 / (2.0 * F.xgrid.xmax)) ** F.xgrid.d
    density = xi_cell * np.sum(np.abs(values) ** 2, axis=tuple(range(F.xgrid.d)))
    return float(np.sqrt(hankel.spectral_weights @ density))


def _spacetime_norm(F: SpaceTimeField, q: float, r: float) -> float:
    """L^q_t L^r over (x, z) jointly."""
    per_layer = lebesgue_x(F.values, F.xgrid, r)
    per_time = weighted_lp(np.moveaxis(per_layer, -1, 0), F.zgrid.weights, r)
    return float(lebesgue_t(per_time, F.tgrid.weights, q))


def restriction_check(
    forcings: Sequence[SpaceTimeField],
    q: float | None = None,
    r: float | None = None,
    threads: int | None = None,
) -> RestrictionTable:
    """Restriction ratio ||T F|| / ||F||_(L^q'_t L^r'_a) and the Plancherel identity per forcing.

    Defaults to the diagonal exponents q = r = m = 2(d+a+3)/(d+a+1), whose dual is
    2(d+a+3)/(d+a+5).

    Raises:
        InvalidParameterError: If a < 0, no forcings are given, or (q, r, r) is not admissible
            with q, r > 2.
    """
    if not forcings:
        raise InvalidParameterError(message="Restriction check needs at least one forcing")
    a, d = forcings[0].a, forcings[0].xgrid.d
    if a < 0.0:
        raise InvalidParameterError(message=f"Restriction check needs a >= 0, got {a}")
    if q is None and r is None:
        q = r = dual_exponent(restriction_dual_exponent(a, d))
    elif q is None or r is None:
        raise InvalidParameterError(message="Give both q and r, or neither for the diagonal exponents")
    triple = is_admissible(a, d, q, r, r)
    if abs(triple.residual) > 1e-12 or q <= 2.0 or r <= 2.0:
        raise InvalidParameterError(message=f"({q}, {r}, {r}) is not admissible with q, r > 2")
    q_dual, r_dual = dual_exponent(q), dual_exponent(r)

    def evaluate(index: int, F: SpaceTimeField) -> RestrictionSample:
        sample = RestrictionSample(
            index=index,
            extension_norm=adjoint_T(a, d, F).norm(),
            restriction_norm=_restriction_norm(F),
            data_norm=_spacetime_norm(F, q_dual, r_dual),
        )
        logger.debug(
            "restriction member %d: ratio %.4g, residual %.2e", index, sample.ratio, sample.plancherel_residual
        )
        return sample

    samples = tuple(_run_members(evaluate, forcings, threads))
    table = RestrictionTable(a=a, d=d, q_dual=q_dual, r_dual=r_dual, samples=samples)
    logger.info(
        "Restriction a=%g d=%d: max ratio %.4g, max Plancherel residual %.2e",
        a,
        d,
        table.max_ratio,
        table.max_plancherel_residual,
    )
    return table
