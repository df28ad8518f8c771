"""Duhamel operators of the half-space problem and the linear solver.

The mild solution of the linear problem with Neumann datum Phi is

    U = T*(u0) + D(F) + Theta*(Phi)

where T* propagates the datum, D integrates the bulk forcing against the propagator and
Theta* integrates the boundary datum against the boundary kernel S_a(z, 0, t - tau).

Theta* is weakly singular at tau = t and oscillates like e^(iz^2/4(t-tau)) there. It is
computed by product integration: the factor s^(-(a+1)/2) e^(iz^2/4s) is integrated exactly
against hat functions in s = t - tau (moments come from oscillatory_tail), and the remaining
smooth factor e^(-i omega s) Phi^(xi, t - s) is interpolated linearly on sub-cells.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from bsns.analysis.norms import lebesgue_x, trace_norm
from bsns.exceptions import (
    GridMismatchError,
    InsufficientResolutionError,
    InvalidParameterError,
    NumericalFailureError,
)
from bsns.evolution.propagators import check_field, half_space_propagator
from bsns.fields import BoundaryTrace, HalfSpaceField, SpaceTimeField, check_same_grids
from bsns.numerics.grids import CartesianGrid, TimeGrid, WeightedRadialGrid
from bsns.numerics.kernels import KernelParams
from bsns.numerics.specfun import oscillatory_tail

logger = logging.getLogger(__name__)

# Largest phase advance of e^(-i omega s) allowed across one sub-cell.
MAX_SUBCELL_PHASE = 0.5
MAX_SUBSTEPS = 32

# Neumann diagnostics need this many layers below NEUMANN_DEPTH.
NEUMANN_DEPTH = 0.1
NEUMANN_MIN_LAYERS = 3


def auto_substeps(step: float, max_frequency: float) -> int:
    """Sub-cells per time cell so the tangential phase advances at most MAX_SUBCELL_PHASE per sub-cell."""
    needed = int(np.ceil(step * max_frequency / MAX_SUBCELL_PHASE))
    if needed > MAX_SUBSTEPS:
        logger.warning(
            "Time step %g under-resolves tangential frequency %g; capping at %d sub-cells",
            step,
            max_frequency,
            MAX_SUBSTEPS,
        )
    return int(np.clip(needed, 1, MAX_SUBSTEPS))


def _cell_moments(beta: float, depths: NDArray[np.float64], edges: NDArray[np.float64]) -> NDArray[np.complex128]:
    """Moments of s^(k - beta) e^(i kappa/s) over each cell, k = 0, 1, with kappa = z^2/4.

    Returns shape (2, cells, layers). With u = kappa/s the cell integral becomes an
    incomplete oscillatory integral of u^(beta-k-2) e^(iu), so it is a difference of tails.
    """
    kappa = 0.25 * depths**2
    lo, hi = edges[:-1], edges[1:]
    moments = np.empty((2, len(hi), len(depths)), dtype=np.complex128)
    flat = kappa == 0.0
    positive = ~flat

    for k in (0, 1):
        e = k - beta + 1.0
        moments[k][:, flat] = ((hi ** e - lo ** e) / e)[:, None]
        if not np.any(positive):
            continue
        kp = kappa[positive]
        tails = oscillatory_tail(beta - k - 1.0, kp[None, :] / hi[:, None])
        # edges start at s = 0, which maps to u = infinity where the tail vanishes
        tails_lo = np.vstack([np.zeros((1, len(kp))), tails[:-1]])
        moments[k][:, positive] = kp ** e * (tails - tails_lo)
    return moments


class BoundaryDuhamel:
    """Weight tables of the discrete boundary operator Theta* on fixed grids.

    Layer 0 of every table is the trace z = 0; layers 1..Nz are the radial nodes.
    The discrete adjoint Theta is built from the conjugated tables, so the pairing
    identity <Theta* Phi, V> = <Phi, Theta V> holds to round-off.

    Example:
        duhamel = BoundaryDuhamel(xgrid, zgrid, tgrid)
        values, trace = duhamel.apply(phi_values)
    """

    def __init__(
        self,
        xgrid: CartesianGrid,
        zgrid: WeightedRadialGrid,
        tgrid: TimeGrid,
        substeps: int | None = None,
    ) -> None:
        if not -1.0 < zgrid.a < 1.0:
            raise InvalidParameterError(message=f"Boundary operator needs -1 < a < 1, got {zgrid.a}")
        if substeps is not None and substeps < 1:
            raise InvalidParameterError(message=f"substeps must be positive, got {substeps}")

        self.xgrid = xgrid
        self.zgrid = zgrid
        self.tgrid = tgrid
        params = KernelParams(zgrid.a)
        self.depths = np.concatenate(([0.0], zgrid.nodes))
        self.prefactor = -1j * params.boundary_constant * np.exp(-0.5j * np.pi * params.beta)

        omega = (4.0 * np.pi**2) * xgrid.frequency_squared().reshape(-1)
        nt, step = tgrid.nt, tgrid.step
        self.substeps = substeps if substeps is not None else auto_substeps(step, float(omega.max()))
        m = self.substeps
        sub = step / m
        edges = sub * np.arange(nt * m + 1)

        moments = _cell_moments(params.beta, self.depths, edges)
        # hat-function weights of the lower and upper node of each sub-cell
        lower = (edges[1:, None] * moments[0] - moments[1]) / sub
        upper = (moments[1] - edges[:-1, None] * moments[0]) / sub
        nodal = np.zeros((nt * m + 1, len(self.depths)), dtype=np.complex128)
        nodal[:-1] += lower
        nodal[1:] += upper

        phases = np.exp(-1j * np.outer(edges, omega))
        fraction = np.arange(m) / m
        w = nodal[:-1].reshape(nt, m, -1)
        p = phases[:-1].reshape(nt, m, -1)
        head = np.einsum("qrz,qrx,r->qxz", w, p, 1.0 - fraction)
        tail = np.einsum("qrz,qrx,r->qxz", w, p, fraction)

        # lag tables: C[m] multiplies Phi at t_(j-m) for j > m; E[j] multiplies Phi at t_0
        lag = head.copy()
        lag[1:] += tail[:-1]
        first = np.zeros((nt + 1,) + head.shape[1:], dtype=np.complex128)
        first[1:] = tail + upper[m - 1 :: m][:, None, :] * phases[m::m][:, :, None]

        self._lag = self.prefactor * lag
        self._first = self.prefactor * first
        if not (np.all(np.isfinite(self._lag)) and np.all(np.isfinite(self._first))):
            raise NumericalFailureError(message="Boundary weight tables contain non-finite entries")

        logger.info(
            "Built boundary Duhamel tables: a=%g, Nt=%d, substeps=%d, layers=%d, modes=%d",
            zgrid.a,
            nt,
            m,
            len(self.depths),
            len(omega),
        )

    @property
    def _x_axes(self) -> tuple[int, ...]:
        return tuple(range(self.xgrid.d))

    def apply(self, phi: NDArray) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
        """Theta* of boundary samples of shape (Nx,)*d + (Nt+1,); returns (values, trace)."""
        nt = self.tgrid.nt
        modes = int(np.prod(self.xgrid.shape))
        spectrum = np.fft.fftn(phi, axes=self._x_axes).reshape(modes, nt + 1)

        out = np.zeros((modes, len(self.depths), nt + 1), dtype=np.complex128)
        for lag in range(nt):
            out[:, :, lag + 1 :] += self._lag[lag][:, :, None] * spectrum[:, None, 1 : nt - lag + 1]
        out[:, :, 1:] += np.moveaxis(self._first[1:], 0, -1) * spectrum[:, None, :1]

        values = np.fft.ifftn(out.reshape(self.xgrid.shape + out.shape[1:]), axes=self._x_axes)
        return values[..., 1:, :], values[..., 0, :]

    def adjoint(self, values: NDArray) -> NDArray[np.complex128]:
        """Discrete adjoint Theta of bulk samples of shape (Nx,)*d + (Nz, Nt+1)."""
        nt = self.tgrid.nt
        modes = int(np.prod(self.xgrid.shape))
        spectrum = np.fft.fftn(values, axes=self._x_axes).reshape(modes, self.zgrid.size, nt + 1)
        tw = self.tgrid.weights
        weighted = spectrum * self.zgrid.weights[None, :, None] * tw[None, None, :]

        out = np.zeros((modes, nt + 1), dtype=np.complex128)
        for lag in range(nt):
            kernel = np.conj(self._lag[lag][:, 1:])
            out[:, 1 : nt - lag + 1] += np.einsum("xz,xzj->xj", kernel, weighted[:, :, lag + 1 :])
        out[:, 0] = np.einsum("jxz,xzj->x", np.conj(self._first[1:, :, 1:]), weighted[:, :, 1:])
        out /= tw

        return np.fft.ifftn(out.reshape(self.xgrid.shape + (nt + 1,)), axes=self._x_axes)


@lru_cache(maxsize=8)
def boundary_duhamel(
    xgrid: CartesianGrid, zgrid: WeightedRadialGrid, tgrid: TimeGrid, substeps: int | None = None
) -> BoundaryDuhamel:
    return BoundaryDuhamel(xgrid, zgrid, tgrid, substeps)


def op_Tstar(a: float, d: int, u0: HalfSpaceField, tgrid: TimeGrid) -> SpaceTimeField:
    """Free evolution t -> S_a(t) u0 on every time node, with its z = 0 trace."""
    check_field(a, d, u0)
    propagator = half_space_propagator(u0.xgrid, u0.zgrid)
    values, trace = propagator.evolve(u0.values, tgrid)
    return SpaceTimeField(u0.xgrid, u0.zgrid, tgrid, values, trace)


def op_D(a: float, d: int, F: SpaceTimeField) -> SpaceTimeField:
    """Bulk Duhamel integral of S_a(t - tau) F(tau) over [0, t], trapezoid in tau.

    Runs as a recursion in the spectral representation: B_j = E(h) B_(j-1) + h F_j carries
    the full-weight sum, and the trapezoid end corrections are subtracted per node.
    """
    check_field(a, d, F)
    propagator = half_space_propagator(F.xgrid, F.zgrid)
    tgrid = F.tgrid
    h = tgrid.step

    spectrum = propagator.to_spectral(F.values)
    one_step = propagator.symbol(h)
    running = h * spectrum[..., 0]
    out = np.zeros_like(spectrum)
    for j in range(1, tgrid.size):
        running = one_step * running + h * spectrum[..., j]
        out[..., j] = running - 0.5 * h * (spectrum[..., j] + propagator.symbol(tgrid.nodes[j]) * spectrum[..., 0])

    return SpaceTimeField(F.xgrid, F.zgrid, tgrid, propagator.from_spectral(out), propagator.trace_from_spectral(out))


def op_Thetastar(
    a: float, d: int, Phi: BoundaryTrace, zgrid: WeightedRadialGrid, substeps: int | None = None
) -> SpaceTimeField:
    """Boundary Duhamel operator: -i times the integral of S_a(z, 0, t - tau) S(t - tau) Phi(tau).

    Its weighted flux z^a dU/dz tends to Phi as z -> 0+. The z = 0 layer uses the boundary
    kernel directly and is returned as the trace.

    Args:
        a: Bessel parameter, -1 < a < 1.
        d: Tangential dimension.
        Phi: Neumann datum on (x, t).
        zgrid: Radial grid of the result.
        substeps: Sub-cells per time cell; chosen from the tangential band when None.

    Raises:
        InvalidParameterError: If a is outside (-1, 1).
        GridMismatchError: If a or d do not match the grids.
        NumericalFailureError: If the weight tables are not finite.
    """
    if a != zgrid.a or d != Phi.xgrid.d:
        raise GridMismatchError(
            message="Boundary datum does not match (a, d)", expected=(a, d), actual=(zgrid.a, Phi.xgrid.d)
        )
    if not -1.0 < a < 1.0:
        raise InvalidParameterError(message=f"Boundary operator needs -1 < a < 1, got {a}")
    if Phi.is_zero():
        return SpaceTimeField.zeros(Phi.xgrid, zgrid, Phi.tgrid)
    duhamel = boundary_duhamel(Phi.xgrid, zgrid, Phi.tgrid, substeps)
    values, trace = duhamel.apply(Phi.values)
    return SpaceTimeField(Phi.xgrid, zgrid, Phi.tgrid, values, trace)


def op_Theta(a: float, d: int, V: SpaceTimeField, substeps: int | None = None) -> BoundaryTrace:
    """Adjoint of op_Thetastar: boundary restriction of future propagation of V."""
    check_field(a, d, V)
    duhamel = boundary_duhamel(V.xgrid, V.zgrid, V.tgrid, substeps)
    return BoundaryTrace(V.xgrid, V.tgrid, duhamel.adjoint(V.values))


def solve_linear(
    a: float,
    d: int,
    u0: HalfSpaceField,
    F: SpaceTimeField | None = None,
    Phi: BoundaryTrace | None = None,
    tgrid: TimeGrid | None = None,
    substeps: int | None = None,
) -> SpaceTimeField:
    """Mild solution T*(u0) + D(F) + Theta*(Phi) of the linear Neumann problem.

    The time grid is taken from F or Phi when not given.

    Raises:
        InvalidParameterError: If no time grid is available, or Phi != 0 with a outside (-1, 1).
        GridMismatchError: If the data do not share grids.
    """
    tgrid = tgrid or (F.tgrid if F is not None else None) or (Phi.tgrid if Phi is not None else None)
    if tgrid is None:
        raise InvalidParameterError(message="solve_linear needs a time grid when F and Phi are absent")
    for other in (F, Phi):
        if other is not None:
            check_same_grids(u0, other)
            if other.tgrid.key != tgrid.key:
                raise GridMismatchError(
                    message="Data live on different time grids", expected=tgrid.key, actual=other.tgrid.key
                )

    solution = op_Tstar(a, d, u0, tgrid)
    if F is not None:
        solution = solution + op_D(a, d, F)
    if Phi is not None and not Phi.is_zero():
        solution = solution + op_Thetastar(a, d, Phi, u0.zgrid, substeps)
    return solution


def boundary_trace(U: SpaceTimeField) -> BoundaryTrace:
    """The z = 0 slice of U.

    Fields carrying no trace layer get one by evaluating their band-limited Hankel
    interpolant at z = 0.
    """
    if U.trace is not None:
        return U.boundary()
    propagator = half_space_propagator(U.xgrid, U.zgrid)
    trace = propagator.trace_from_spectral(propagator.to_spectral(U.values))
    return BoundaryTrace(U.xgrid, U.tgrid, trace)


@dataclass(frozen=True, slots=True, eq=False)
class TraceProfile:
    """A trace together with its continuity profile.

    Attributes:
        trace: The z = 0 slice.
        depths: The smallest radial nodes.
        distances: ||U(., z, .) - U(., 0, .)|| in L^q_t L^r_x at each depth.
        trace_norm: ||U(., 0, .)|| in the same norm.
    """

    trace: BoundaryTrace
    depths: NDArray[np.float64] = field(repr=False)
    distances: NDArray[np.float64] = field(repr=False)
    trace_norm: float

    @property
    def is_decreasing(self) -> bool:
        """Whether the distance decreases as z -> 0."""
        return bool(np.all(np.diff(self.distances) >= 0.0))


def boundary_trace_with_profile(U: SpaceTimeField, q: float = 2.0, r: float = 2.0, layers: int = 5) -> TraceProfile:
    """The trace of U and z -> ||U(., z, .) - U(., 0, .)||_(L^q_t L^r_x) on the smallest layers."""
    trace = boundary_trace(U)
    layers = min(layers, U.zgrid.size)
    distances = np.array(
        [trace_norm(U.values[..., k, :] - trace.values, U.xgrid, U.tgrid, q, r) for k in range(layers)]
    )
    return TraceProfile(
        trace=trace,
        depths=U.zgrid.nodes[:layers].copy(),
        distances=distances,
        trace_norm=trace_norm(trace.values, U.xgrid, U.tgrid, q, r),
    )


def neumann_coordinate(a: float, z: NDArray[np.float64]) -> NDArray[np.float64]:
    """s(z) with ds/dz = z^(-a), so that z^a dU/dz = dU/ds."""
    if a == 1.0:
        return np.log(z)
    return z ** (1.0 - a) / (1.0 - a)


@dataclass(frozen=True, slots=True, eq=False)
class NeumannResidual:
    """Weighted-flux residual near the boundary.

    Attributes:
        times: Time nodes.
        depths: Midpoints of the layer pairs the flux was estimated on, smallest first.
        flux: Estimated z^a dU/dz per pair, shape (pairs,) + (Nx,)*d + (Nt+1,).
        residual: ||flux - Phi||_(L^r'_x) per pair and time, shape (pairs, Nt+1).
    """

    times: NDArray[np.float64] = field(repr=False)
    depths: NDArray[np.float64] = field(repr=False)
    flux: NDArray[np.complex128] = field(repr=False)
    residual: NDArray[np.float64] = field(repr=False)

    @property
    def profile(self) -> NDArray[np.float64]:
        """Residual over time at the layer pair closest to the boundary."""
        return self.residual[0]


def neumann_residual(
    a: float, U: SpaceTimeField, Phi: BoundaryTrace | None = None, r_dual: float = 2.0, pairs: int = 2
) -> NeumannResidual:
    """Compare the weighted flux z^a dU/dz at the smallest layers with the datum Phi.

    The flux is a divided difference in the coordinate s(z) of neumann_coordinate, which is
    exact on the leading boundary profile c + Phi s(z).

    Raises:
        InsufficientResolutionError: If fewer than three layers lie below z = 0.1.
        GridMismatchError: If a or the grids do not match.
    """
    if a != U.a:
        raise GridMismatchError(message="Field order does not match", expected=a, actual=U.a)
    found = U.zgrid.layers_below(NEUMANN_DEPTH)
    if found < NEUMANN_MIN_LAYERS:
        raise InsufficientResolutionError(
            message=f"Neumann residual needs layers below z = {NEUMANN_DEPTH}",
            layers=found,
            required=NEUMANN_MIN_LAYERS,
        )
    if Phi is not None:
        check_same_grids(U, Phi)
    datum = Phi.values if Phi is not None else np.zeros(U.xgrid.shape + (U.tgrid.size,), dtype=np.complex128)

    pairs = min(pairs, found - 1)
    z = U.zgrid.nodes[: pairs + 1]
    s = neumann_coordinate(a, z)
    flux = np.stack([(U.values[..., k + 1, :] - U.values[..., k, :]) / (s[k + 1] - s[k]) for k in range(pairs)])
    residual = np.stack([lebesgue_x(flux[k] - datum, U.xgrid, r_dual) for k in range(pairs)])
    return NeumannResidual(
        times=U.tgrid.nodes,
        depths=0.5 * (z[:-1] + z[1:]),
        flux=flux,
        residual=residual,
    )
