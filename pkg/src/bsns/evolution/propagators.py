"""Evolution operators of the half-space problem.

The full propagator factors as S(t) (tangential, Fourier multiplier e^(-4 pi^2 i t |xi|^2))
times S_a(t) (transverse, Hankel multiplier e^(-i t zeta^2)). The spectral path is used for
every composition; propagate_z_kernel integrates the closed-form kernel directly and serves
as an independent oracle and for large-time decay measurements.
"""

import logging
from collections.abc import Callable
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from bsns.exceptions import GridMismatchError, InvalidParameterError
from bsns.fields import HalfSpaceField, SpaceTimeField
from bsns.numerics.grids import CartesianGrid, TimeGrid, WeightedRadialGrid
from bsns.numerics.kernels import kernel_sa
from bsns.numerics.transforms import apply_along, hankel_transform

logger = logging.getLogger(__name__)

# Node count ceiling for the kernel quadrature oracle.
MAX_KERNEL_NODES = 4096


class HalfSpacePropagator:
    """Spectral representation of the half-space propagator on fixed grids.

    The spectral representation is the unnormalized FFT over the x axes followed by the
    discrete Hankel transform along the z axis (axis d). Trailing axes (time) pass through.

    Example:
        propagator = HalfSpacePropagator(xgrid, zgrid)
        spectrum = propagator.to_spectral(values)
        evolved = propagator.from_spectral(propagator.symbol(t) * spectrum)
    """

    def __init__(self, xgrid: CartesianGrid, zgrid: WeightedRadialGrid) -> None:
        self.xgrid = xgrid
        self.zgrid = zgrid
        self.hankel = hankel_transform(zgrid)
        self._x_axes = tuple(range(xgrid.d))
        self._z_axis = xgrid.d
        xi2 = xgrid.frequency_squared()
        # Omega(xi, zeta) = 4 pi^2 |xi|^2 + zeta^2, shape (Nx,)*d + (Nz,)
        self.frequency: NDArray[np.float64] = (4.0 * np.pi**2) * xi2[..., None] + self.hankel.frequencies**2
        self._trace_row = self.hankel.synthesis_matrix([0.0])

    def symbol(self, t: float) -> NDArray[np.complex128]:
        """Spectral multiplier of the propagator at time t."""
        return np.exp(-1j * t * self.frequency)

    def to_spectral(self, values: NDArray) -> NDArray[np.complex128]:
        spec = np.fft.fftn(values, axes=self._x_axes)
        return self.hankel.forward(spec, axis=self._z_axis)

    def from_spectral(self, spectrum: NDArray) -> NDArray[np.complex128]:
        values = self.hankel.inverse(spectrum, axis=self._z_axis)
        return np.fft.ifftn(values, axes=self._x_axes)

    def trace_from_spectral(self, spectrum: NDArray) -> NDArray[np.complex128]:
        """The z = 0 layer of the band-limited field with this spectrum."""
        row = apply_along(self._trace_row, spectrum, self._z_axis)
        return np.fft.ifftn(np.take(row, 0, axis=self._z_axis), axes=self._x_axes)

    def propagate(self, t: float, values: NDArray) -> NDArray[np.complex128]:
        if t == 0.0:
            return np.array(values, dtype=np.complex128)
        return self.from_spectral(self.symbol(t) * self.to_spectral(values))

    def evolve(self, values: NDArray, tgrid: TimeGrid) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
        """Propagate a half-space datum to every time node; returns (values, trace)."""
        spectrum = self.to_spectral(values)
        stack = np.exp(-1j * self.frequency[..., None] * tgrid.nodes) * spectrum[..., None]
        out = self.from_spectral(stack)
        out[..., 0] = values
        return out, self.trace_from_spectral(stack)

    def adjoint(self, values: NDArray, tgrid: TimeGrid) -> NDArray[np.complex128]:
        """Trapezoid integral of S(-t_j) applied to the time slices of values."""
        spectrum = self.to_spectral(values)
        back = np.exp(1j * self.frequency[..., None] * tgrid.nodes) * tgrid.weights
        return self.from_spectral(np.sum(back * spectrum, axis=-1))


@lru_cache(maxsize=16)
def half_space_propagator(xgrid: CartesianGrid, zgrid: WeightedRadialGrid) -> HalfSpacePropagator:
    return HalfSpacePropagator(xgrid, zgrid)


def _check_radial_values(a: float, grid: WeightedRadialGrid, phi: NDArray) -> None:
    if a != grid.a:
        raise GridMismatchError(message="Propagator order does not match the grid", expected=grid.a, actual=a)
    if phi.shape[-1] != grid.size:
        raise GridMismatchError(message="Values do not match the radial grid", expected=grid.size, actual=phi.shape)


def propagate_z(a: float, t: float, phi: ArrayLike, grid: WeightedRadialGrid) -> NDArray[np.complex128]:
    """Transverse propagator S_a(t) along the last axis, via the Hankel multiplier e^(-i t zeta^2).

    Returns a copy of phi exactly when t = 0.
    """
    arr = np.asarray(phi, dtype=np.complex128)
    _check_radial_values(a, grid, arr)
    if t == 0.0:
        return arr.copy()
    hankel = hankel_transform(grid)
    return hankel.inverse(np.exp(-1j * t * hankel.frequencies**2) * hankel.forward(arr))


def propagate_z_kernel(
    a: float,
    t: float,
    phi: ArrayLike | Callable[[NDArray[np.float64]], NDArray],
    grid: WeightedRadialGrid,
    points: ArrayLike | None = None,
) -> NDArray[np.complex128]:
    """Transverse propagator by direct quadrature against the closed-form kernel.

    Samples on the grid are spectrally interpolated onto a Gauss-Jacobi rule fine enough
    to resolve the kernel phase; a callable phi is evaluated there directly.

    Args:
        a: Bessel parameter.
        t: Time, nonzero.
        phi: Samples on grid, or a function of z supported in (0, Zmax).
        grid: The radial grid; its Zmax bounds the integral.
        points: Where to evaluate; defaults to the grid nodes. z = 0 is allowed.

    Raises:
        InvalidParameterError: If t = 0.
    """
    if t == 0.0:
        raise InvalidParameterError(message="propagate_z_kernel is singular at t = 0; use propagate_z")

    n = int(min(MAX_KERNEL_NODES, max(4 * grid.size, grid.zmax**2 / abs(t) + 64)))
    x, w = special.roots_jacobi(n, 0.0, a)
    fine = 0.5 * grid.zmax * (1.0 + x)
    fine_weights = (0.5 * grid.zmax) ** (a + 1.0) * w

    if callable(phi):
        samples = np.asarray(phi(fine), dtype=np.complex128)
    else:
        arr = np.asarray(phi, dtype=np.complex128)
        _check_radial_values(a, grid, arr)
        hankel = hankel_transform(grid)
        samples = hankel.synthesize(hankel.forward(arr), fine)

    targets = grid.nodes if points is None else np.asarray(points, dtype=np.float64)
    kernel = kernel_sa(a, targets[:, None], fine[None, :], t)
    logger.debug("Kernel quadrature: t=%g, %d nodes, %d targets", t, n, len(targets))
    return kernel @ (fine_weights * samples)


def propagate_x(d: int, t: float, f: ArrayLike, xgrid: CartesianGrid) -> NDArray[np.complex128]:
    """Free propagator e^(it Laplacian) over the leading d axes, multiplier e^(-4 pi^2 i t |xi|^2)."""
    arr = np.asarray(f, dtype=np.complex128)
    if d != xgrid.d or arr.shape[:d] != xgrid.shape:
        raise GridMismatchError(message="Values do not match the x-grid", expected=xgrid.shape, actual=arr.shape)
    if t == 0.0:
        return arr.copy()
    axes = tuple(range(d))
    multiplier = np.exp(-4j * np.pi**2 * t * xgrid.frequency_squared())
    multiplier = multiplier.reshape(multiplier.shape + (1,) * (arr.ndim - d))
    return np.fft.ifftn(multiplier * np.fft.fftn(arr, axes=axes), axes=axes)


def check_field(a: float, d: int, field: HalfSpaceField | SpaceTimeField) -> None:
    if field.a != a or field.xgrid.d != d:
        raise GridMismatchError(message="Field does not match (a, d)", expected=(a, d), actual=(field.a, field.xgrid.d))


def propagate(a: float, d: int, t: float, u0: HalfSpaceField) -> HalfSpaceField:
    """Full propagator S_a(t) applied to a half-space field."""
    check_field(a, d, u0)
    propagator = half_space_propagator(u0.xgrid, u0.zgrid)
    return u0.with_values(propagator.propagate(t, u0.values))


def adjoint_T(a: float, d: int, F: SpaceTimeField) -> HalfSpaceField:
    """Integral over the time window of S_a(-t) F(t), trapezoid in t."""
    check_field(a, d, F)
    propagator = half_space_propagator(F.xgrid, F.zgrid)
    return HalfSpaceField(F.xgrid, F.zgrid, propagator.adjoint(F.values, F.tgrid))


def gaussian_evolution_z(a: float, alpha: complex, t: float, z: ArrayLike) -> NDArray[np.complex128]:
    """S_a(t) e^(-alpha z^2) = (1+4i alpha t)^(-(a+1)/2) e^(-alpha z^2/(1+4i alpha t))."""
    z = np.asarray(z, dtype=np.float64)
    denom = 1.0 + 4j * alpha * t
    return denom ** (-0.5 * (a + 1.0)) * np.exp(-alpha * z**2 / denom)


def gaussian_evolution_x(d: int, alpha: complex, t: float, r2: ArrayLike) -> NDArray[np.complex128]:
    """S(t) e^(-alpha |x|^2) as a function of r2 = |x|^2."""
    r2 = np.asarray(r2, dtype=np.float64)
    denom = 1.0 + 4j * alpha * t
    return denom ** (-0.5 * d) * np.exp(-alpha * r2 / denom)
