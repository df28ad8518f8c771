"""Discrete Fourier and modified Hankel transforms.

The modified Hankel transform of order nu = (a-1)/2,

    H phi(zeta) = integral of phi(z) j_nu(z zeta) z^a dz,   j_nu(x) = x^(-nu) J_nu(x),

is self-inverse and an isometry of L^2(z^a dz). Discretely it is a dense matrix built
from the weighted kernel sqrt(w_l) j_nu(zeta_l z_k) sqrt(w_k), replaced at construction
by its orthogonal polar factor so that the discrete transform is exactly unitary.

Fourier transforms use the e^(-2 pi i <xi, x>) convention with the grid spacing
included, so Plancherel holds with dx and d(xi).
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import TYPE_CHECKING, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from bsns.exceptions import GridMismatchError, InvalidParameterError
from bsns.numerics.grids import CartesianGrid, TimeGrid, WeightedRadialGrid
from bsns.numerics.specfun import bessel_j, bessel_j_scaled

if TYPE_CHECKING:
    from bsns.fields import SpaceTimeField

logger = logging.getLogger(__name__)

Direction = Literal["forward", "inverse"]

# Orthogonality defects above this are logged; the grid under-resolves the data band.
_DEFECT_WARNING = 1e-2


def apply_along(matrix: NDArray, values: NDArray, axis: int) -> NDArray:
    """Multiply matrix into values along one axis."""
    moved = np.tensordot(matrix, values, axes=([1], [axis]))
    return np.moveaxis(moved, 0, axis)


class HankelTransform:
    """Discrete modified Hankel transform on a weighted radial grid.

    Example:
        grid = build_radial_grid(0.0, 12.0, 64)
        hankel = HankelTransform(grid)
        spectrum = hankel.forward(values)
        restored = hankel.inverse(spectrum)
    """

    def __init__(self, grid: WeightedRadialGrid) -> None:
        self._grid = grid
        nu = grid.nu
        z, w = grid.nodes, grid.weights

        if grid.scheme == "bessel_collocation":
            s = grid.zeros[-1]
            v = s / grid.zmax
            zeta = grid.zeros[:-1] / grid.zmax
            w_spec = 2.0 * v**2 * zeta ** (grid.a - 1.0) / (s**2 * bessel_j(nu + 1.0, grid.zeros[:-1]) ** 2)
        else:
            zeta, w_spec = z.copy(), w.copy()

        kernel = np.sqrt(w_spec)[:, None] * bessel_j_scaled(nu, np.outer(zeta, z)) * np.sqrt(w)[None, :]
        defect = float(np.max(np.abs(kernel.T @ kernel - np.eye(len(z)))))
        orthogonal, _ = linalg.polar(kernel)

        self.frequencies: NDArray[np.float64] = zeta
        self.spectral_weights: NDArray[np.float64] = w_spec
        self.orthogonality_defect = defect
        self._forward = np.sqrt(1.0 / w_spec)[:, None] * orthogonal * np.sqrt(w)[None, :]
        self._inverse = np.sqrt(1.0 / w)[:, None] * orthogonal.T * np.sqrt(w_spec)[None, :]

        if defect > _DEFECT_WARNING:
            logger.warning("Hankel kernel far from orthogonal (defect %.2e); data may be under-resolved", defect)
        logger.info("Built Hankel transform: scheme=%s, a=%g, Nz=%d, defect=%.2e", grid.scheme, grid.a, len(z), defect)

    @property
    def grid(self) -> WeightedRadialGrid:
        return self._grid

    @property
    def forward_matrix(self) -> NDArray[np.float64]:
        return self._forward

    @property
    def inverse_matrix(self) -> NDArray[np.float64]:
        return self._inverse

    def forward(self, values: ArrayLike, axis: int = -1) -> NDArray:
        """Transform samples at the nodes into samples at the frequencies."""
        return apply_along(self._forward, np.asarray(values), axis)

    def inverse(self, spectrum: ArrayLike, axis: int = -1) -> NDArray:
        """Transform samples at the frequencies back to the nodes."""
        return apply_along(self._inverse, np.asarray(spectrum), axis)

    def synthesis_matrix(self, points: ArrayLike) -> NDArray[np.float64]:
        """Rows evaluate the band-limited inverse transform at arbitrary z >= 0."""
        p = np.atleast_1d(np.asarray(points, dtype=np.float64))
        return bessel_j_scaled(self._grid.nu, np.outer(p, self.frequencies)) * self.spectral_weights[None, :]

    def synthesize(self, spectrum: ArrayLike, points: ArrayLike, axis: int = -1) -> NDArray:
        """Evaluate the field with the given spectrum at points (z = 0 allowed)."""
        return apply_along(self.synthesis_matrix(points), np.asarray(spectrum), axis)


@lru_cache(maxsize=32)
def hankel_transform(grid: WeightedRadialGrid) -> HankelTransform:
    """Shared transform for a grid; construction is O(Nz^3)."""
    return HankelTransform(grid)


def _check_grid(a: float, grid: WeightedRadialGrid, values: NDArray) -> None:
    if a != grid.a:
        raise GridMismatchError(message="Transform order does not match the grid", expected=grid.a, actual=a)
    if values.shape[-1] != grid.size:
        raise GridMismatchError(message="Values do not match the radial grid", expected=grid.size, actual=values.shape)


def hankel_forward(a: float, grid: WeightedRadialGrid, phi: ArrayLike) -> NDArray:
    """Modified Hankel transform of order (a-1)/2 along the last axis."""
    arr = np.asarray(phi)
    _check_grid(a, grid, arr)
    return hankel_transform(grid).forward(arr)


def hankel_inverse(a: float, grid: WeightedRadialGrid, psi: ArrayLike) -> NDArray:
    """Inverse of hankel_forward; equal to it on self-dual grids."""
    arr = np.asarray(psi)
    _check_grid(a, grid, arr)
    return hankel_transform(grid).inverse(arr)


def _x_axes(xgrid: CartesianGrid, values: NDArray) -> tuple[int, ...]:
    if values.shape[: xgrid.d] != xgrid.shape:
        raise GridMismatchError(message="Values do not match the x-grid", expected=xgrid.shape, actual=values.shape)
    return tuple(range(xgrid.d))


def fourier_x(values: ArrayLike, xgrid: CartesianGrid, direction: Direction = "forward") -> NDArray[np.complex128]:
    """Continuous Fourier transform in x over the leading d axes.

    Frequencies are xgrid.axis_frequencies per axis (centered ordering).

    Raises:
        GridMismatchError: If the leading axes do not match the grid.
        InvalidParameterError: On an unknown direction.
    """
    arr = np.asarray(values, dtype=np.complex128)
    axes = _x_axes(xgrid, arr)
    if direction == "forward":
        out = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(arr, axes=axes), axes=axes), axes=axes)
        return xgrid.cell_volume * out
    if direction == "inverse":
        out = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(arr, axes=axes), axes=axes), axes=axes)
        return out / xgrid.cell_volume
    raise InvalidParameterError(message=f"Unknown transform direction: {direction!r}")


def time_frequencies(tgrid: TimeGrid) -> NDArray[np.float64]:
    return np.fft.fftshift(np.fft.fftfreq(tgrid.size, d=tgrid.step))


def fourier_t(values: ArrayLike, tgrid: TimeGrid, axis: int = -1) -> NDArray[np.complex128]:
    """Riemann-sum Fourier transform in t, e^(-2 pi i tau t), on time_frequencies(tgrid)."""
    arr = np.asarray(values, dtype=np.complex128)
    return tgrid.step * np.fft.fftshift(np.fft.fft(arr, axis=axis), axes=axis)


@dataclass(frozen=True, slots=True, eq=False)
class FourierHankelSpectrum:
    """Values of the Fourier-Hankel transform on (xi, zeta, tau).

    Attributes:
        xi: Per-axis tangential frequencies.
        zeta: Transverse frequencies.
        tau: Temporal frequencies.
        zeta_weights: Weights for zeta^a d(zeta).
        xi_cell: Volume element in xi.
        tau_step: Spacing of tau.
        values: Shape (Nx,)*d + (Nz, Nt+1).
    """

    xi: NDArray[np.float64]
    zeta: NDArray[np.float64]
    tau: NDArray[np.float64]
    zeta_weights: NDArray[np.float64]
    xi_cell: float
    tau_step: float
    values: NDArray[np.complex128] = field(repr=False)

    def norm(self) -> float:
        """L^2 norm with measure d(xi) zeta^a d(zeta) d(tau)."""
        d = self.values.ndim - 2
        density = self.xi_cell * (np.abs(self.values) ** 2).sum(axis=tuple(range(d)))
        return float(np.sqrt(self.zeta_weights @ density.sum(axis=-1) * self.tau_step))


def fourier_hankel(U: "SpaceTimeField") -> FourierHankelSpectrum:
    """Fourier in x and t, modified Hankel in z, of a space-time field."""
    xgrid, zgrid, tgrid = U.xgrid, U.zgrid, U.tgrid
    arr = U.values

    hankel = hankel_transform(zgrid)
    spectral = fourier_t(hankel.forward(fourier_x(arr, xgrid), axis=-2), tgrid, axis=-1)
    return FourierHankelSpectrum(
        xi=xgrid.axis_frequencies,
        zeta=hankel.frequencies,
        tau=time_frequencies(tgrid),
        zeta_weights=hankel.spectral_weights,
        xi_cell=(1.0 / (2.0 * xgrid.xmax)) ** xgrid.d,
        tau_step=1.0 / (tgrid.size * tgrid.step),
        values=spectral,
    )
