"""Quadrature grids in the tangential (x), transverse (z) and time variables.

The transverse grid carries weights for the invariant measure z^a dz on (0, Zmax).
Three schemes are available:
- bessel_collocation: nodes at scaled zeros of J_(a-1)/2, the default for spectral work
- gauss_jacobi: Gauss rule for the weight z^a, exact on polynomials
- trapezoid: product trapezoid rule on uniform nodes, exact on constants
"""

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import NDArray
from scipy import special

from bsns.exceptions import InvalidParameterError
from bsns.numerics.specfun import bessel_j, bessel_zeros

logger = logging.getLogger(__name__)

RadialScheme = Literal["bessel_collocation", "gauss_jacobi", "trapezoid"]

RADIAL_SCHEMES: tuple[RadialScheme, ...] = ("bessel_collocation", "gauss_jacobi", "trapezoid")

MIN_RADIAL_NODES = 8


@dataclass(frozen=True, slots=True, eq=False)
class WeightedRadialGrid:
    """Quadrature for the measure z^a dz on (0, Zmax).

    Attributes:
        a: Bessel parameter, a > -1.
        zmax: Truncation radius.
        scheme: How nodes and weights were built.
        nodes: Strictly increasing nodes in (0, Zmax].
        weights: Positive weights.
        zeros: For bessel_collocation, the first Nz+1 zeros of J_nu; empty otherwise.
    """

    a: float
    zmax: float
    scheme: RadialScheme
    nodes: NDArray[np.float64] = field(repr=False)
    weights: NDArray[np.float64] = field(repr=False)
    zeros: NDArray[np.float64] = field(repr=False, default_factory=lambda: np.empty(0))

    @property
    def key(self) -> tuple:
        return (self.scheme, self.a, self.zmax, self.size)

    @property
    def nu(self) -> float:
        """Hankel order (a-1)/2."""
        return 0.5 * (self.a - 1.0)

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def is_self_dual(self) -> bool:
        """Whether the frequency grid coincides with the node grid."""
        if self.scheme != "bessel_collocation":
            return True
        return bool(np.isclose(self.zmax**2, self.zeros[-1], rtol=1e-12))

    def integrate(self, values: NDArray, axis: int = -1) -> NDArray:
        """Quadrature of values against z^a dz along the given axis."""
        return np.tensordot(values, self.weights, axes=([axis], [0]))

    def layers_below(self, z: float) -> int:
        return int(np.count_nonzero(self.nodes < z))


@dataclass(frozen=True, slots=True, eq=False)
class CartesianGrid:
    """Uniform grid on [-Xmax, Xmax)^d with Nx nodes per axis.

    Attributes:
        d: Tangential dimension.
        xmax: Half-width of the box.
        nx: Nodes per axis, a power of two.
    """

    d: int
    xmax: float
    nx: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise InvalidParameterError(message=f"Dimension must be >= 1, got {self.d}")
        if self.xmax <= 0.0:
            raise InvalidParameterError(message=f"Xmax must be positive, got {self.xmax}")
        if self.nx < 2 or self.nx & (self.nx - 1):
            raise InvalidParameterError(message=f"Nx must be a power of two, got {self.nx}")

    @property
    def key(self) -> tuple:
        return (self.d, self.xmax, self.nx)

    @property
    def spacing(self) -> float:
        return 2.0 * self.xmax / self.nx

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.nx,) * self.d

    @property
    def axis_nodes(self) -> NDArray[np.float64]:
        return -self.xmax + self.spacing * np.arange(self.nx)

    @property
    def axis_frequencies(self) -> NDArray[np.float64]:
        """Centered frequencies with spacing 1/(2 Xmax), ordered like fftshift output."""
        return (np.arange(self.nx) - self.nx // 2) / (2.0 * self.xmax)

    def mesh(self) -> tuple[NDArray[np.float64], ...]:
        """Coordinate arrays of shape (Nx,)*d, one per axis."""
        return tuple(np.meshgrid(*([self.axis_nodes] * self.d), indexing="ij"))

    def radius_squared(self) -> NDArray[np.float64]:
        return sum(c**2 for c in self.mesh())

    def frequency_squared(self) -> NDArray[np.float64]:
        """|xi|^2 on the unshifted FFT ordering."""
        freq = np.fft.fftfreq(self.nx, d=self.spacing)
        axes = np.meshgrid(*([freq] * self.d), indexing="ij")
        return sum(f**2 for f in axes)

    def integrate(self, values: NDArray) -> NDArray:
        """Riemann sum over the leading d axes."""
        return self.cell_volume * values.sum(axis=tuple(range(self.d)))


@dataclass(frozen=True, slots=True, eq=False)
class TimeGrid:
    """Uniform grid t_j = j T / Nt, j = 0..Nt, with trapezoid weights.

    Attributes:
        T: Final time.
        nt: Number of steps; there are Nt+1 nodes.
    """

    T: float
    nt: int

    def __post_init__(self) -> None:
        if self.T <= 0.0 or not np.isfinite(self.T):
            raise InvalidParameterError(message=f"T must be positive, got {self.T}")
        if self.nt < 1:
            raise InvalidParameterError(message=f"Nt must be >= 1, got {self.nt}")

    @property
    def key(self) -> tuple:
        return (self.T, self.nt)

    @property
    def step(self) -> float:
        return self.T / self.nt

    @property
    def nodes(self) -> NDArray[np.float64]:
        return self.step * np.arange(self.nt + 1)

    @property
    def size(self) -> int:
        return self.nt + 1

    @property
    def weights(self) -> NDArray[np.float64]:
        w = np.full(self.nt + 1, self.step)
        w[0] = w[-1] = 0.5 * self.step
        return w


def _check_radial(a: float, zmax: float, nz: int) -> None:
    if not np.isfinite(a) or a <= -1.0:
        raise InvalidParameterError(message=f"a must satisfy a > -1, got {a}")
    if not np.isfinite(zmax) or zmax <= 0.0:
        raise InvalidParameterError(message=f"Zmax must be positive, got {zmax}")
    if nz < MIN_RADIAL_NODES:
        raise InvalidParameterError(message=f"Nz must be >= {MIN_RADIAL_NODES}, got {nz}")


def _collocation_grid(a: float, zmax: float, nz: int) -> WeightedRadialGrid:
    nu = 0.5 * (a - 1.0)
    zeros = bessel_zeros(nu, nz + 1)
    s = zeros[-1]
    nodes = zeros[:nz] * zmax / s
    weights = 2.0 * zmax**2 * nodes ** (a - 1.0) / (s**2 * bessel_j(nu + 1.0, zeros[:nz]) ** 2)
    return WeightedRadialGrid(a=a, zmax=zmax, scheme="bessel_collocation", nodes=nodes, weights=weights, zeros=zeros)


def _gauss_jacobi_grid(a: float, zmax: float, nz: int) -> WeightedRadialGrid:
    x, w = special.roots_jacobi(nz, 0.0, a)
    nodes = 0.5 * zmax * (1.0 + x)
    weights = (0.5 * zmax) ** (a + 1.0) * w
    return WeightedRadialGrid(a=a, zmax=zmax, scheme="gauss_jacobi", nodes=nodes, weights=weights)


def _trapezoid_grid(a: float, zmax: float, nz: int) -> WeightedRadialGrid:
    h = zmax / nz
    nodes = h * np.arange(1, nz + 1)

    def moment(k: float, lo: NDArray, hi: NDArray) -> NDArray:
        return (hi ** (a + k + 1.0) - lo ** (a + k + 1.0)) / (a + k + 1.0)

    # First cell (0, h) is flat; the rest are hat functions against z^a.
    weights = np.zeros(nz)
    weights[0] = h ** (a + 1.0) / (a + 1.0)
    lo, hi = nodes[:-1], nodes[1:]
    m0, m1 = moment(0.0, lo, hi), moment(1.0, lo, hi)
    weights[:-1] += (hi * m0 - m1) / h
    weights[1:] += (m1 - lo * m0) / h
    return WeightedRadialGrid(a=a, zmax=zmax, scheme="trapezoid", nodes=nodes, weights=weights)


def build_radial_grid(
    a: float, zmax: float, nz: int, scheme: RadialScheme = "bessel_collocation"
) -> WeightedRadialGrid:
    """Build a weighted radial grid.

    Args:
        a: Bessel parameter, a > -1.
        zmax: Truncation radius.
        nz: Number of nodes, at least 8.
        scheme: One of RADIAL_SCHEMES.

    Returns:
        The grid.

    Raises:
        InvalidParameterError: On any invalid parameter.
    """
    _check_radial(a, zmax, nz)
    if scheme == "bessel_collocation":
        grid = _collocation_grid(a, zmax, nz)
    elif scheme == "gauss_jacobi":
        grid = _gauss_jacobi_grid(a, zmax, nz)
    elif scheme == "trapezoid":
        grid = _trapezoid_grid(a, zmax, nz)
    else:
        raise InvalidParameterError(message=f"Unknown radial scheme: {scheme!r}")

    logger.debug("Built %s radial grid: a=%g, Zmax=%g, Nz=%d", scheme, a, zmax, nz)
    return grid


def self_dual_radial_grid(a: float, nz: int) -> WeightedRadialGrid:
    """Bessel collocation grid whose frequency grid equals its node grid (Zmax^2 = j_(Nz+1))."""
    _check_radial(a, 1.0, nz)
    zmax = float(np.sqrt(bessel_zeros(0.5 * (a - 1.0), nz + 1)[-1]))
    return build_radial_grid(a, zmax, nz, "bessel_collocation")
