"""Named data families for solves and verification ensembles.

Every random family draws from numpy.random.default_rng(seed), so a seed fixes the data.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from bsns.exceptions import InvalidParameterError
from bsns.fields import BoundaryTrace, HalfSpaceField, SpaceTimeField
from bsns.numerics.grids import CartesianGrid, TimeGrid, WeightedRadialGrid


def smooth_step(z: NDArray[np.float64], inner: float = 1.0, outer: float = 2.0) -> NDArray[np.float64]:
    """C-infinity cutoff equal to 1 on [0, inner] and 0 on [outer, inf)."""
    if not 0.0 < inner < outer:
        raise InvalidParameterError(message=f"Cutoff needs 0 < inner < outer, got ({inner}, {outer})")
    s = np.clip((np.asarray(z, dtype=np.float64) - inner) / (outer - inner), 0.0, 1.0)

    def bump(x: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.where(x > 0.0, np.exp(-1.0 / np.where(x > 0.0, x, 1.0)), 0.0)

    up, down = bump(1.0 - s), bump(s)
    return up / (up + down)


def gaussian_x(xgrid: CartesianGrid, alpha: float = 1.0, center: float | NDArray = 0.0) -> NDArray[np.float64]:
    """e^(-alpha |x - center|^2) on the x-grid."""
    c = np.broadcast_to(np.asarray(center, dtype=np.float64), (xgrid.d,))
    r2 = sum((axis - ci) ** 2 for axis, ci in zip(xgrid.mesh(), c, strict=True))
    return np.exp(-alpha * r2)


def normalized_gaussian_x(xgrid: CartesianGrid) -> NDArray[np.float64]:
    """(2/pi)^(d/4) e^(-|x|^2), of unit L^2 norm."""
    return (2.0 / np.pi) ** (0.25 * xgrid.d) * gaussian_x(xgrid, 1.0)


def gaussian_datum(
    xgrid: CartesianGrid,
    zgrid: WeightedRadialGrid,
    alpha_x: float = 1.0,
    alpha_z: float = 1.0,
    center: float | NDArray = 0.0,
    amplitude: complex = 1.0,
    poly: float = 0.0,
) -> HalfSpaceField:
    """amplitude (1 + poly z^2) e^(-alpha_x |x - center|^2 - alpha_z z^2)."""
    z = zgrid.nodes
    transverse = (1.0 + poly * z**2) * np.exp(-alpha_z * z**2)
    values = amplitude * gaussian_x(xgrid, alpha_x, center)[..., None] * transverse
    return HalfSpaceField(xgrid, zgrid, values)


def separable_forcing(datum: HalfSpaceField, tgrid: TimeGrid, frequency: float = 0.0) -> SpaceTimeField:
    """F(x, z, t) = u(x, z) cos(frequency t)."""
    profile = np.cos(frequency * tgrid.nodes)
    return SpaceTimeField(datum.xgrid, datum.zgrid, tgrid, datum.values[..., None] * profile)


def compact_forcing(
    xgrid: CartesianGrid,
    zgrid: WeightedRadialGrid,
    tgrid: TimeGrid,
    support: float = 2.0,
    alpha_x: float = 1.0,
    amplitude: complex = 1.0,
) -> SpaceTimeField:
    """Forcing supported in z < support, so 1/k stays bounded in the anomalous regime."""
    z = zgrid.nodes
    transverse = np.where(z < support, (1.0 - (z / support) ** 2) ** 4, 0.0)
    profile = np.exp(-((tgrid.nodes - 0.5 * tgrid.T) ** 2) / (0.25 * tgrid.T**2))
    values = amplitude * gaussian_x(xgrid, alpha_x)[..., None, None] * transverse[:, None] * profile
    return SpaceTimeField(xgrid, zgrid, tgrid, values)


def gaussian_boundary(
    xgrid: CartesianGrid,
    tgrid: TimeGrid,
    alpha: float = 1.0,
    center: float | NDArray = 0.0,
    amplitude: complex = 1.0,
    frequency: float = 0.0,
) -> BoundaryTrace:
    """Phi(x, t) = amplitude e^(-alpha |x - center|^2) e^(i frequency t)."""
    profile = np.exp(1j * frequency * tgrid.nodes)
    values = amplitude * gaussian_x(xgrid, alpha, center)[..., None] * profile
    return BoundaryTrace(xgrid, tgrid, values)


def rough_boundary(xgrid: CartesianGrid, tgrid: TimeGrid, seed: int, modes: int = 8) -> BoundaryTrace:
    """Random-phase boundary datum: a Gaussian envelope carrying random plane waves."""
    rng = np.random.default_rng(seed)
    mesh = xgrid.mesh()
    band = 0.25 * xgrid.nx / (2.0 * xgrid.xmax)
    values = np.zeros(xgrid.shape + (tgrid.size,), dtype=np.complex128)
    for _ in range(modes):
        xi = rng.uniform(-band, band, size=xgrid.d)
        omega = rng.uniform(-2.0, 2.0)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        wave = np.exp(2j * np.pi * sum(k * axis for k, axis in zip(xi, mesh, strict=True)) + 1j * phase)
        values += wave[..., None] * np.exp(1j * omega * tgrid.nodes)
    envelope = gaussian_x(xgrid, 0.5)[..., None]
    return BoundaryTrace(xgrid, tgrid, envelope * values / modes)


def pathological_datum(xgrid: CartesianGrid, zgrid: WeightedRadialGrid) -> HalfSpaceField:
    """u0 = g(x) (e^(-z^2) + z^(1-a)/(1-a) h(z)) with h = 1 on [0, 1] and ||g||_2 = 1.

    Its weighted flux z^a du0/dz tends to g at z = 0, while every S_a(t) u0, t != 0, has
    zero flux.
    """
    a = zgrid.a
    if a >= 1.0:
        raise InvalidParameterError(message=f"Pathological datum needs a < 1, got {a}")
    z = zgrid.nodes
    transverse = np.exp(-(z**2)) + z ** (1.0 - a) / (1.0 - a) * smooth_step(z, 1.0, 2.0)
    return HalfSpaceField(xgrid, zgrid, normalized_gaussian_x(xgrid)[..., None] * transverse)


@dataclass(frozen=True, slots=True)
class GaussianEnsemble:
    """Seeded family of Gaussian-times-polynomial data with random centres, widths and phases.

    Attributes:
        seed: Seed of the generator.
        size: Number of members.
        width_range: Range of the Gaussian rates alpha.
        center_spread: Centres are drawn from [-center_spread, center_spread]^d.
    """

    seed: int
    size: int
    width_range: tuple[float, float] = (0.5, 2.0)
    center_spread: float = 1.0

    def _draws(self, d: int) -> list[tuple[float, float, NDArray, complex, float]]:
        rng = np.random.default_rng(self.seed)
        draws = []
        for _ in range(self.size):
            alpha_x, alpha_z = rng.uniform(*self.width_range, size=2)
            center = rng.uniform(-self.center_spread, self.center_spread, size=d)
            phase = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
            poly = rng.uniform(0.0, 1.0)
            draws.append((float(alpha_x), float(alpha_z), center, complex(phase), float(poly)))
        return draws

    def data(self, xgrid: CartesianGrid, zgrid: WeightedRadialGrid) -> list[HalfSpaceField]:
        return [
            gaussian_datum(xgrid, zgrid, ax, az, center, phase, poly)
            for ax, az, center, phase, poly in self._draws(xgrid.d)
        ]

    def forcings(self, xgrid: CartesianGrid, zgrid: WeightedRadialGrid, tgrid: TimeGrid) -> list[SpaceTimeField]:
        """Members times a random-frequency cosine in t."""
        rng = np.random.default_rng(self.seed + 1)
        return [separable_forcing(u, tgrid, float(rng.uniform(0.0, 4.0))) for u in self.data(xgrid, zgrid)]

    def compact_forcings(
        self, xgrid: CartesianGrid, zgrid: WeightedRadialGrid, tgrid: TimeGrid, support: float = 2.0
    ) -> list[SpaceTimeField]:
        draws = self._draws(xgrid.d)
        return [
            compact_forcing(xgrid, zgrid, tgrid, support, ax, phase)
            for ax, _, _, phase, _ in draws
        ]

    def boundaries(self, xgrid: CartesianGrid, tgrid: TimeGrid) -> list[BoundaryTrace]:
        rng = np.random.default_rng(self.seed + 2)
        return [
            gaussian_boundary(xgrid, tgrid, ax, center, phase, float(rng.uniform(-2.0, 2.0)))
            for ax, _, center, phase, _ in self._draws(xgrid.d)
        ]
