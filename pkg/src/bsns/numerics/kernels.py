"""Closed-form propagator kernels.

Every power of |t| carries its sign-dependent phase explicitly as a (modulus, phase)
pair; no complex powers are taken. All z -> 0 and zeta -> 0 limits go through
bessel_j_scaled, which removes the removable singularity of J_nu at the origin.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from bsns.exceptions import InvalidParameterError
from bsns.numerics.specfun import bessel_j_scaled, gamma_fn


@dataclass(frozen=True, slots=True)
class KernelParams:
    """Parameters shared by the transverse and full kernels.

    Attributes:
        a: Bessel parameter, a > -1.
        d: Tangential dimension, d >= 0 (0 for the transverse kernel alone).
    """

    a: float
    d: int = 0

    def __post_init__(self) -> None:
        if not np.isfinite(self.a) or self.a <= -1.0:
            raise InvalidParameterError(message=f"a must satisfy a > -1, got {self.a}")
        if self.d < 0:
            raise InvalidParameterError(message=f"d must be nonnegative, got {self.d}")

    @property
    def nu(self) -> float:
        return 0.5 * (self.a - 1.0)

    @property
    def beta(self) -> float:
        """Decay exponent (a+1)/2 of the transverse kernel."""
        return 0.5 * (self.a + 1.0)

    @property
    def boundary_constant(self) -> float:
        """2^(-a) / Gamma((a+1)/2)."""
        return float(2.0 ** (-self.a) / gamma_fn(self.beta))

    @property
    def full_boundary_constant(self) -> float:
        """1 / (2^(d+a) pi^(d/2) Gamma((a+1)/2))."""
        return float(1.0 / (2.0 ** (self.d + self.a) * np.pi ** (0.5 * self.d) * gamma_fn(self.beta)))

    def transverse_phase(self, t: float) -> float:
        return -np.sign(t) * (self.a + 1.0) * np.pi / 4.0

    def full_phase(self, t: float) -> float:
        return -np.sign(t) * (self.d + self.a + 1.0) * np.pi / 4.0


def _check_time(t: float) -> float:
    t = float(t)
    if t == 0.0 or not np.isfinite(t):
        raise InvalidParameterError(message="Kernels are singular at t = 0")
    return t


def _nonneg(values: ArrayLike, what: str) -> NDArray[np.float64]:
    arr = np.asarray(values, dtype=np.float64)
    if np.any(arr < 0.0):
        raise InvalidParameterError(message=f"{what} must be nonnegative")
    return arr


def kernel_sa(a: float, z: ArrayLike, zeta: ArrayLike, t: float) -> NDArray[np.complex128]:
    """Transverse kernel S_a(z, zeta, t).

    S_a = e^(-i sgn(t)(a+1)pi/4) (2|t|)^(-(a+1)/2) j_nu(z zeta / 2|t|) e^(i(z^2+zeta^2)/4t),
    with j_nu(x) = x^(-nu) J_nu(x) and nu = (a-1)/2. Broadcasts over z and zeta.

    Raises:
        InvalidParameterError: If t = 0, a <= -1, or z, zeta < 0.
    """
    params = KernelParams(a)
    t = _check_time(t)
    z, zeta = _nonneg(z, "z"), _nonneg(zeta, "zeta")

    modulus = (2.0 * abs(t)) ** (-params.beta) * bessel_j_scaled(params.nu, z * zeta / (2.0 * abs(t)))
    phase = params.transverse_phase(t) + (z**2 + zeta**2) / (4.0 * t)
    return modulus * np.exp(1j * phase)


def kernel_sa_boundary(a: float, z: ArrayLike, t: float) -> NDArray[np.complex128]:
    """Boundary kernel S_a(z, 0, t) = 2^(-a)/Gamma((a+1)/2) e^(-i sgn(t)(a+1)pi/4) |t|^(-(a+1)/2) e^(iz^2/4t)."""
    params = KernelParams(a)
    t = _check_time(t)
    z = _nonneg(z, "z")
    modulus = params.boundary_constant * abs(t) ** (-params.beta)
    return modulus * np.exp(1j * (params.transverse_phase(t) + z**2 / (4.0 * t)))


def _squared_distance(x: ArrayLike, y: ArrayLike, d: int) -> NDArray[np.float64]:
    x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    if d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        return (x - y) ** 2
    diff = x - y
    if diff.shape[-1] != d:
        raise InvalidParameterError(message=f"Points must have trailing dimension {d}, got shape {diff.shape}")
    return np.sum(diff**2, axis=-1)


def kernel_free(d: int, x: ArrayLike, y: ArrayLike, t: float) -> NDArray[np.complex128]:
    """Free Schrödinger kernel (4 pi i t)^(-d/2) e^(i|x-y|^2/4t), principal branch.

    Points are scalars for d = 1 or arrays with a trailing axis of length d.
    """
    if d < 1:
        raise InvalidParameterError(message=f"d must be >= 1, got {d}")
    t = _check_time(t)
    r2 = _squared_distance(x, y, d)
    modulus = (4.0 * np.pi * abs(t)) ** (-0.5 * d)
    return modulus * np.exp(1j * (-np.sign(t) * d * np.pi / 4.0 + r2 / (4.0 * t)))


def kernel_full(
    a: float, d: int, x: ArrayLike, z: ArrayLike, y: ArrayLike, zeta: ArrayLike, t: float
) -> NDArray[np.complex128]:
    """Full half-space kernel S_a(z, zeta, t) S(x, y, t) at X = (x, z), Y = (y, zeta)."""
    return kernel_sa(a, z, zeta, t) * kernel_free(d, x, y, t)


def kernel_full_boundary(
    a: float, d: int, x: ArrayLike, z: ArrayLike, y: ArrayLike, t: float
) -> NDArray[np.complex128]:
    """Full kernel with Y on the boundary: const(a,d) e^(-i sgn(t)(d+a+1)pi/4) |t|^(-(d+a+1)/2) e^(i|X-Y0|^2/4t)."""
    params = KernelParams(a, d)
    if d < 1:
        raise InvalidParameterError(message=f"d must be >= 1, got {d}")
    t = _check_time(t)
    z = _nonneg(z, "z")
    r2 = _squared_distance(x, y, d) + z**2
    modulus = params.full_boundary_constant * abs(t) ** (-0.5 * (d + params.a + 1.0))
    return modulus * np.exp(1j * (params.full_phase(t) + r2 / (4.0 * t)))
