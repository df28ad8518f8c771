"""Numerical building blocks: special functions, grids, transforms and kernels."""

from bsns.numerics.grids import (
    RADIAL_SCHEMES,
    CartesianGrid,
    RadialScheme,
    TimeGrid,
    WeightedRadialGrid,
    build_radial_grid,
    self_dual_radial_grid,
)
from bsns.numerics.kernels import (
    KernelParams,
    kernel_free,
    kernel_full,
    kernel_full_boundary,
    kernel_sa,
    kernel_sa_boundary,
)
from bsns.numerics.specfun import (
    bessel_j,
    bessel_j_scaled,
    bessel_zeros,
    gamma_fn,
    oscillatory_gamma,
    oscillatory_tail,
)
from bsns.numerics.transforms import (
    FourierHankelSpectrum,
    HankelTransform,
    fourier_hankel,
    fourier_t,
    fourier_x,
    hankel_forward,
    hankel_inverse,
    hankel_transform,
)

__all__ = [
    "RADIAL_SCHEMES",
    "CartesianGrid",
    "FourierHankelSpectrum",
    "HankelTransform",
    "KernelParams",
    "RadialScheme",
    "TimeGrid",
    "WeightedRadialGrid",
    "bessel_j",
    "bessel_j_scaled",
    "bessel_zeros",
    "build_radial_grid",
    "fourier_hankel",
    "fourier_t",
    "fourier_x",
    "gamma_fn",
    "hankel_forward",
    "hankel_inverse",
    "hankel_transform",
    "kernel_free",
    "kernel_full",
    "kernel_full_boundary",
    "kernel_sa",
    "kernel_sa_boundary",
    "oscillatory_gamma",
    "oscillatory_tail",
    "self_dual_radial_grid",
]
