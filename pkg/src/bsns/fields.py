"""Sampled fields on the half-space grids.

Layout:
- HalfSpaceField.values: (Nx,)*d + (Nz,)
- SpaceTimeField.values: (Nx,)*d + (Nz, Nt+1), optional trace (Nx,)*d + (Nt+1,)
- BoundaryTrace.values: (Nx,)*d + (Nt+1,)
"""

from dataclasses import dataclass, field, replace
from typing import Self

import numpy as np
from numpy.typing import NDArray

from bsns.exceptions import GridMismatchError, NumericalFailureError
from bsns.numerics.grids import CartesianGrid, TimeGrid, WeightedRadialGrid


def _as_complex(values: NDArray, expected: tuple[int, ...], what: str) -> NDArray[np.complex128]:
    arr = np.asarray(values, dtype=np.complex128)
    if arr.shape != expected:
        raise GridMismatchError(message=f"{what} shape does not match its grids", expected=expected, actual=arr.shape)
    if not np.all(np.isfinite(arr)):
        raise NumericalFailureError(message=f"{what} contains non-finite values")
    return arr


def check_same_grids(*fields: "HalfSpaceField | SpaceTimeField | BoundaryTrace") -> None:
    """Raise GridMismatchError unless all fields share their grids."""
    first = fields[0]
    for other in fields[1:]:
        for name in ("xgrid", "zgrid", "tgrid"):
            mine, theirs = getattr(first, name, None), getattr(other, name, None)
            if mine is not None and theirs is not None and mine.key != theirs.key:
                raise GridMismatchError(
                    message=f"Fields live on different {name}s", expected=mine.key, actual=theirs.key
                )


@dataclass(frozen=True, slots=True, eq=False)
class HalfSpaceField:
    """A function of X = (x, z) sampled on the half-space grid.

    Attributes:
        xgrid: Tangential grid.
        zgrid: Transverse weighted grid.
        values: Complex samples, shape (Nx,)*d + (Nz,).
    """

    xgrid: CartesianGrid
    zgrid: WeightedRadialGrid
    values: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_complex(self.values, self.shape, "HalfSpaceField"))

    @property
    def a(self) -> float:
        return self.zgrid.a

    @property
    def shape(self) -> tuple[int, ...]:
        return self.xgrid.shape + (self.zgrid.size,)

    @classmethod
    def zeros(cls, xgrid: CartesianGrid, zgrid: WeightedRadialGrid) -> Self:
        return cls(xgrid, zgrid, np.zeros(xgrid.shape + (zgrid.size,), dtype=np.complex128))

    def with_values(self, values: NDArray) -> "HalfSpaceField":
        return replace(self, values=values)

    def inner(self, other: "HalfSpaceField") -> complex:
        """L^2_a pairing <self, other> = integral of self * conj(other)."""
        check_same_grids(self, other)
        density = self.xgrid.integrate(self.values * np.conj(other.values))
        return complex(self.zgrid.integrate(density))

    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self).real, 0.0)))


@dataclass(frozen=True, slots=True, eq=False)
class BoundaryTrace:
    """A function of (x, t), used for Neumann data and z = 0 traces.

    Attributes:
        xgrid: Tangential grid.
        tgrid: Time grid.
        values: Complex samples, shape (Nx,)*d + (Nt+1,).
    """

    xgrid: CartesianGrid
    tgrid: TimeGrid
    values: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_complex(self.values, self.shape, "BoundaryTrace"))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.xgrid.shape + (self.tgrid.size,)

    @classmethod
    def zeros(cls, xgrid: CartesianGrid, tgrid: TimeGrid) -> Self:
        return cls(xgrid, tgrid, np.zeros(xgrid.shape + (tgrid.size,), dtype=np.complex128))

    def with_values(self, values: NDArray) -> "BoundaryTrace":
        return replace(self, values=values)

    def inner(self, other: "BoundaryTrace") -> complex:
        """Pairing over R^d x [0, T] with trapezoid weights in t."""
        check_same_grids(self, other)
        density = self.xgrid.integrate(self.values * np.conj(other.values))
        return complex(density @ self.tgrid.weights)

    def is_zero(self) -> bool:
        return not np.any(self.values)


@dataclass(frozen=True, slots=True, eq=False)
class SpaceTimeField:
    """A function of (x, z, t) on the half-space time slab.

    Attributes:
        xgrid: Tangential grid.
        zgrid: Transverse weighted grid.
        tgrid: Time grid.
        values: Complex samples, shape (Nx,)*d + (Nz, Nt+1).
        trace: Optional z = 0 layer, shape (Nx,)*d + (Nt+1,).
    """

    xgrid: CartesianGrid
    zgrid: WeightedRadialGrid
    tgrid: TimeGrid
    values: NDArray[np.complex128] = field(repr=False)
    trace: NDArray[np.complex128] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_complex(self.values, self.shape, "SpaceTimeField"))
        if self.trace is not None:
            trace_shape = self.xgrid.shape + (self.tgrid.size,)
            object.__setattr__(self, "trace", _as_complex(self.trace, trace_shape, "SpaceTimeField trace"))

    @property
    def a(self) -> float:
        return self.zgrid.a

    @property
    def shape(self) -> tuple[int, ...]:
        return self.xgrid.shape + (self.zgrid.size, self.tgrid.size)

    @property
    def has_trace(self) -> bool:
        return self.trace is not None

    @classmethod
    def zeros(cls, xgrid: CartesianGrid, zgrid: WeightedRadialGrid, tgrid: TimeGrid) -> Self:
        shape = xgrid.shape + (zgrid.size, tgrid.size)
        trace = np.zeros(xgrid.shape + (tgrid.size,), dtype=np.complex128)
        return cls(xgrid, zgrid, tgrid, np.zeros(shape, dtype=np.complex128), trace)

    def slice(self, j: int) -> HalfSpaceField:
        """The field at time node t_j."""
        return HalfSpaceField(self.xgrid, self.zgrid, self.values[..., j])

    def boundary(self) -> BoundaryTrace:
        if self.trace is None:
            raise GridMismatchError(message="Field was computed without a z = 0 trace layer")
        return BoundaryTrace(self.xgrid, self.tgrid, self.trace)

    def with_values(self, values: NDArray, trace: NDArray | None = None) -> "SpaceTimeField":
        return replace(self, values=values, trace=trace)

    def __add__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        check_same_grids(self, other)
        trace = None
        if self.trace is not None and other.trace is not None:
            trace = self.trace + other.trace
        return self.with_values(self.values + other.values, trace)

    def scaled(self, factor: complex) -> "SpaceTimeField":
        trace = None if self.trace is None else factor * self.trace
        return self.with_values(factor * self.values, trace)

    def inner(self, other: "SpaceTimeField") -> complex:
        """Pairing over the half-space slab, weights z^a dz dx dt."""
        check_same_grids(self, other)
        density = self.xgrid.integrate(self.values * np.conj(other.values))
        return complex(self.zgrid.weights @ density @ self.tgrid.weights)

    def mass_profile(self) -> NDArray[np.float64]:
        """t -> squared L^2_a norm of the slice at t."""
        density = self.xgrid.integrate(np.abs(self.values) ** 2)
        return self.zgrid.weights @ density
