"""Tests for the transverse, tangential and full propagators."""

import numpy as np
import pytest

from bsns.evolution.propagators import (
    HalfSpacePropagator,
    adjoint_T,
    gaussian_evolution_x,
    gaussian_evolution_z,
    propagate,
    propagate_x,
    propagate_z,
    propagate_z_kernel,
)
from bsns.evolution.duhamel import op_Tstar
from bsns.exceptions import GridMismatchError, InvalidParameterError
from bsns.fields import HalfSpaceField, SpaceTimeField
from bsns.numerics.grids import CartesianGrid, TimeGrid, build_radial_grid, self_dual_radial_grid


def _l2a(values: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sqrt(np.sum(weights * np.abs(values) ** 2)))


def _make_gaussian_field(a: float, xgrid: CartesianGrid, zmax: float = 16.0, nz: int = 64) -> HalfSpaceField:
    zgrid = build_radial_grid(a, zmax, nz)
    values = np.exp(-xgrid.radius_squared())[..., None] * np.exp(-(zgrid.nodes**2))
    return HalfSpaceField(xgrid, zgrid, values)


class TestPropagateZ:
    """Tests for the spectral transverse propagator."""

    @pytest.mark.parametrize("a", [-0.5, 0.0, 0.5, 1.0])
    def test_gaussian_closed_form(self, a: float) -> None:
        """S_a(t) e^(-z^2) matches the closed-form Gaussian evolution."""
        grid = build_radial_grid(a, 20.0, 96)
        t = 0.5
        evolved = propagate_z(a, t, np.exp(-(grid.nodes**2)), grid)
        assert np.max(np.abs(evolved - gaussian_evolution_z(a, 1.0, t, grid.nodes))) < 1e-8

    @pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
    def test_mass_conservation(self, t: float) -> None:
        """The weighted L^2 norm is conserved to round-off."""
        grid = self_dual_radial_grid(-0.5, 64)
        phi = np.exp(-(grid.nodes**2)) * (1.0 + 1j * grid.nodes)
        ratio = _l2a(propagate_z(-0.5, t, phi, grid), grid.weights) / _l2a(phi, grid.weights)
        assert ratio == pytest.approx(1.0, abs=1e-10)

    def test_time_zero_returns_copy(self) -> None:
        """t = 0 returns an equal, distinct array."""
        grid = build_radial_grid(0.0, 8.0, 16)
        phi = np.exp(-(grid.nodes**2)) + 0j
        out = propagate_z(0.0, 0.0, phi, grid)
        assert np.array_equal(out, phi)
        assert out is not phi

    def test_order_mismatch_raises(self) -> None:
        """a must match the grid."""
        grid = build_radial_grid(0.0, 8.0, 16)
        with pytest.raises(GridMismatchError):
            propagate_z(0.5, 1.0, np.zeros(16), grid)


class TestKernelQuadrature:
    """Tests for propagate_z_kernel."""

    @pytest.mark.parametrize("a", [-0.5, 0.0, 1.0])
    def test_agrees_with_spectral_path(self, a: float) -> None:
        """Kernel quadrature and Hankel multiplier give the same field."""
        grid = build_radial_grid(a, 24.0, 96)
        t = 1.0
        spectral = propagate_z(a, t, np.exp(-(grid.nodes**2)), grid)
        quadrature = propagate_z_kernel(a, t, lambda z: np.exp(-(z**2)), grid)
        assert _l2a(spectral - quadrature, grid.weights) / _l2a(spectral, grid.weights) < 1e-4

    def test_evaluates_at_origin(self) -> None:
        """points may include z = 0."""
        a, t = 0.5, 0.5
        grid = build_radial_grid(a, 20.0, 64)
        value = propagate_z_kernel(a, t, lambda z: np.exp(-(z**2)), grid, points=[0.0])
        assert complex(value[0]) == pytest.approx(complex(gaussian_evolution_z(a, 1.0, t, 0.0)), abs=1e-6)

    def test_time_zero_raises(self) -> None:
        """The kernel path is singular at t = 0."""
        grid = build_radial_grid(0.0, 8.0, 16)
        with pytest.raises(InvalidParameterError):
            propagate_z_kernel(0.0, 0.0, np.zeros(16), grid)


class TestPropagateX:
    """Tests for the free tangential propagator."""

    def test_gaussian_closed_form(self) -> None:
        """S(t) e^(-|x|^2) matches the closed-form evolution."""
        xgrid = CartesianGrid(1, 16.0, 128)
        t = 0.5
        evolved = propagate_x(1, t, np.exp(-xgrid.radius_squared()), xgrid)
        assert np.max(np.abs(evolved - gaussian_evolution_x(1, 1.0, t, xgrid.radius_squared()))) < 1e-10

    def test_trailing_axes_pass_through(self) -> None:
        """Extra trailing axes are propagated slice by slice."""
        xgrid = CartesianGrid(2, 8.0, 16)
        base = np.exp(-xgrid.radius_squared())
        stacked = np.stack([base, 2.0 * base], axis=-1)
        out = propagate_x(2, 0.3, stacked, xgrid)
        assert np.allclose(out[..., 1], 2.0 * propagate_x(2, 0.3, base, xgrid))

    def test_dimension_mismatch_raises(self) -> None:
        """d must match the grid."""
        with pytest.raises(GridMismatchError):
            propagate_x(2, 1.0, np.zeros(16), CartesianGrid(1, 8.0, 16))


class TestFullPropagator:
    """Tests for propagate, HalfSpacePropagator and adjoint_T."""

    def test_separable_gaussian(self) -> None:
        """The full propagator factors into the tangential and transverse evolutions."""
        a = 0.5
        xgrid = CartesianGrid(1, 16.0, 128)
        u0 = _make_gaussian_field(a, xgrid, zmax=20.0, nz=96)
        t = 0.5
        expected = (
            gaussian_evolution_x(1, 1.0, t, xgrid.radius_squared())[..., None]
            * gaussian_evolution_z(a, 1.0, t, u0.zgrid.nodes)[None, :]
        )
        assert np.max(np.abs(propagate(a, 1, t, u0).values - expected)) < 1e-8

    def test_group_property(self) -> None:
        """S(t1) S(t2) = S(t1 + t2)."""
        xgrid = CartesianGrid(1, 8.0, 32)
        u0 = _make_gaussian_field(0.0, xgrid)
        twice = propagate(0.0, 1, 0.3, propagate(0.0, 1, 0.2, u0))
        once = propagate(0.0, 1, 0.5, u0)
        assert np.allclose(twice.values, once.values, atol=1e-12)

    def test_norm_conserved(self) -> None:
        """The discrete propagator is unitary on the half-space grid."""
        xgrid = CartesianGrid(2, 6.0, 16)
        u0 = _make_gaussian_field(-0.5, xgrid, nz=32)
        assert propagate(-0.5, 2, 3.0, u0).norm() == pytest.approx(u0.norm(), rel=1e-10)

    def test_adjoint_pairing(self) -> None:
        """<T* u0, F> = <u0, T F> under the discrete pairings."""
        xgrid = CartesianGrid(1, 8.0, 32)
        u0 = _make_gaussian_field(0.0, xgrid, nz=32)
        tgrid = TimeGrid(1.0, 12)
        rng = np.random.default_rng(5)
        shape = u0.shape + (tgrid.size,)
        F = SpaceTimeField(xgrid, u0.zgrid, tgrid, rng.normal(size=shape) + 1j * rng.normal(size=shape))

        left = op_Tstar(0.0, 1, u0, tgrid).inner(F)
        right = u0.inner(adjoint_T(0.0, 1, F))
        assert abs(left - right) <= 1e-10 * abs(left)

    def test_evolve_first_slice_is_datum(self) -> None:
        """evolve returns the datum itself at t = 0."""
        xgrid = CartesianGrid(1, 8.0, 16)
        u0 = _make_gaussian_field(0.0, xgrid, nz=16)
        values, trace = HalfSpacePropagator(xgrid, u0.zgrid).evolve(u0.values, TimeGrid(1.0, 4))
        assert np.array_equal(values[..., 0], u0.values)
        assert trace.shape == (16, 5)

    def test_field_mismatch_raises(self) -> None:
        """(a, d) must match the field."""
        xgrid = CartesianGrid(1, 8.0, 16)
        u0 = _make_gaussian_field(0.0, xgrid, nz=16)
        with pytest.raises(GridMismatchError):
            propagate(0.5, 1, 1.0, u0)
