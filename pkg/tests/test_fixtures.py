"""Tests for the named data families."""

import numpy as np
import pytest

from bsns.exceptions import InvalidParameterError
from bsns.fixtures import (
    GaussianEnsemble,
    compact_forcing,
    gaussian_boundary,
    gaussian_datum,
    normalized_gaussian_x,
    pathological_datum,
    rough_boundary,
    separable_forcing,
    smooth_step,
)
from bsns.numerics.grids import CartesianGrid, TimeGrid, build_radial_grid, self_dual_radial_grid


class TestProfiles:
    """Tests for smooth_step and the Gaussian profiles."""

    def test_smooth_step_limits(self) -> None:
        """1 below inner, 0 above outer, 1/2 in the middle."""
        values = smooth_step(np.array([0.0, 1.0, 1.5, 2.0, 3.0]))
        assert np.allclose(values, [1.0, 1.0, 0.5, 0.0, 0.0])

    def test_smooth_step_is_monotone(self) -> None:
        """The cutoff never increases."""
        assert np.all(np.diff(smooth_step(np.linspace(0.0, 3.0, 200))) <= 0.0)

    def test_smooth_step_needs_ordered_radii(self) -> None:
        """0 < inner < outer."""
        with pytest.raises(InvalidParameterError):
            smooth_step(np.zeros(3), 2.0, 1.0)

    def test_normalized_gaussian(self) -> None:
        """Unit L^2 norm up to the box truncation."""
        xgrid = CartesianGrid(2, 6.0, 64)
        g = normalized_gaussian_x(xgrid)
        assert float(np.sqrt(xgrid.integrate(g**2))) == pytest.approx(1.0, rel=1e-10)

    def test_gaussian_datum_shape_and_peak(self) -> None:
        """The datum is amplitude times a unit Gaussian peak."""
        xgrid = CartesianGrid(1, 4.0, 16)
        zgrid = build_radial_grid(0.0, 6.0, 12)
        datum = gaussian_datum(xgrid, zgrid, amplitude=2.0j)
        assert datum.shape == (16, 12)
        assert np.max(np.abs(datum.values)) <= 2.0
        assert datum.values[8, 0] == pytest.approx(2.0j * np.exp(-zgrid.nodes[0] ** 2))


class TestForcingsAndBoundaries:
    """Tests for separable_forcing, compact_forcing and the boundary data."""

    def test_separable_forcing_profile(self) -> None:
        """F(t) = u cos(frequency t)."""
        xgrid = CartesianGrid(1, 4.0, 8)
        datum = gaussian_datum(xgrid, build_radial_grid(0.0, 6.0, 8))
        tgrid = TimeGrid(np.pi, 2)
        F = separable_forcing(datum, tgrid, frequency=1.0)
        assert np.allclose(F.values[..., 1], 0.0, atol=1e-15)
        assert np.allclose(F.values[..., 2], -datum.values)

    def test_compact_forcing_support(self) -> None:
        """The forcing vanishes beyond its support."""
        xgrid = CartesianGrid(1, 4.0, 8)
        zgrid = self_dual_radial_grid(-0.5, 32)
        F = compact_forcing(xgrid, zgrid, TimeGrid(1.0, 4), support=1.5)
        outside = zgrid.nodes >= 1.5
        assert np.any(outside)
        assert not np.any(F.values[:, outside, :])

    def test_gaussian_boundary_phase(self) -> None:
        """Phi carries e^(i frequency t)."""
        xgrid = CartesianGrid(1, 4.0, 8)
        Phi = gaussian_boundary(xgrid, TimeGrid(1.0, 1), frequency=np.pi)
        assert np.allclose(Phi.values[..., 1], -Phi.values[..., 0])

    def test_rough_boundary_is_seeded(self) -> None:
        """The same seed gives the same datum."""
        xgrid = CartesianGrid(1, 8.0, 32)
        tgrid = TimeGrid(1.0, 8)
        first = rough_boundary(xgrid, tgrid, seed=5)
        assert np.array_equal(first.values, rough_boundary(xgrid, tgrid, seed=5).values)
        assert not np.array_equal(first.values, rough_boundary(xgrid, tgrid, seed=6).values)


class TestPathologicalDatum:
    """Tests for pathological_datum."""

    def test_unit_tangential_norm(self) -> None:
        """The z -> 0 layer is close to g, of unit L^2 norm."""
        xgrid = CartesianGrid(1, 8.0, 64)
        zgrid = build_radial_grid(0.0, 4.0, 64, "gauss_jacobi")
        datum = pathological_datum(xgrid, zgrid)
        g = datum.values[:, 0]
        assert float(np.sqrt(xgrid.integrate(np.abs(g) ** 2))) == pytest.approx(1.0, rel=1e-2)

    def test_order_at_least_one_raises(self) -> None:
        """The flux term needs a < 1."""
        xgrid = CartesianGrid(1, 4.0, 8)
        with pytest.raises(InvalidParameterError):
            pathological_datum(xgrid, build_radial_grid(1.0, 4.0, 8))


class TestGaussianEnsemble:
    """Tests for GaussianEnsemble."""

    def test_seed_fixes_members(self) -> None:
        """Two ensembles with one seed agree member by member."""
        xgrid = CartesianGrid(1, 4.0, 8)
        zgrid = build_radial_grid(0.0, 6.0, 8)
        first = GaussianEnsemble(9, 3).data(xgrid, zgrid)
        second = GaussianEnsemble(9, 3).data(xgrid, zgrid)
        assert len(first) == 3
        for u, v in zip(first, second, strict=True):
            assert np.array_equal(u.values, v.values)

    def test_larger_ensemble_extends_smaller(self) -> None:
        """Members are drawn in sequence, so a larger ensemble starts with the smaller one."""
        xgrid = CartesianGrid(1, 4.0, 8)
        zgrid = build_radial_grid(0.0, 6.0, 8)
        small = GaussianEnsemble(9, 2).data(xgrid, zgrid)
        large = GaussianEnsemble(9, 4).data(xgrid, zgrid)
        assert np.array_equal(small[1].values, large[1].values)

    def test_families_share_grids(self) -> None:
        """Forcings, compact forcings and boundaries live on the requested grids."""
        xgrid = CartesianGrid(1, 4.0, 8)
        zgrid = self_dual_radial_grid(-0.5, 16)
        tgrid = TimeGrid(1.0, 4)
        ensemble = GaussianEnsemble(1, 2)
        assert all(F.tgrid.key == tgrid.key for F in ensemble.forcings(xgrid, zgrid, tgrid))
        assert all(F.zgrid.key == zgrid.key for F in ensemble.compact_forcings(xgrid, zgrid, tgrid))
        assert all(Phi.values.shape == (8, 5) for Phi in ensemble.boundaries(xgrid, tgrid))
