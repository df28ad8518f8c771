"""Tests for the Picard solver of the nonlinear boundary problem."""

import numpy as np
import pytest

from bsns.evolution.duhamel import solve_linear
from bsns.evolution.nonlinear import (
    TARGET_CONTRACTION,
    NonlinearProblem,
    amplitude_threshold,
    boundary_nonlinearity,
    extend_in_time,
    mass_derivative_residual,
    picard_solve,
    smallness_report,
    subcritical_window,
    uniqueness_probe,
)
from bsns.exceptions import InvalidParameterError, NonConvergenceError
from bsns.fields import HalfSpaceField, SpaceTimeField
from bsns.fixtures import gaussian_datum, separable_forcing
from bsns.numerics.grids import CartesianGrid, TimeGrid, self_dual_radial_grid


def _make_problem(
    mu: complex = 1.0,
    a: float = 0.0,
    p: float = 2.0,
    amplitude: float = 0.1,
    nz: int = 32,
    T: float = 1.0,
    nt: int = 16,
) -> NonlinearProblem:
    xgrid = CartesianGrid(1, 8.0, 32)
    zgrid = self_dual_radial_grid(a, nz)
    u0 = gaussian_datum(xgrid, zgrid, amplitude=amplitude)
    return NonlinearProblem(a=a, d=1, mu=mu, p=p, u0=u0, tgrid=TimeGrid(T, nt))


class TestNonlinearProblem:
    """Tests for NonlinearProblem validation and defaults."""

    def test_exponent_defaults(self) -> None:
        """r = p + 1 and q solves the admissibility relation."""
        prob = _make_problem()
        assert prob.r == 3.0
        assert prob.q == pytest.approx(3.0)
        assert prob.q_inf is None
        assert prob.is_critical

    def test_anomalous_partner_exponent(self) -> None:
        """For a < 0 the partner q_inf is filled in."""
        prob = _make_problem(a=-0.5)
        assert prob.regime == "anomalous_a"
        assert prob.q_inf is not None
        assert prob.q_inf > prob.q

    def test_supercritical_power_raises(self) -> None:
        """p above the critical power is rejected."""
        with pytest.raises(InvalidParameterError):
            _make_problem(p=2.5)

    def test_order_outside_window_raises(self) -> None:
        """The boundary problem needs -1 < a < 1."""
        xgrid = CartesianGrid(1, 8.0, 32)
        zgrid = self_dual_radial_grid(1.0, 16)
        with pytest.raises(InvalidParameterError):
            NonlinearProblem(a=1.0, d=1, mu=1.0, p=1.2, u0=gaussian_datum(xgrid, zgrid), tgrid=TimeGrid(1.0, 4))

    def test_datum_must_match_order(self) -> None:
        """u0 must live on a grid of the same a."""
        xgrid = CartesianGrid(1, 8.0, 32)
        u0 = gaussian_datum(xgrid, self_dual_radial_grid(0.5, 16))
        with pytest.raises(InvalidParameterError):
            NonlinearProblem(a=0.0, d=1, mu=1.0, p=2.0, u0=u0, tgrid=TimeGrid(1.0, 4))

    def test_forcing_must_share_time_grid(self) -> None:
        """F must live on the problem's time grid."""
        prob = _make_problem()
        F = separable_forcing(prob.u0, TimeGrid(1.0, 8))
        with pytest.raises(InvalidParameterError):
            NonlinearProblem(a=0.0, d=1, mu=1.0, p=2.0, u0=prob.u0, tgrid=prob.tgrid, F=F)

    def test_scaled_multiplies_data(self) -> None:
        """scaled multiplies u0 and F."""
        prob = _make_problem()
        assert prob.scaled(3.0).u0.norm() == pytest.approx(3.0 * prob.u0.norm())


class TestPicardSolve:
    """Tests for picard_solve and uniqueness_probe."""

    def test_zero_coupling_is_linear_solution(self) -> None:
        """mu = 0 converges in one step to the linear solution."""
        prob = _make_problem(mu=0.0)
        U, diagnostics = picard_solve(prob)
        expected = solve_linear(0.0, 1, prob.u0, tgrid=prob.tgrid)
        assert diagnostics.converged
        assert diagnostics.iterations == 1
        assert np.allclose(U.values, expected.values, atol=1e-14)

    def test_zero_data_give_zero(self) -> None:
        """u0 = 0 and F = 0 give U = 0."""
        prob = _make_problem()
        zero = prob.scaled(0.0)
        U, diagnostics = picard_solve(zero)
        assert not np.any(U.values)
        assert diagnostics.residual == 0.0

    def test_forced_problem_includes_duhamel_term(self) -> None:
        """With mu = 0 a forcing enters through D(F)."""
        prob = _make_problem(mu=0.0)
        F = separable_forcing(prob.u0, prob.tgrid, frequency=1.0)
        forced = NonlinearProblem(a=0.0, d=1, mu=0.0, p=2.0, u0=prob.u0, tgrid=prob.tgrid, F=F)
        U, _ = picard_solve(forced)
        expected = solve_linear(0.0, 1, prob.u0, F=F)
        assert np.allclose(U.values, expected.values, atol=1e-14)

    def test_small_data_contract(self) -> None:
        """Small data converge with contraction well below one."""
        U, diagnostics = picard_solve(_make_problem(amplitude=0.1), tol=1e-10)
        assert diagnostics.converged
        assert diagnostics.residual <= 1e-10
        assert diagnostics.max_contraction < 0.5
        assert diagnostics.mass.shape == (U.tgrid.size,)

    def test_budget_exhaustion_raises(self) -> None:
        """One iteration cannot reach a tiny tolerance; the diagnostics ride along."""
        with pytest.raises(NonConvergenceError) as excinfo:
            picard_solve(_make_problem(), tol=1e-15, max_iter=1)
        assert excinfo.value.iterations == 1
        assert excinfo.value.diagnostics is not None

    def test_invalid_budget_raises(self) -> None:
        """max_iter must be positive."""
        with pytest.raises(InvalidParameterError):
            picard_solve(_make_problem(), max_iter=0)

    def test_uniqueness(self) -> None:
        """Starting from zero or from the linear part gives the same fixed point."""
        tol = 1e-10
        assert uniqueness_probe(_make_problem(amplitude=0.1), tol=tol) <= 5.0 * tol

    def test_boundary_nonlinearity(self) -> None:
        """The Neumann datum is -mu |U|^(p-1) U on the trace."""
        prob = _make_problem(mu=0.0)
        U, _ = picard_solve(prob)
        datum = boundary_nonlinearity(U, 2.0 - 1.0j, 2.0)
        assert np.allclose(datum.values, -(2.0 - 1.0j) * np.abs(U.trace) * U.trace)


class TestMassIdentity:
    """Tests for mass_derivative_residual."""

    def test_real_coupling_conserves_mass(self) -> None:
        """Im(mu) = 0 conserves the L^2_a mass."""
        prob = _make_problem(mu=1.0, nz=48, nt=32)
        U, _ = picard_solve(prob)
        identity = mass_derivative_residual(U, prob.mu, prob.p)
        assert identity.relative_drift <= 1e-3

    def test_absorbing_coupling_loses_mass(self) -> None:
        """Im(mu) > 0 makes the mass decrease at the predicted rate."""
        prob = _make_problem(mu=0.5j, nz=48, nt=32)
        U, _ = picard_solve(prob)
        identity = mass_derivative_residual(U, prob.mu, prob.p)
        assert np.all(np.diff(identity.mass) < 0.0)
        assert np.all(identity.predicted < 0.0)
        late = slice(2, None)
        assert np.max(np.abs(identity.residual[late]) / np.abs(identity.predicted[late])) <= 0.05

    def test_zero_field_has_no_drift(self) -> None:
        """The zero field reports zero drift."""
        prob = _make_problem().scaled(0.0)
        U, _ = picard_solve(prob)
        assert mass_derivative_residual(U, prob.mu, prob.p).relative_drift == 0.0

    def test_forced_solution_is_rejected(self) -> None:
        """The identity has no bulk source term, so a nonzero F is an invalid input."""
        prob = _make_problem()
        F = separable_forcing(prob.u0, prob.tgrid, frequency=1.0)
        U = solve_linear(prob.a, prob.d, prob.u0, F=F, tgrid=prob.tgrid)
        with pytest.raises(InvalidParameterError, match="forcing"):
            mass_derivative_residual(U, prob.mu, prob.p, F)

    def test_zero_forcing_is_accepted(self) -> None:
        """An all-zero F is the unforced case."""
        prob = _make_problem()
        U, _ = picard_solve(prob)
        zero = SpaceTimeField.zeros(prob.u0.xgrid, prob.u0.zgrid, prob.tgrid)
        identity = mass_derivative_residual(U, prob.mu, prob.p, zero)
        assert identity.mass.shape == (prob.tgrid.size,)


class TestSmallness:
    """Tests for smallness_report, amplitude_threshold and subcritical_window."""

    def test_report_without_forcing(self) -> None:
        """Only the datum contributes when F = 0 and a >= 0."""
        prob = _make_problem()
        report = smallness_report(prob)
        assert report.critical
        assert report.gap is None
        assert report.window_factor == 1.0
        assert report.total == pytest.approx(prob.u0.norm())

    def test_report_window_factor_in_anomalous_regime(self) -> None:
        """T^gap enlarges the bound for T > 1."""
        report = smallness_report(_make_problem(a=-0.5, T=2.0, nt=4))
        assert report.gap is not None and report.gap > 0.0
        assert report.window_factor == pytest.approx(2.0**report.gap)

    def test_report_with_forcing(self) -> None:
        """A forcing adds its energy and dual norms."""
        prob = _make_problem()
        F = separable_forcing(prob.u0, prob.tgrid)
        forced = NonlinearProblem(a=0.0, d=1, mu=1.0, p=2.0, u0=prob.u0, tgrid=prob.tgrid, F=F)
        report = smallness_report(forced)
        assert report.forcing_energy == pytest.approx(prob.u0.norm(), rel=1e-12)
        assert report.forcing_dual > 0.0

    def test_amplitude_threshold_without_coupling(self) -> None:
        """mu = 0 contracts at any amplitude."""
        threshold = amplitude_threshold(_make_problem(mu=0.0), upper=10.0)
        assert threshold.amplitude == 10.0
        assert threshold.contraction == 0.0

    def test_amplitude_threshold_contracts(self) -> None:
        """The returned amplitude contracts by at least the target factor."""
        threshold = amplitude_threshold(_make_problem(amplitude=1.0), upper=4.0, bisections=5)
        assert 0.0 < threshold.amplitude <= 4.0
        assert threshold.contraction <= TARGET_CONTRACTION

    def test_subcritical_window_without_coupling(self) -> None:
        """mu = 0 keeps the configured window."""
        window = subcritical_window(_make_problem(mu=0.0, p=1.5, T=2.0, nt=8))
        assert window.T0 == 2.0
        assert window.gain > 0.0

    def test_subcritical_window_needs_subcritical_power(self) -> None:
        """p = p_c has no window to shrink."""
        with pytest.raises(InvalidParameterError):
            subcritical_window(_make_problem(p=2.0))


class TestContinuation:
    """Tests for extend_in_time."""

    def test_windows_chain(self) -> None:
        """Each window restarts from the last slice; a real coupling keeps the mass."""
        prob = _make_problem(mu=1.0, p=1.5, T=0.5, nz=48, nt=16)
        report = extend_in_time(prob, windows=2)
        assert len(report.iterations) == 2
        assert report.masses.shape == (3,)
        assert np.allclose(report.window_ends, [0.5, 1.0])
        assert report.drift <= 1e-2

    @pytest.mark.parametrize(
        ("mu", "a", "p"),
        [(0.5j, 0.0, 1.5), (1.0, -0.5, 1.5), (1.0, 0.0, 2.0)],
    )
    def test_unsupported_problems_raise(self, mu: complex, a: float, p: float) -> None:
        """Continuation needs real mu, a >= 0 and a subcritical power."""
        with pytest.raises(InvalidParameterError):
            extend_in_time(_make_problem(mu=mu, a=a, p=p, nt=4), windows=1)

    def test_restart_preserves_grids(self) -> None:
        """on_window keeps x and z grids."""
        prob = _make_problem(p=1.5)
        moved = prob.on_window(prob.u0, TimeGrid(0.5, 4))
        assert isinstance(moved.u0, HalfSpaceField)
        assert moved.tgrid.T == 0.5
        assert moved.u0.zgrid.key == prob.u0.zgrid.key
