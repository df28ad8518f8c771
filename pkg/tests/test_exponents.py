"""Tests for exponent arithmetic."""

import math

import numpy as np
import pytest

from bsns.analysis.exponents import (
    INF,
    anomalous_gap,
    anomalous_pair,
    critical_p,
    diagonal_triple,
    dual_exponent,
    dual_triple,
    is_admissible,
    regime_of,
    restriction_dual_exponent,
    scaling_exponent,
    solve_q,
    subcritical_gain,
    weight_k,
)
from bsns.exceptions import InvalidParameterError


class TestDualExponent:
    """Tests for dual_exponent."""

    @pytest.mark.parametrize(("p", "expected"), [(2.0, 2.0), (3.0, 1.5), (1.0, INF), (INF, 1.0)])
    def test_values(self, p: float, expected: float) -> None:
        """1/p + 1/p' = 1, including the endpoints."""
        assert dual_exponent(p) == expected

    def test_below_one_raises(self) -> None:
        """Exponents below 1 have no conjugate."""
        with pytest.raises(InvalidParameterError):
            dual_exponent(0.5)


class TestAdmissibility:
    """Tests for is_admissible, scaling_exponent and solve_q."""

    @pytest.mark.parametrize(
        ("a", "d", "r", "expected"),
        [(0.0, 1, 3.0, 3.0), (0.5, 2, 2.0, 8.0 / 3.0), (-0.5, 1, 3.0, 3.0)],
    )
    def test_solve_q(self, a: float, d: int, r: float, expected: float) -> None:
        """q solving the relation with m = inf."""
        assert solve_q(a, d, r) == pytest.approx(expected)

    def test_solved_triple_is_admissible(self) -> None:
        """Feeding solve_q back into is_admissible closes the loop."""
        q = solve_q(0.5, 2, 2.2)
        triple = is_admissible(0.5, 2, q, 2.2, INF)
        assert triple.admissible
        assert abs(triple.residual) < 1e-12

    @pytest.mark.parametrize(("a", "d"), [(-0.5, 1), (0.0, 1), (0.5, 2), (2.0, 3)])
    def test_energy_triple_always_admissible(self, a: float, d: int) -> None:
        """(inf, 2, 2) satisfies both relations."""
        triple = is_admissible(a, d, INF, 2.0, 2.0)
        assert triple.admissible
        assert not triple.endpoint

    def test_diagonal_example(self) -> None:
        """(3, 3, inf) is admissible for a = 0, d = 1."""
        triple = is_admissible(0.0, 1, 3.0, 3.0, INF)
        assert triple.admissible
        assert triple.regime == "nonneg_a"

    def test_endpoint_is_flagged(self) -> None:
        """q = 2 satisfying the relation is an endpoint."""
        triple = is_admissible(0.0, 1, 2.0, INF, INF)
        assert triple.endpoint

    def test_wrong_triple_reports_residual(self) -> None:
        """A triple off the relation is not admissible and carries its residual."""
        triple = is_admissible(0.0, 1, 4.0, 3.0, INF)
        assert not triple.admissible
        assert triple.residual == pytest.approx(0.5 + 1.0 / 3.0 - 1.0)

    def test_small_r_is_not_admissible(self) -> None:
        """r below 2 fails even when the relation holds."""
        triple = is_admissible(0.0, 1, INF, 1.5, 6.0)
        assert abs(triple.residual) < 1e-12
        assert not triple.admissible

    def test_anomalous_regime_drops_a(self) -> None:
        """For a < 0 the transverse coefficient is 1."""
        assert regime_of(-0.5) == "anomalous_a"
        assert scaling_exponent(-0.5, 1, 4.0, 4.0, 2.0) == pytest.approx(0.5 + 0.25 + 0.5)
        assert scaling_exponent(-0.5, 1, 4.0, 4.0, 2.0, "nonneg_a") == pytest.approx(0.5 + 0.25 + 0.25)

    def test_r_outside_window_raises(self) -> None:
        """r must stay below 2d/(d+a-1)."""
        with pytest.raises(InvalidParameterError):
            solve_q(0.5, 2, 3.0)

    def test_endpoint_q_raises(self) -> None:
        """r = 2 with a = 0, d = 1 would need q = 2."""
        with pytest.raises(InvalidParameterError):
            solve_q(0.0, 1, 2.0)

    def test_r_below_two_raises(self) -> None:
        """r must be at least 2."""
        with pytest.raises(InvalidParameterError):
            solve_q(0.0, 1, 1.5)

    @pytest.mark.parametrize(("a", "d"), [(-1.0, 1), (0.0, 0), (float("nan"), 1)])
    def test_invalid_dimensions_raise(self, a: float, d: int) -> None:
        """a > -1 and d >= 1."""
        with pytest.raises(InvalidParameterError):
            is_admissible(a, d, 3.0, 3.0, INF)


class TestCriticalPowers:
    """Tests for critical_p, diagonal_triple, dual_triple and restriction_dual_exponent."""

    @pytest.mark.parametrize(("a", "d", "expected"), [(0.0, 1, 2.0), (-0.5, 1, 2.0), (0.0, 3, 1.5), (0.5, 1, 1.4)])
    def test_critical_p(self, a: float, d: int, expected: float) -> None:
        """Mass-critical power in both regimes."""
        assert critical_p(a, d) == pytest.approx(expected)

    def test_critical_p_needs_a_below_one(self) -> None:
        """There is no critical power for a >= 1."""
        with pytest.raises(InvalidParameterError):
            critical_p(1.0, 1)

    def test_diagonal_triple(self) -> None:
        """q = r = 3 with q' = 3/2 for a = 0, d = 1; 8/3 for a = -1/2, d = 2."""
        diagonal = diagonal_triple(0.0, 1)
        assert diagonal.q == pytest.approx(3.0)
        assert diagonal.r == diagonal.q
        assert diagonal.q_dual == pytest.approx(1.5)
        assert diagonal_triple(-0.5, 2).q == pytest.approx(8.0 / 3.0)

    def test_diagonal_triple_is_admissible(self) -> None:
        """The diagonal exponent satisfies the relation with m = inf."""
        diagonal = diagonal_triple(0.5, 2)
        assert is_admissible(0.5, 2, diagonal.q, diagonal.q, INF).admissible

    def test_dual_triple_at_critical_power(self) -> None:
        """(p q', p r') = (3, 3) for a = 0, d = 1, p = 2."""
        triple = dual_triple(0.0, 1, 2.0, 3.0, 3.0)
        assert triple.q == pytest.approx(3.0)
        assert triple.r == pytest.approx(3.0)
        assert triple.admissible

    def test_dual_triple_rejects_noncritical_power(self) -> None:
        """Only the critical power closes the estimate."""
        with pytest.raises(InvalidParameterError):
            dual_triple(0.0, 1, 1.5, 3.0, 3.0)

    def test_dual_triple_rejects_inadmissible_input(self) -> None:
        """(q, r, inf) must itself be admissible."""
        with pytest.raises(InvalidParameterError):
            dual_triple(0.0, 1, 2.0, 4.0, 3.0)

    def test_restriction_dual_exponent(self) -> None:
        """q' = 2(d+a+3)/(d+a+5)."""
        assert restriction_dual_exponent(0.0, 1) == pytest.approx(8.0 / 6.0)
        with pytest.raises(InvalidParameterError):
            restriction_dual_exponent(-0.5, 1)


class TestAnomalousRegime:
    """Tests for anomalous_pair, anomalous_gap, subcritical_gain and weight_k."""

    def test_anomalous_pair(self) -> None:
        """q solves the anomalous relation, q_inf the a >= 0 one, and q < q_inf."""
        q, q_inf = anomalous_pair(-0.5, 1, 3.0)
        assert q == pytest.approx(3.0)
        assert q_inf == pytest.approx(2.0 / (0.75 - 1.0 / 3.0))
        assert anomalous_gap(q, q_inf) > 0.0

    def test_anomalous_pair_needs_negative_a(self) -> None:
        """The pair exists only for -1 < a < 0."""
        with pytest.raises(InvalidParameterError):
            anomalous_pair(0.0, 1, 3.0)

    def test_subcritical_gain(self) -> None:
        """delta = 1/q' - p/q vanishes at the critical power on the diagonal."""
        assert subcritical_gain(2.0, 3.0) == pytest.approx(0.0, abs=1e-15)
        assert subcritical_gain(1.5, 3.0) == pytest.approx(2.0 / 3.0 - 0.5)

    def test_weight_k(self) -> None:
        """k(z) = min(1, z^(a/2))."""
        values = weight_k(-0.5, [0.5, 1.0, 4.0])
        assert np.allclose(values, [1.0, 1.0, 4.0**-0.25])
        assert values[2] == pytest.approx(0.707107, abs=1e-6)

    @pytest.mark.parametrize(("a", "z"), [(0.0, 1.0), (-1.0, 1.0), (-0.5, 0.0)])
    def test_weight_k_rejects_out_of_range(self, a: float, z: float) -> None:
        """k is defined for -1 < a < 0 and z > 0."""
        with pytest.raises(InvalidParameterError):
            weight_k(a, z)

    def test_reciprocal_of_infinity(self) -> None:
        """Infinite exponents contribute nothing to the scaling sum."""
        assert scaling_exponent(0.0, 1, INF, INF, INF) == 0.0
        assert math.isinf(dual_exponent(1.0))
