"""Exponent arithmetic: admissible triples, critical powers, diagonal and dual triples.

Two regimes share the code. For a >= 0 a triple (q, r, m) is admissible when
2/q + d/r + (a+1)/m = (d+a+1)/2; for -1 < a < 0 the transverse variable behaves like
one extra Euclidean dimension and the relation reads 2/q + d/r + 1/m = (d+1)/2.
Infinite exponents are plain float("inf").
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from bsns.exceptions import InvalidParameterError

Regime = Literal["nonneg_a", "anomalous_a"]

# Relations are considered satisfied below this residual.
ADMISSIBLE_TOLERANCE = 1e-12

INF = math.inf


def regime_of(a: float) -> Regime:
    return "nonneg_a" if a >= 0.0 else "anomalous_a"


def reciprocal(p: float) -> float:
    """1/p with 1/inf = 0."""
    return 0.0 if math.isinf(p) else 1.0 / p


def dual_exponent(p: float) -> float:
    """Hölder conjugate p' with 1/p + 1/p' = 1."""
    if p < 1.0:
        raise InvalidParameterError(message=f"Exponent must be >= 1, got {p}")
    if p == 1.0:
        return INF
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True, slots=True)
class ExponentTriple:
    """A triple (q, r, m) classified against its regime's admissibility relation.

    Attributes:
        q: Time exponent.
        r: Tangential exponent.
        m: Transverse exponent.
        regime: Which relation applies.
        residual: Left minus right side of the relation.
        admissible: Relation holds and r, m >= 2.
        endpoint: The relation holds at q = 2, where the estimates are excluded.
    """

    q: float
    r: float
    m: float
    regime: Regime
    residual: float
    admissible: bool
    endpoint: bool = False


def scaling_exponent(a: float, d: int, q: float, r: float, m: float, regime: Regime | None = None) -> float:
    """2/q + d/r + (a+1)/m, or 2/q + d/r + 1/m in the anomalous regime."""
    regime = regime or regime_of(a)
    transverse = (a + 1.0) if regime == "nonneg_a" else 1.0
    return 2.0 * reciprocal(q) + d * reciprocal(r) + transverse * reciprocal(m)


def _target(a: float, d: int, regime: Regime) -> float:
    return 0.5 * (d + a + 1.0) if regime == "nonneg_a" else 0.5 * (d + 1.0)


def _check_dimensions(a: float, d: int) -> None:
    if not np.isfinite(a) or a <= -1.0:
        raise InvalidParameterError(message=f"a must satisfy a > -1, got {a}")
    if d < 1:
        raise InvalidParameterError(message=f"d must be >= 1, got {d}")


def is_admissible(a: float, d: int, q: float, r: float, m: float, regime: Regime | None = None) -> ExponentTriple:
    """Classify (q, r, m) against the admissibility relation of its regime.

    Args:
        a: Bessel parameter.
        d: Tangential dimension.
        q, r, m: Exponents in [1, inf].
        regime: Defaults to the regime of a.

    Returns:
        The classified triple; its residual is left minus right side of the relation.
    """
    _check_dimensions(a, d)
    regime = regime or regime_of(a)
    residual = scaling_exponent(a, d, q, r, m, regime) - _target(a, d, regime)
    holds = abs(residual) < ADMISSIBLE_TOLERANCE
    return ExponentTriple(
        q=q,
        r=r,
        m=m,
        regime=regime,
        residual=residual,
        admissible=holds and r >= 2.0 and m >= 2.0,
        endpoint=holds and q == 2.0,
    )


def solve_q(a: float, d: int, r: float, regime: Regime | None = None) -> float:
    """The q making (q, r, inf) admissible.

    With regime="nonneg_a" and a < 0 this returns the q_inf partner of the anomalous pair.

    Raises:
        InvalidParameterError: If r is outside its window or q would be <= 2.
    """
    _check_dimensions(a, d)
    regime = regime or regime_of(a)
    if r < 2.0:
        raise InvalidParameterError(message=f"r must be >= 2, got {r}")

    effective = d + a - 1.0 if regime == "nonneg_a" else d - 1.0
    if effective > 0.0 and r >= 2.0 * d / effective:
        raise InvalidParameterError(message=f"r = {r} outside the window r < {2.0 * d / effective:g}")

    two_over_q = _target(a, d, regime) - d * reciprocal(r)
    if two_over_q >= 1.0:
        raise InvalidParameterError(message=f"(q, {r}, inf) admissible only with q <= 2 (endpoint excluded)")
    if two_over_q <= 0.0:
        raise InvalidParameterError(message=f"No finite q makes (q, {r}, inf) admissible")
    return 2.0 / two_over_q


def anomalous_pair(a: float, d: int, r: float) -> tuple[float, float]:
    """(q, q_inf) for -1 < a < 0: q from the anomalous relation, q_inf from the a >= 0 relation."""
    if not -1.0 < a < 0.0:
        raise InvalidParameterError(message=f"Anomalous pair needs -1 < a < 0, got {a}")
    return solve_q(a, d, r, "anomalous_a"), solve_q(a, d, r, "nonneg_a")


def critical_p(a: float, d: int) -> float:
    """Mass-critical power: 1 + 2(1-a)/(d+a+1) for 0 <= a < 1, 1 + 2/(d+1) for -1 < a < 0."""
    _check_dimensions(a, d)
    if a >= 1.0:
        raise InvalidParameterError(message=f"Critical power needs a < 1, got {a}")
    if a >= 0.0:
        return 1.0 + 2.0 * (1.0 - a) / (d + a + 1.0)
    return 1.0 + 2.0 / (d + 1.0)


@dataclass(frozen=True, slots=True)
class DiagonalTriple:
    """The diagonal admissible exponent q = r (with m = inf) and its dual.

    Attributes:
        q: Equal time and tangential exponent.
        q_dual: Its Hölder conjugate.
    """

    q: float
    q_dual: float

    @property
    def r(self) -> float:
        return self.q


def diagonal_triple(a: float, d: int) -> DiagonalTriple:
    """q = r = 2(d+2)/(d+a+1) for a >= 0, 2(d+2)/(d+1) for a < 0."""
    _check_dimensions(a, d)
    q = 2.0 * (d + 2.0) / (d + a + 1.0) if a >= 0.0 else 2.0 * (d + 2.0) / (d + 1.0)
    return DiagonalTriple(q=q, q_dual=dual_exponent(q))


def dual_triple(a: float, d: int, p: float, q: float, r: float) -> ExponentTriple:
    """The triple (p q', p r', inf) controlling the boundary nonlinearity at the critical power.

    Raises:
        InvalidParameterError: If (q, r, inf) is not admissible or p is not critical.
    """
    given = is_admissible(a, d, q, r, INF)
    if not given.admissible:
        raise InvalidParameterError(message=f"({q}, {r}, inf) is not admissible (residual {given.residual:.3e})")
    p_c = critical_p(a, d)
    if abs(p - p_c) > 1e-12:
        raise InvalidParameterError(message=f"dual_triple needs the critical power {p_c:g}, got {p}")
    return is_admissible(a, d, p * dual_exponent(q), p * dual_exponent(r), INF)


def restriction_dual_exponent(a: float, d: int) -> float:
    """q' = 2(d+a+3)/(d+a+5), the dual of the diagonal triple (q, q, q)."""
    if a < 0.0:
        raise InvalidParameterError(message=f"Restriction exponents need a >= 0, got {a}")
    return 2.0 * (d + a + 3.0) / (d + a + 5.0)


def subcritical_gain(p: float, q: float) -> float:
    """delta = 1/q' - p/q, the power of T gained below the critical power."""
    return reciprocal(dual_exponent(q)) - p * reciprocal(q)


def anomalous_gap(q: float, q_inf: float) -> float:
    """gamma = 1/q - 1/q_inf, positive in the anomalous regime."""
    return reciprocal(q) - reciprocal(q_inf)


def weight_k(a: float, z: ArrayLike) -> NDArray[np.float64]:
    """k(z) = min(1, z^(a/2)) for -1 < a < 0; identically 1 on (0, 1].

    Raises:
        InvalidParameterError: If a is outside (-1, 0) or z <= 0.
    """
    if not -1.0 < a < 0.0:
        raise InvalidParameterError(message=f"weight_k needs -1 < a < 0, got {a}")
    arr = np.asarray(z, dtype=np.float64)
    if np.any(arr <= 0.0):
        raise InvalidParameterError(message="weight_k needs z > 0")
    return np.minimum(1.0, arr ** (0.5 * a))
