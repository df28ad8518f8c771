"""Weighted mixed Lebesgue norms of sampled fields.

The mixed norm L^m_(a,z) L^q_t L^r_x is evaluated innermost first: a Riemann sum over x,
trapezoid weights over t, the radial quadrature z^a dz over z. Infinite exponents are
maxima over the nodes; the z = 0 trace layer joins the maximum when the field carries one.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from bsns.analysis.exponents import weight_k
from bsns.exceptions import InvalidParameterError
from bsns.fields import HalfSpaceField, SpaceTimeField
from bsns.numerics.grids import CartesianGrid, TimeGrid

TimeCombination = Literal["single", "sum", "intersection"]
Weight = Literal["none", "k", "k_inverse"]

# Thresholds tried by sum_norm.
_SUM_NORM_LEVELS = 48


def _check_exponent(p: float) -> None:
    if not (p >= 1.0):
        raise InvalidParameterError(message=f"Lebesgue exponents must lie in [1, inf], got {p}")


def weighted_lp(values: NDArray, weights: NDArray, p: float, axis: int = -1) -> NDArray[np.float64]:
    """(sum w |f|^p)^(1/p) along axis; the maximum of |f| when p = inf."""
    _check_exponent(p)
    mag = np.abs(values)
    if math.isinf(p):
        return np.max(mag, axis=axis)
    moved = np.moveaxis(mag, axis, -1)
    return (moved**p @ weights) ** (1.0 / p)


def lebesgue_x(values: NDArray, xgrid: CartesianGrid, r: float) -> NDArray[np.float64]:
    """L^r norm over the leading d axes."""
    _check_exponent(r)
    mag = np.abs(values)
    axes = tuple(range(xgrid.d))
    if math.isinf(r):
        return np.max(mag, axis=axes)
    return (xgrid.cell_volume * np.sum(mag**r, axis=axes)) ** (1.0 / r)


def window_weights(tgrid: TimeGrid, window: float | None = None) -> NDArray[np.float64]:
    """Trapezoid weights on the nodes of [0, window]; nodes past the window get weight 0."""
    if window is None or window >= tgrid.T:
        return tgrid.weights
    if window <= 0.0:
        raise InvalidParameterError(message=f"Time window must be positive, got {window}")
    last = int(np.floor(window / tgrid.step + 1e-9))
    weights = np.zeros(tgrid.size)
    if last == 0:
        return weights
    weights[: last + 1] = tgrid.step
    weights[0] = weights[last] = 0.5 * tgrid.step
    return weights


def lebesgue_t(values: NDArray, weights: NDArray, q: float, axis: int = -1) -> NDArray[np.float64]:
    """L^q norm in time; with q = inf only nodes of positive weight count."""
    if math.isinf(q):
        active = weights > 0.0
        return np.max(np.compress(active, np.abs(values), axis=axis), axis=axis)
    return weighted_lp(values, weights, q, axis)


def trace_norm(values: NDArray, xgrid: CartesianGrid, tgrid: TimeGrid, q: float, r: float) -> float:
    """L^q_t L^r_x norm of samples shaped (Nx,)*d + (Nt+1,)."""
    return float(lebesgue_t(lebesgue_x(values, xgrid, r), tgrid.weights, q))


def halfspace_norm(u: HalfSpaceField, p: float = 2.0) -> float:
    """L^p norm of a half-space field against dx z^a dz."""
    return float(weighted_lp(lebesgue_x(u.values, u.xgrid, p), u.zgrid.weights, p))


def sum_norm(f: ArrayLike, q1: float, q2: float, weights: ArrayLike | None = None) -> float:
    """Upper bound for the norm of L^q1 + L^q2, inf over f = g + h of ||g||_q1 + ||h||_q2.

    Candidates split f at a level c: g = f 1{|f| > c}, h = f 1{|f| <= c}, with c on a
    geometric grid spanning the range of |f| plus the two trivial splits. The bound is
    within a factor 2 of the infimum.
    """
    if q1 > q2:
        raise InvalidParameterError(message=f"sum_norm needs q1 <= q2, got {q1} > {q2}")
    arr = np.abs(np.asarray(f, dtype=np.complex128))
    w = np.ones(arr.shape[-1]) if weights is None else np.asarray(weights, dtype=np.float64)

    best = min(float(weighted_lp(arr, w, q1)), float(weighted_lp(arr, w, q2)))
    positive = arr[arr > 0.0]
    if positive.size == 0:
        return 0.0
    for level in np.geomspace(positive.min(), positive.max(), _SUM_NORM_LEVELS):
        high = np.where(arr > level, arr, 0.0)
        candidate = float(weighted_lp(high, w, q1) + weighted_lp(arr - high, w, q2))
        best = min(best, candidate)
    return best


def intersection_norm(f: ArrayLike, q1: float, q2: float, weights: ArrayLike | None = None) -> float:
    """||f||_q1 + ||f||_q2, the norm of L^q1 and L^q2 intersected."""
    if q1 > q2:
        raise InvalidParameterError(message=f"intersection_norm needs q1 <= q2, got {q1} > {q2}")
    arr = np.asarray(f, dtype=np.complex128)
    w = np.ones(arr.shape[-1]) if weights is None else np.asarray(weights, dtype=np.float64)
    return float(weighted_lp(arr, w, q1) + weighted_lp(arr, w, q2))


@dataclass(frozen=True, slots=True)
class MixedNormSpec:
    """Exponents and options of a mixed norm L^m_(a,z) L^q_t L^r_x.

    Attributes:
        m: Outer exponent over z with weight z^a.
        q: Time exponent, the first of the pair when combining.
        r: Inner exponent over x.
        window: Restrict time to [0, window]; the whole grid when None.
        q_pair: Second time exponent for sum or intersection norms.
        combination: How q and q_pair combine in time.
        weight: Multiply by k(z) or 1/k(z) before the time norm (anomalous regime).
        include_trace: Let the z = 0 layer join an infinite outer exponent.
    """

    m: float
    q: float
    r: float
    window: float | None = None
    q_pair: float | None = None
    combination: TimeCombination = "single"
    weight: Weight = "none"
    include_trace: bool = True

    def __post_init__(self) -> None:
        for p in (self.m, self.q, self.r):
            _check_exponent(p)
        if self.combination != "single" and self.q_pair is None:
            raise InvalidParameterError(message=f"{self.combination} norm needs q_pair")


def _radial_weight(a: float, nodes: NDArray[np.float64], weight: Weight) -> NDArray[np.float64]:
    if weight == "none":
        return np.ones_like(nodes)
    k = weight_k(a, nodes)
    return k if weight == "k" else 1.0 / k


def _time_norm(values: NDArray, weights: NDArray, spec: MixedNormSpec) -> NDArray[np.float64]:
    if spec.combination == "single":
        return lebesgue_t(values, weights, spec.q)
    if spec.combination == "intersection":
        return lebesgue_t(values, weights, spec.q) + lebesgue_t(values, weights, spec.q_pair)
    low, high = sorted((spec.q, spec.q_pair))
    active = weights > 0.0
    rows = np.compress(active, values, axis=-1).reshape(-1, int(active.sum()))
    out = np.array([sum_norm(row, low, high, weights[active]) for row in rows])
    return out.reshape(values.shape[:-1])


def mixed_norm(F: SpaceTimeField, spec: MixedNormSpec) -> float:
    """Nested quadrature norm of a space-time field.

    Raises:
        InvalidParameterError: On invalid exponents, or a k-weight outside -1 < a < 0.
    """
    inner = lebesgue_x(F.values, F.xgrid, spec.r)  # (Nz, Nt+1)
    inner = inner * _radial_weight(F.a, F.zgrid.nodes, spec.weight)[:, None]
    weights = window_weights(F.tgrid, spec.window)
    per_layer = _time_norm(inner, weights, spec)

    if math.isinf(spec.m):
        value = float(np.max(per_layer))
        if spec.include_trace and F.trace is not None:
            # k(0+) = 1 in the anomalous regime
            trace_layer = _time_norm(lebesgue_x(F.trace, F.xgrid, spec.r)[None, :], weights, spec)
            value = max(value, float(trace_layer[0]))
        return value
    return float(weighted_lp(per_layer, F.zgrid.weights, spec.m))
