"""Special functions of fractional order.

Thin, validated wrappers over scipy.special plus the pieces scipy does not ship:
- bessel_j_scaled: x^(-nu) J_nu(x), finite at x = 0
- bessel_zeros: positive zeros of J_nu for real nu > -1
- oscillatory_gamma / oscillatory_tail: integrals of u^(mu-1) e^(iu) over (0, inf) and (A, inf)
"""

import logging
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import optimize, special

from bsns.exceptions import InvalidParameterError, NumericalFailureError

logger = logging.getLogger(__name__)

# Beyond this argument J_nu is not certified to 1e-9.
MAX_BESSEL_ARGUMENT = 1.0e6

# Below this argument x^(-nu) J_nu(x) is evaluated through 0F1.
_SCALED_SERIES_CUTOFF = 2.0

# Above this argument the oscillatory tail uses its asymptotic series.
_TAIL_ASYMPTOTIC_CUTOFF = 40.0
_TAIL_QUADRATURE_NODES = 96
_TAIL_SERIES_TERMS = 60
_TAIL_CHUNK = 8192


def _check_order(nu: float) -> None:
    if not np.isfinite(nu) or nu <= -1.0:
        raise InvalidParameterError(message=f"Bessel order must satisfy nu > -1, got {nu}")


def _check_argument(x: NDArray[np.float64]) -> None:
    if np.any(x < 0.0) or not np.all(np.isfinite(x)):
        raise InvalidParameterError(message="Bessel argument must be finite and nonnegative")
    if np.any(x > MAX_BESSEL_ARGUMENT):
        raise NumericalFailureError(
            message=f"Bessel argument {float(np.max(x)):.3e} beyond supported range {MAX_BESSEL_ARGUMENT:.1e}"
        )


def bessel_j(nu: float, x: ArrayLike) -> NDArray[np.float64]:
    """Bessel function of the first kind J_nu(x) for real nu > -1 and x >= 0.

    At x = 0 with nu < 0 the value is infinite; use bessel_j_scaled there.

    Raises:
        InvalidParameterError: If nu <= -1 or x is negative.
        NumericalFailureError: If x exceeds MAX_BESSEL_ARGUMENT.
    """
    _check_order(nu)
    arr = np.asarray(x, dtype=np.float64)
    _check_argument(arr)
    return special.jv(nu, arr)


def bessel_j_scaled(nu: float, x: ArrayLike) -> NDArray[np.float64]:
    """The entire function x^(-nu) J_nu(x), equal to 2^(-nu)/Gamma(nu+1) at x = 0.

    Small arguments go through the confluent limit function 0F1(; nu+1; -x^2/4),
    which has no cancellation at the origin.
    """
    _check_order(nu)
    arr = np.asarray(x, dtype=np.float64)
    _check_argument(arr)

    small = arr <= _SCALED_SERIES_CUTOFF
    out = np.empty_like(arr)
    out[small] = special.hyp0f1(nu + 1.0, -0.25 * arr[small] ** 2) * 2.0 ** (-nu) / special.gamma(nu + 1.0)
    large = ~small
    out[large] = special.jv(nu, arr[large]) * arr[large] ** (-nu)
    return out


def gamma_fn(x: ArrayLike) -> NDArray[np.float64]:
    """Gamma function for real arguments away from the poles.

    Raises:
        InvalidParameterError: If any argument is a nonpositive integer.
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any((arr <= 0.0) & (arr == np.round(arr))):
        raise InvalidParameterError(message=f"Gamma has a pole at nonpositive integers, got {x}")
    return special.gamma(arr)


def _mcmahon_guess(nu: float, k: NDArray[np.float64]) -> NDArray[np.float64]:
    beta = (k + 0.5 * nu - 0.25) * np.pi
    mu = 4.0 * nu * nu
    return beta - (mu - 1.0) / (8.0 * beta) - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * beta) ** 3)


@lru_cache(maxsize=64)
def _bessel_zeros_cached(nu: float, n: int) -> tuple[float, ...]:
    # Scan for sign changes up to past the asymptotic n-th zero, then polish with brentq.
    upper = float(_mcmahon_guess(nu, np.array([n + 1.0]))[0]) + np.pi
    step = 0.05
    xs = np.arange(1.0e-4, upper + step, step)
    vals = special.jv(nu, xs)
    brackets = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if len(brackets) < n:
        raise NumericalFailureError(message=f"Found only {len(brackets)} of {n} zeros of J_{nu}")

    rtol = 4 * np.finfo(float).eps
    zeros = []
    for idx in brackets[:n]:
        root = optimize.brentq(lambda s: special.jv(nu, s), xs[idx], xs[idx + 1], xtol=1e-15, rtol=rtol)
        zeros.append(float(root))
    return tuple(zeros)


def bessel_zeros(nu: float, n: int) -> NDArray[np.float64]:
    """First n positive zeros of J_nu, strictly increasing.

    Args:
        nu: Bessel order, nu > -1.
        n: Number of zeros, n >= 1.

    Returns:
        Array of shape (n,).
    """
    _check_order(nu)
    if n < 1:
        raise InvalidParameterError(message=f"Number of zeros must be positive, got {n}")
    return np.array(_bessel_zeros_cached(float(nu), int(n)))


def oscillatory_gamma(mu: float, b: float) -> complex:
    """Integral of y^(mu-1) e^(iby) over (0, inf) = Gamma(mu) |b|^(-mu) e^(+-i mu pi/2).

    Negative b gives the complex conjugate of the value at |b|.
    """
    if not 0.0 < mu < 1.0:
        raise InvalidParameterError(message=f"oscillatory_gamma needs 0 < mu < 1, got {mu}")
    if b == 0.0 or not np.isfinite(b):
        raise InvalidParameterError(message=f"oscillatory_gamma needs nonzero finite b, got {b}")
    value = special.gamma(mu) * abs(b) ** (-mu) * np.exp(0.5j * mu * np.pi)
    return complex(value if b > 0 else np.conj(value))


@lru_cache(maxsize=128)
def _jacobi_rule(n: int, beta: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    nodes, weights = special.roots_jacobi(n, 0.0, beta)
    return nodes, weights


def _tail_asymptotic(mu: float, A: NDArray[np.float64]) -> NDArray[np.complex128]:
    # i e^{iA} A^{mu-1} sum_n i^n (mu-1)(mu-2)...(mu-n) / A^n
    total = np.ones_like(A, dtype=np.complex128)
    term = np.ones_like(A, dtype=np.complex128)
    for n in range(1, _TAIL_SERIES_TERMS + 1):
        term = term * 1j * (mu - n) / A
        total = total + term
        if np.all(np.abs(term) < 1e-17):
            break
    return 1j * np.exp(1j * A) * A ** (mu - 1.0) * total


def _tail_unit_interval(mu: float, A: NDArray[np.float64]) -> NDArray[np.complex128]:
    # 0 < mu < 1: complete integral minus Gauss-Jacobi quadrature over (0, A), in row chunks.
    nodes, weights = _jacobi_rule(_TAIL_QUADRATURE_NODES, mu - 1.0)
    head = np.empty(A.shape, dtype=np.complex128)
    for start in range(0, len(A), _TAIL_CHUNK):
        chunk = A[start : start + _TAIL_CHUNK]
        u = 0.5 * chunk[:, None] * (1.0 + nodes[None, :])
        head[start : start + _TAIL_CHUNK] = (0.5 * chunk) ** mu * (np.exp(1j * u) @ weights)
    return special.gamma(mu) * np.exp(0.5j * mu * np.pi) - head


def _tail(mu: float, A: NDArray[np.float64]) -> NDArray[np.complex128]:
    out = np.empty(A.shape, dtype=np.complex128)
    far = A >= _TAIL_ASYMPTOTIC_CUTOFF
    if np.any(far):
        out[far] = _tail_asymptotic(mu, A[far])
    near = ~far
    if np.any(near):
        An = A[near]
        if mu > 0.0:
            out[near] = _tail_unit_interval(mu, An)
        else:
            # Integration by parts raises mu by one.
            out[near] = -(An**mu) * np.exp(1j * An) / mu - (1j / mu) * _tail(mu + 1.0, An)
    return out


def oscillatory_tail(mu: float, A: ArrayLike) -> NDArray[np.complex128]:
    """Incomplete oscillatory integral of u^(mu-1) e^(iu) over (A, inf).

    Args:
        mu: Exponent, mu < 1 and not a nonpositive integer.
        A: Lower limit(s), A > 0.

    Returns:
        Complex array with the shape of A.
    """
    if mu >= 1.0 or (mu <= 0.0 and mu == round(mu)):
        raise InvalidParameterError(message=f"oscillatory_tail needs mu < 1 and mu not in -N, got {mu}")
    arr = np.asarray(A, dtype=np.float64)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise InvalidParameterError(message="oscillatory_tail needs finite A > 0")
    flat = arr.reshape(-1)
    return _tail(float(mu), flat).reshape(arr.shape)
