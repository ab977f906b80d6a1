"""Real-order Bessel, Hankel and gamma functions.

`bessel_j` switches between three regimes:

* the ascending power series for x <= BESSEL_SERIES_MAX_X,
* the Hankel asymptotic expansion for x >= max(BESSEL_ASYMPTOTIC_MIN_X, nu**2),
* scipy's uniform-asymptotic and recurrence evaluation in between.

`bessel_i` is evaluated by quadrature of its integral representation and is kept
independent from the series used in the tests.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ab_riesz.config import (
    BESSEL_ASYMPTOTIC_MIN_X,
    BESSEL_ASYMPTOTIC_TERMS,
    BESSEL_I_MAX_ARGUMENT,
    BESSEL_I_MAX_ORDER,
    BESSEL_MAX_ARGUMENT,
    BESSEL_MAX_ORDER,
    BESSEL_SERIES_MAX_X,
    BESSEL_SERIES_TERMS,
    GAMMA_MAX_ARGUMENT,
    Y0_SERIES_MAX_X,
)
from ab_riesz.errors import DomainError, SpecialFunctionRangeError
from ab_riesz.quadrature import integrate_adaptive, integrate_semi_infinite


logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps
_MIDDLE_RELATIVE_ERROR = 1e-14


@dataclass(frozen=True)
class SpecFunResult:
    """A special-function value with an absolute error estimate.

    Attributes:
        value (float | complex | np.ndarray): Function value(s).
        abs_error_estimate (float | np.ndarray): Absolute error estimate(s), >= 0.
    """

    value: float | complex | np.ndarray
    abs_error_estimate: float | np.ndarray


def _unwrap(array: np.ndarray, *, scalar: bool) -> float | complex | np.ndarray:
    if scalar:
        return array.item()
    return array


def gamma(x: float) -> float:
    """Gamma function for positive real arguments.

    Args:
        x (float): Argument, 0 < x <= 171.

    Returns:
        float: Gamma(x).

    Raises:
        DomainError: If x is not finite and positive.
        SpecialFunctionRangeError: If Gamma(x) overflows.

    >>> gamma(5.0)
    24.0
    """
    if not (math.isfinite(x) and x > 0):
        error_message = f"gamma requires a finite positive argument, got {x}"
        raise DomainError(error_message)
    if x > GAMMA_MAX_ARGUMENT:
        error_message = f"gamma({x}) overflows double precision"
        raise SpecialFunctionRangeError(error_message)
    return float(special.gamma(x))


def _check_box(nu: np.ndarray, x: np.ndarray, max_order: float, max_argument: float) -> None:
    if not (np.all(np.isfinite(nu)) and np.all(np.isfinite(x))):
        error_message = "Bessel arguments must be finite"
        raise DomainError(error_message)
    if np.any(nu < 0) or np.any(nu > max_order):
        error_message = f"Bessel order outside [0, {max_order:g}]: {np.min(nu):g}..{np.max(nu):g}"
        raise DomainError(error_message)
    if np.any(x < 0) or np.any(x > max_argument):
        error_message = (
            f"Bessel argument outside [0, {max_argument:g}]: {np.min(x):g}..{np.max(x):g}"
        )
        raise DomainError(error_message)


def _as_arrays(nu: float | np.ndarray, x: float | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    arrays = np.broadcast_arrays(np.asarray(nu, dtype=float), np.asarray(x, dtype=float))
    return arrays[0], arrays[1]


def _series_j(nu: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending series sum (-x**2/4)**m / (m! Gamma(m + nu + 1)) * (x/2)**nu."""
    quarter = -0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    absolute = np.ones_like(x)
    for m in range(1, BESSEL_SERIES_TERMS + 1):
        term = term * quarter / (m * (nu + m))
        total = total + term
        absolute = absolute + np.abs(term)
        if np.all(np.abs(term) <= _EPS * np.abs(total)):
            break
    positive = np.where(x > 0, x, 1.0)
    log_prefactor = nu * np.log(0.5 * positive) - special.gammaln(nu + 1.0)
    at_origin = np.where(nu == 0, 1.0, 0.0)
    prefactor = np.where(x > 0, np.exp(log_prefactor), at_origin)
    value = prefactor * total
    error = prefactor * (4.0 * _EPS * absolute + np.abs(term))
    return value, error


def _hankel_pq(nu: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hankel's asymptotic P and Q series with the last retained term as error."""
    mu = 4.0 * nu * nu
    p_sum = np.ones_like(x)
    q_sum = np.zeros_like(x)
    term = np.ones_like(x)
    previous = np.full_like(x, np.inf)
    active = np.ones_like(x, dtype=bool)
    for k in range(1, BESSEL_ASYMPTOTIC_TERMS + 1):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        magnitude = np.abs(term)
        active = active & (magnitude < previous)
        if not np.any(active):
            break
        contribution = np.where(active, term, 0.0)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q_sum = q_sum + sign * contribution
        else:
            p_sum = p_sum + sign * contribution
        previous = np.where(active, magnitude, previous)
        if np.all(magnitude <= _EPS):
            break
    error = np.where(np.isfinite(previous), previous, 0.0) + 4.0 * _EPS
    return p_sum, q_sum, error


def _asymptotic_j(nu: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p_sum, q_sum, error = _hankel_pq(nu, x)
    omega = x - (0.5 * nu + 0.25) * np.pi
    amplitude = np.sqrt(2.0 / (np.pi * x))
    return amplitude * (p_sum * np.cos(omega) - q_sum * np.sin(omega)), amplitude * error


def bessel_j_result(nu: float | np.ndarray, x: float | np.ndarray) -> SpecFunResult:
    """Bessel function of the first kind with an error estimate.

    Args:
        nu (float | np.ndarray): Order, 0 <= nu <= 200.
        x (float | np.ndarray): Argument, 0 <= x <= 1e5.

    Returns:
        SpecFunResult: J_nu(x) and its absolute error estimate, broadcast over inputs.

    Raises:
        DomainError: Outside the supported (nu, x) box.
    """
    scalar = np.ndim(nu) == 0 and np.ndim(x) == 0
    nu_array, x_array = _as_arrays(nu, x)
    _check_box(nu_array, x_array, BESSEL_MAX_ORDER, BESSEL_MAX_ARGUMENT)
    value = np.empty(nu_array.shape)
    error = np.empty(nu_array.shape)

    series = x_array <= BESSEL_SERIES_MAX_X
    asymptotic = ~series & (x_array >= np.maximum(BESSEL_ASYMPTOTIC_MIN_X, nu_array**2))
    middle = ~series & ~asymptotic
    if np.any(series):
        value[series], error[series] = _series_j(nu_array[series], x_array[series])
    if np.any(asymptotic):
        value[asymptotic], error[asymptotic] = _asymptotic_j(
            nu_array[asymptotic], x_array[asymptotic]
        )
    if np.any(middle):
        value[middle] = special.jv(nu_array[middle], x_array[middle])
        amplitude = np.sqrt(2.0 / (np.pi * x_array[middle]))
        error[middle] = _MIDDLE_RELATIVE_ERROR * (np.abs(value[middle]) + amplitude)
    return SpecFunResult(_unwrap(value, scalar=scalar), _unwrap(error, scalar=scalar))


def bessel_j(nu: float | np.ndarray, x: float | np.ndarray) -> float | np.ndarray:
    """Bessel function of the first kind J_nu(x) for real order and argument.

    Args:
        nu (float | np.ndarray): Order, 0 <= nu <= 200.
        x (float | np.ndarray): Argument, 0 <= x <= 1e5.

    Returns:
        float | np.ndarray: J_nu(x).

    >>> bessel_j(0.0, 0.0)
    1.0
    """
    return bessel_j_result(nu, x).value


def bessel_i_result(nu: float, x: float, tol: float = 1e-13) -> SpecFunResult:
    """Modified Bessel function I_nu(x) from its integral representation.

    I_nu(x) = (1/pi) int_0^pi exp(x cos s) cos(nu s) ds
              - (sin(nu pi)/pi) int_0^inf exp(-x cosh s - nu s) ds.

    Args:
        nu (float): Order, 0 <= nu <= 50.
        x (float): Argument, 0 <= x <= 50.
        tol (float): Relative quadrature tolerance.

    Returns:
        SpecFunResult: I_nu(x) with the combined quadrature error.

    Raises:
        DomainError: Negative or non-finite arguments, or nu > 50.
        SpecialFunctionRangeError: For x > 50.
    """
    if not (math.isfinite(nu) and math.isfinite(x)) or nu < 0 or x < 0 or nu > BESSEL_I_MAX_ORDER:
        error_message = (
            f"bessel_i requires 0 <= nu <= {BESSEL_I_MAX_ORDER:g} and x >= 0, got ({nu}, {x})"
        )
        raise DomainError(error_message)
    if x > BESSEL_I_MAX_ARGUMENT:
        error_message = f"bessel_i({nu}, {x}) overflows: x > {BESSEL_I_MAX_ARGUMENT:g}"
        raise SpecialFunctionRangeError(error_message)

    oscillatory = integrate_adaptive(
        lambda s: np.exp(x * np.cos(s)) * np.cos(nu * s), 0.0, math.pi, tol
    )
    value = oscillatory.value / math.pi
    error = oscillatory.error_estimate / math.pi
    sine = math.sin(nu * math.pi)
    if nu != math.floor(nu):
        decaying = integrate_semi_infinite(
            lambda s: np.exp(-x * np.cosh(np.minimum(s, 700.0)) - nu * s), nu + x, tol
        )
        value -= sine * decaying.value / math.pi
        error += abs(sine) * decaying.error_estimate / math.pi
    return SpecFunResult(float(value), float(error))


def bessel_i(nu: float, x: float) -> float:
    """Modified Bessel function of the first kind I_nu(x).

    Args:
        nu (float): Order, 0 <= nu <= 50.
        x (float): Argument, 0 <= x <= 50.

    Returns:
        float: I_nu(x).
    """
    return bessel_i_result(nu, x).value


def bessel_y0(x: float | np.ndarray) -> float | np.ndarray:
    """Bessel function of the second kind of order zero.

    Args:
        x (float | np.ndarray): Positive argument(s), x <= 1e5.

    Returns:
        float | np.ndarray: Y_0(x).

    Raises:
        DomainError: For x <= 0.
    """
    scalar = np.ndim(x) == 0
    x_array = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(x_array) & (x_array > 0) & (x_array <= BESSEL_MAX_ARGUMENT)):
        error_message = "Y_0 requires 0 < x <= 1e5 (logarithmic singularity at 0)"
        raise DomainError(error_message)
    value = np.empty_like(x_array)
    small = x_array <= Y0_SERIES_MAX_X
    if np.any(small):
        xs = x_array[small]
        quarter = 0.25 * xs * xs
        term = np.ones_like(xs)
        harmonic = 0.0
        total = np.zeros_like(xs)
        for m in range(1, BESSEL_SERIES_TERMS + 1):
            term = -term * quarter / (m * m)
            harmonic += 1.0 / m
            total = total - harmonic * term
            if np.all(np.abs(harmonic * term) <= _EPS * np.abs(total)):
                break
        j0 = _series_j(np.zeros_like(xs), xs)[0]
        value[small] = (2.0 / np.pi) * ((np.log(0.5 * xs) + np.euler_gamma) * j0 + total)
    if np.any(~small):
        xl = x_array[~small]
        p_sum, q_sum, _ = _hankel_pq(np.zeros_like(xl), xl)
        omega = xl - 0.25 * np.pi
        amplitude = np.sqrt(2.0 / (np.pi * xl))
        value[~small] = amplitude * (p_sum * np.sin(omega) + q_sum * np.cos(omega))
    return _unwrap(value, scalar=scalar)


def hankel1_0(x: float | np.ndarray) -> complex | np.ndarray:
    """Hankel function of the first kind of order zero, J_0(x) + i Y_0(x).

    Args:
        x (float | np.ndarray): Positive argument(s).

    Returns:
        complex | np.ndarray: H_0^(1)(x).

    Raises:
        DomainError: For x <= 0.
    """
    y0 = bessel_y0(x)
    return bessel_j(0.0, x) + 1j * y0


def hankel1(nu: float | np.ndarray, x: float | np.ndarray) -> complex | np.ndarray:
    """Hankel function of the first kind of real order.

    Args:
        nu (float | np.ndarray): Order, 0 <= nu <= 200.
        x (float | np.ndarray): Positive argument.

    Returns:
        complex | np.ndarray: H_nu^(1)(x).

    Raises:
        DomainError: Outside the supported box or for x <= 0.
    """
    scalar = np.ndim(nu) == 0 and np.ndim(x) == 0
    nu_array, x_array = _as_arrays(nu, x)
    _check_box(nu_array, x_array, BESSEL_MAX_ORDER, BESSEL_MAX_ARGUMENT)
    if np.any(x_array <= 0):
        error_message = "H_nu^(1) requires x > 0"
        raise DomainError(error_message)
    return _unwrap(np.asarray(special.hankel1(nu_array, x_array)), scalar=scalar)


def hankel1_envelope(nu: float, x: float | np.ndarray) -> complex | np.ndarray:
    """Slowly varying envelope H_nu^(1)(x) * exp(-i x).

    Uses Hankel's expansion sqrt(2/(pi x)) (P + i Q) exp(-i(nu pi/2 + pi/4)) once
    x >= max(35, nu**2), and scipy's Hankel function below. The expansion only improves
    with x, so the argument is not capped.

    Args:
        nu (float): Order, 0 <= nu <= 200.
        x (float | np.ndarray): Positive finite argument(s).

    Returns:
        complex | np.ndarray: The envelope.

    Raises:
        DomainError: For x <= 0 or an order outside [0, 200].
    """
    scalar = np.ndim(x) == 0
    x_array = np.atleast_1d(np.asarray(x, dtype=float))
    nu_array = np.full_like(x_array, nu)
    _check_box(nu_array, x_array, BESSEL_MAX_ORDER, math.inf)
    if np.any(x_array <= 0):
        error_message = "The Hankel envelope requires x > 0"
        raise DomainError(error_message)
    envelope = np.empty(x_array.shape, dtype=complex)
    far = x_array >= max(BESSEL_ASYMPTOTIC_MIN_X, nu * nu)
    if np.any(far):
        p_sum, q_sum, _ = _hankel_pq(nu_array[far], x_array[far])
        phase = np.exp(-1j * (0.5 * nu + 0.25) * np.pi)
        envelope[far] = np.sqrt(2.0 / (np.pi * x_array[far])) * (p_sum + 1j * q_sum) * phase
    if np.any(~far):
        near = x_array[~far]
        envelope[~far] = special.hankel1(nu, near) * np.exp(-1j * near)
    return _unwrap(envelope, scalar=scalar)
