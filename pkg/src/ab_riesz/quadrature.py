"""Adaptive quadrature engines.

Three integrators cover every integral of the library:

* `integrate_adaptive`: globally adaptive Gauss-Kronrod (7/15) bisection on a finite
  interval. Integrands are vectorized and may be vector valued, the last axis being
  the evaluation points.
* `integrate_semi_infinite`: exponentially decaying integrands on [0, inf), truncated
  where the validated decay bound falls below the tolerance.
* `integrate_oscillatory_tail`: integrands whose oscillation is driven by a monotone
  phase u = phi(s). The near segment is integrated in s, the far segment in u where the
  oscillation is uniform, and the remainder by integration by parts on the envelope.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi

from ab_riesz.config import (
    DEFAULT_TOL,
    QUAD_FAR_PHASE_SPAN,
    QUAD_MAX_INTERVALS,
    QUAD_NEAR_PHASE_SPAN,
    QUAD_PROBE_COUNT,
    QUAD_TRUNCATION_MARGIN,
)
from ab_riesz.errors import DecayHypothesisError, DomainError, QuadratureConvergenceError


logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]
Envelopes = Callable[[np.ndarray], list[tuple[float, np.ndarray]]]

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_GAUSS_ON_KRONROD = np.zeros(8)
_GAUSS_ON_KRONROD[1::2] = _WG

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_WEIGHTS = np.concatenate([_GAUSS_ON_KRONROD[:-1], _GAUSS_ON_KRONROD[::-1]])
_ROUNDING_FLOOR = 50.0 * np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    """Outcome of a quadrature.

    Attributes:
        value (float | complex | np.ndarray): Integral, one entry per integrand component.
        error_estimate (float): Upper estimate of the absolute error (max over components).
        evaluations (int): Number of integrand evaluations.
    """

    value: float | complex | np.ndarray
    error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class PhaseMap:
    """Monotone phase u = forward(s) driving the oscillation of a semi-infinite integrand.

    Written in u, the integrand f(s(u)) / rate(s(u)) equals the sum of
    exp(i * omega * u) * G(u) over the pairs (omega, G) returned by `envelopes(u)`,
    where each G varies slowly. `frequency` is the common |omega|.
    """

    forward: Integrand
    inverse: Integrand
    rate: Integrand
    envelopes: Envelopes
    frequency: float = 1.0


def _scalarize(value: np.ndarray) -> float | complex | np.ndarray:
    if value.ndim == 0:
        return value.item()
    return value


def _gauss_kronrod(
    f: Integrand, left: np.ndarray, right: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Apply the 7/15 pair on every interval at once.

    Returns:
        tuple[np.ndarray, np.ndarray, np.ndarray]: Kronrod values (..., n), truncation
        error estimates (n,) and rounding floors (n,).
    """
    center = 0.5 * (left + right)
    half = 0.5 * (right - left)
    nodes = center[:, None] + half[:, None] * _NODES
    samples = np.asarray(f(nodes.ravel()))
    samples = np.broadcast_to(samples, (*samples.shape[:-1], nodes.size))
    samples = samples.reshape(*samples.shape[:-1], left.size, _NODES.size)
    if not np.all(np.isfinite(samples)):
        finite = np.isfinite(samples).reshape(-1, left.size, _NODES.size).all(axis=(0, 2))
        bad = np.flatnonzero(~finite)
        interval = (float(left[bad[0]]), float(right[bad[0]]))
        error_message = f"Integrand is not finite on [{interval[0]:.6g}, {interval[1]:.6g}]"
        raise QuadratureConvergenceError(error_message, interval, math.inf)
    kronrod = (samples @ _KRONROD_WEIGHTS) * half
    gauss = (samples @ _GAUSS_WEIGHTS) * half
    resabs = (np.abs(samples) @ _KRONROD_WEIGHTS) * half
    difference = np.abs(kronrod - gauss).reshape(-1, left.size).max(axis=0)
    floor = _ROUNDING_FLOOR * resabs.reshape(-1, left.size).max(axis=0)
    return kronrod, difference, floor


def integrate_adaptive(
    f: Integrand,
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    *,
    breakpoints: Sequence[float] = (),
    max_intervals: int = QUAD_MAX_INTERVALS,
) -> QuadResult:
    """Integrate f over [a, b] by globally adaptive Gauss-Kronrod bisection.

    All pending intervals are evaluated in one vectorized call. After each pass the
    intervals with the largest error estimates are bisected until the accumulated error
    drops below tol * max(1, |value|). Endpoint singularities of type (x - a)**gamma,
    gamma > -1, are resolved by the repeated bisection toward the endpoint.

    Args:
        f (Integrand): Vectorized integrand; maps an array of points of shape (n,) to an
            array of shape (..., n).
        a (float): Lower limit.
        b (float): Upper limit.
        tol (float): Absolute tolerance, relative once |value| exceeds one.
        breakpoints (Sequence[float]): Interior points where f is rough or peaked.
        max_intervals (int): Subdivision limit.

    Returns:
        QuadResult: Value, error estimate and evaluation count.

    Raises:
        DomainError: If the limits or the tolerance are invalid.
        QuadratureConvergenceError: If the subdivision limit is reached.

    >>> round(integrate_adaptive(lambda x: x**2, 0.0, 1.0).value, 12)
    0.333333333333
    """
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        error_message = f"Invalid integration limits [{a}, {b}]"
        raise DomainError(error_message)
    if not tol > 0:
        error_message = f"Tolerance must be positive, got {tol}"
        raise DomainError(error_message)

    inner = sorted({float(point) for point in breakpoints if a < point < b})
    edges = np.array([a, *inner, b], dtype=float)
    left, right = edges[:-1], edges[1:]
    settled_value = 0.0
    settled_error = 0.0
    settled_floor = 0.0
    evaluations = 0
    interval_count = left.size

    while True:
        values, errors, floors = _gauss_kronrod(f, left, right)
        evaluations += _NODES.size * left.size
        value = settled_value + values.sum(axis=-1)
        error = settled_error + float(errors.sum())
        target = tol * max(1.0, float(np.max(np.abs(value))))
        if error <= target:
            break

        order = np.argsort(errors)[::-1]
        cumulative = np.cumsum(errors[order])
        count = int(np.searchsorted(cumulative, error - 0.5 * target)) + 1
        count = min(count, order.size)
        refine, keep = order[:count], order[count:]
        interval_count += count
        widths = right[refine] - left[refine]
        scale = np.maximum(np.abs(left[refine]), np.abs(right[refine]))
        if interval_count > max_intervals or np.any(widths <= 1e3 * np.finfo(float).eps * scale):
            worst = int(order[0])
            interval = (float(left[worst]), float(right[worst]))
            error_message = (
                f"Adaptive quadrature did not reach {target:.3g} on [{a:.6g}, {b:.6g}]: "
                f"error {error:.3g}, worst subinterval [{interval[0]:.6g}, {interval[1]:.6g}]"
            )
            raise QuadratureConvergenceError(error_message, interval, float(errors[worst]))

        settled_value = settled_value + values[..., keep].sum(axis=-1)
        settled_error += float(errors[keep].sum())
        settled_floor += float(floors[keep].sum())
        middle = 0.5 * (left[refine] + right[refine])
        left = np.concatenate([left[refine], middle])
        right = np.concatenate([middle, right[refine]])

    logger.debug(
        "Adaptive quadrature on [%.6g, %.6g]: %d intervals, error %.3g",
        a,
        b,
        interval_count,
        error,
    )
    return QuadResult(
        value=_scalarize(np.asarray(value)),
        error_estimate=error + settled_floor + float(floors.sum()),
        evaluations=evaluations,
    )


def truncation_point(
    f: Integrand, decay_rate: float, tol: float = DEFAULT_TOL, *, probe: float = 0.0
) -> float:
    """Find where an exponentially decaying integrand can be cut off.

    The hypothesis |f(s)| <= M * exp(-decay_rate * (s - probe)) is checked on probe points
    spaced 2 / decay_rate apart: M is fitted on the first half and the second half must
    stay below 2 * M.

    Args:
        f (Integrand): Vectorized integrand.
        decay_rate (float): Assumed exponential decay rate.
        tol (float): Tolerance the discarded tail must respect.
        probe (float): Point beyond which the decay holds.

    Returns:
        float: Truncation point, including a margin of 10 / decay_rate.

    Raises:
        DomainError: If decay_rate is not positive.
        DecayHypothesisError: If sampling contradicts the decay hypothesis.
    """
    if not decay_rate > 0:
        error_message = f"Decay rate must be positive, got {decay_rate}"
        raise DomainError(error_message)
    points = probe + (2.0 / decay_rate) * np.arange(QUAD_PROBE_COUNT)
    magnitude = np.abs(np.asarray(f(points))).reshape(-1, points.size).max(axis=0)
    scaled = magnitude * np.exp(decay_rate * (points - probe))
    if not np.all(np.isfinite(scaled)):
        error_message = "Integrand is not finite at the probe points"
        raise DecayHypothesisError(error_message, probe)
    half = points.size // 2
    bound = float(scaled[:half].max())
    late = scaled[half:]
    if float(late.max()) > 2.0 * bound:
        worst = float(points[half + int(np.argmax(late))])
        error_message = (
            f"Integrand does not decay at rate {decay_rate:.4g}: "
            f"bound {bound:.3g} exceeded at s = {worst:.4g}"
        )
        raise DecayHypothesisError(error_message, worst)
    if bound == 0.0:
        return probe
    reach = max(0.0, math.log(bound / tol) / decay_rate)
    return probe + reach + QUAD_TRUNCATION_MARGIN / decay_rate


def _zero_like(f: Integrand) -> float | complex | np.ndarray:
    return _scalarize(np.zeros_like(np.asarray(f(np.zeros(1))))[..., 0])


def integrate_semi_infinite(
    f: Integrand,
    decay_rate: float,
    tol: float = DEFAULT_TOL,
    *,
    probe: float = 0.0,
    breakpoints: Sequence[float] = (),
    phase: PhaseMap | None = None,
) -> QuadResult:
    """Integrate an exponentially decaying integrand over [0, inf).

    Args:
        f (Integrand): Vectorized integrand.
        decay_rate (float): Exponential decay rate, validated by sampling.
        tol (float): Tolerance for both the truncation and the quadrature.
        probe (float): Point beyond which the decay is assumed.
        breakpoints (Sequence[float]): Interior points where f is peaked.
        phase (PhaseMap | None): Oscillation phase; when given, the far field is
            integrated in the phase variable.

    Returns:
        QuadResult: Total error is at most twice the tolerance.

    >>> round(integrate_semi_infinite(lambda s: np.exp(-s) * np.cos(s), 1.0).value, 7)
    0.5
    """
    s_max = truncation_point(f, decay_rate, tol, probe=probe)
    if s_max <= 0.0:
        return QuadResult(value=_zero_like(f), error_estimate=0.0, evaluations=0)
    if phase is None:
        return integrate_adaptive(f, 0.0, s_max, tol, breakpoints=breakpoints)
    return integrate_oscillatory_tail(f, phase, s_max, tol, breakpoints=breakpoints)


def asymptotic_tail(envelopes: Envelopes, u: float) -> tuple[complex | np.ndarray, float]:
    """Integrate sum exp(i*omega*u) G(u) over [u, inf) by two integrations by parts.

    Args:
        envelopes (Envelopes): Slowly varying envelopes, see `PhaseMap`.
        u (float): Start of the tail.

    Returns:
        tuple[complex | np.ndarray, float]: Tail value and the size of its last term.
    """
    step = 1e-3 * u
    total = 0j
    last_term = 0.0
    for omega, samples in envelopes(np.array([u - step, u, u + step])):
        envelope = samples[..., 1]
        slope = (samples[..., 2] - samples[..., 0]) / (2.0 * step)
        second = slope / omega**2
        total = total + np.exp(1j * omega * u) * (1j * envelope / omega - second)
        last_term = max(last_term, float(np.max(np.abs(second))))
    return _scalarize(np.asarray(total)), last_term


def integrate_oscillatory_tail(
    f: Integrand,
    phase: PhaseMap,
    s_max: float,
    tol: float = DEFAULT_TOL,
    *,
    breakpoints: Sequence[float] = (),
) -> QuadResult:
    """Integrate f over [0, s_max] and its oscillatory continuation.

    The near segment [0, s_split] spans `QUAD_NEAR_PHASE_SPAN` radians of phase and is
    integrated in s. The far segment is integrated in u = phase.forward(s) over at most
    `QUAD_FAR_PHASE_SPAN` radians. When s_max lies further out, the rest is taken from
    the envelopes by `asymptotic_tail`.

    Args:
        f (Integrand): Vectorized integrand in s.
        phase (PhaseMap): Phase map of the oscillation.
        s_max (float): Truncation point from the decay hypothesis.
        tol (float): Tolerance per segment.
        breakpoints (Sequence[float]): Interior points of the near segment.

    Returns:
        QuadResult: Sum of the segment integrals.
    """
    u_start = float(phase.forward(np.zeros(1))[0])
    u_split = u_start + QUAD_NEAR_PHASE_SPAN / phase.frequency
    s_split = float(phase.inverse(np.array([u_split]))[0])
    if s_split >= s_max:
        return integrate_adaptive(f, 0.0, s_max, tol, breakpoints=breakpoints)

    near = integrate_adaptive(f, 0.0, s_split, tol, breakpoints=breakpoints)
    u_stop = float(phase.forward(np.array([s_max]))[0])
    u_end = min(u_split + QUAD_FAR_PHASE_SPAN / phase.frequency, u_stop)

    def in_phase(u: np.ndarray) -> np.ndarray:
        s = phase.inverse(u)
        return np.asarray(f(s)) / phase.rate(s)

    far = integrate_adaptive(in_phase, u_split, u_end, tol)
    value = np.asarray(near.value) + np.asarray(far.value)
    error = near.error_estimate + far.error_estimate
    if u_end < u_stop:
        tail, tail_error = asymptotic_tail(phase.envelopes, u_end)
        value = value + tail
        error += tail_error
    logger.debug("Phase split at s = %.4g, far segment up to u = %.4g", s_split, u_end)
    return QuadResult(
        value=_scalarize(np.asarray(value)),
        error_estimate=error,
        evaluations=near.evaluations + far.evaluations + 3,
    )


def gauss_jacobi_unit(order: int, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi rule on [0, 1] for the weight (1 - t)**delta.

    Args:
        order (int): Number of nodes.
        delta (float): Endpoint exponent, delta > -1.

    Returns:
        tuple[np.ndarray, np.ndarray]: Nodes and weights.
    """
    nodes, weights = roots_jacobi(order, delta, 0.0)
    return 0.5 * (nodes + 1.0), weights * 0.5 ** (delta + 1.0)


def van_der_corput_slope(lambdas: Sequence[float], tol: float = 1e-11) -> float:
    """Log-log slope of |integral of exp(i*lambda*s**2) over [0, 1]| against lambda.

    Args:
        lambdas (Sequence[float]): Frequencies, at least two.
        tol (float): Quadrature tolerance.

    Returns:
        float: Fitted slope, close to -1/2 for a nondegenerate quadratic phase.
    """
    magnitudes = []
    for lam in lambdas:
        result = integrate_adaptive(lambda s, lam=lam: np.exp(1j * lam * s**2), 0.0, 1.0, tol)
        magnitudes.append(abs(result.value))
    slope, _ = np.polyfit(np.log(np.asarray(lambdas, dtype=float)), np.log(magnitudes), 1)
    return float(slope)
