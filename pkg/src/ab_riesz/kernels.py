"""Bochner-Riesz, spectral-measure and resolvent kernels of the Aharonov-Bohm operator.

Closed forms split into a geometric term, the profile at |x - y| weighted by A, and a
diffractive term, the integral over s of B against the profile at the diffractive distance
d_s. They are evaluated at the fractional flux alpha0 for a pure AB potential and carried to
the requested flux and potential by the gauge phase

    exp(i m Delta) * exp(i (p(theta1) - p(theta2))),

m being the integer part of the flux and p the periodic part of the potential primitive.
The partial-wave series use the total flux directly and serve as independent oracles.
"""

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from scipy.special import gammaln

from ab_riesz.ab_model import (
    FOUR_PI_SQUARED,
    TWO_PI,
    AngularPotential,
    FluxParameter,
    PolarPoint,
    diffractive_distance,
    euclidean_distance,
    flux_indicator,
    magnetic_bracket,
    shadow_gap,
)
from ab_riesz.config import (
    BESSEL_MAX_ARGUMENT,
    BESSEL_MAX_ORDER,
    C_NORM,
    C_RES,
    C_SPEC,
    DEFAULT_SEED,
    DEFAULT_TOL,
    DIFFRACTIVE_WEIGHT,
    SERIES_K_CAP,
    SERIES_K_MARGIN,
    SERIES_QUIET_TERMS,
    THREADS,
)
from ab_riesz.errors import (
    DecayHypothesisError,
    DiagonalSingularityError,
    DomainError,
    SeriesConvergenceError,
)
from ab_riesz.quadrature import (
    PhaseMap,
    gauss_jacobi_unit,
    integrate_adaptive,
    integrate_semi_infinite,
)
from ab_riesz.specfun import bessel_j, gamma, hankel1, hankel1_0, hankel1_envelope


logger = logging.getLogger(__name__)

_S_CEILING = 1000.0  # profiles vanish to double precision long before
_SMALL_ARGUMENT = 1e-4
_FLUX_MATCH = 1e-12
_TABLE_EXTRA_NODES = 64


@dataclass(frozen=True)
class BRParams:
    """Parameters of the Bochner-Riesz mean S_lambda^delta.

    Attributes:
        lam (float): Spectral cutoff lambda > 0.
        delta (float): Riesz order delta >= 0.
        flux (FluxParameter): Flux decomposition.
        potential (AngularPotential): Angular potential of flux flux.alpha_total.
        tol (float): Quadrature and series tolerance.
    """

    lam: float
    delta: float
    flux: FluxParameter
    potential: AngularPotential
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        """Validate the parameter box."""
        if not (math.isfinite(self.lam) and self.lam > 0):
            error_message = f"lambda must be positive, got {self.lam}"
            raise DomainError(error_message)
        if not (math.isfinite(self.delta) and self.delta >= 0):
            error_message = f"delta must be non-negative, got {self.delta}"
            raise DomainError(error_message)
        if not self.tol > 0:
            error_message = f"Tolerance must be positive, got {self.tol}"
            raise DomainError(error_message)
        mismatch = abs(self.potential.alpha - self.flux.alpha_total)
        if mismatch > _FLUX_MATCH * max(1.0, abs(self.flux.alpha_total)):
            error_message = (
                f"Potential flux {self.potential.alpha} differs from {self.flux.alpha_total}"
            )
            raise DomainError(error_message)

    @classmethod
    def pure_ab(
        cls, lam: float, delta: float, alpha: float, tol: float = DEFAULT_TOL
    ) -> "BRParams":
        """Parameters for the pure Aharonov-Bohm potential of flux alpha.

        Args:
            lam (float): Spectral cutoff.
            delta (float): Riesz order.
            alpha (float): Total flux.
            tol (float): Tolerance.

        Returns:
            BRParams: The parameters.
        """
        flux = FluxParameter.from_total(alpha)
        return cls(lam, delta, flux, AngularPotential.pure_ab(alpha), tol)

    @classmethod
    def with_potential(
        cls, lam: float, delta: float, potential: AngularPotential, tol: float = DEFAULT_TOL
    ) -> "BRParams":
        """Parameters for an arbitrary angular potential.

        Args:
            lam (float): Spectral cutoff.
            delta (float): Riesz order.
            potential (AngularPotential): Angular potential.
            tol (float): Tolerance.

        Returns:
            BRParams: The parameters.
        """
        return cls(lam, delta, FluxParameter.from_total(potential.alpha), potential, tol)


@dataclass(frozen=True)
class KernelDecomposition:
    """Geometric and diffractive parts of a closed-form kernel value.

    Attributes:
        geometric (complex): Term carried by the weight A.
        diffractive (complex): Term carried by the weight B.
    """

    geometric: complex
    diffractive: complex

    @property
    def total(self) -> complex:
        """Kernel value."""
        return self.geometric + self.diffractive


@dataclass(frozen=True)
class SeriesDiagnostics:
    """Truncation bookkeeping of a partial-wave series.

    Attributes:
        k_max_used (int): Half-width of the summed angular momentum window.
        tail_bound (float): Bound on the discarded terms.
        terms (np.ndarray | None): Term magnitudes in increasing k.
    """

    k_max_used: int
    tail_bound: float
    terms: np.ndarray | None = None


@dataclass(frozen=True)
class AmplitudeReport:
    """Envelope fit of the free kernel against (1 + lambda d)**(-3/2 - delta).

    Attributes:
        slope (float): Fitted log-log slope of the envelope.
        expected_slope (float): -3/2 - delta.
        ratio_min (float): Smallest envelope ratio over the window.
        ratio_max (float): Largest envelope ratio over the window.
    """

    slope: float
    expected_slope: float
    ratio_min: float
    ratio_max: float

    @property
    def passed(self) -> bool:
        """Slope within 0.05 and ratio spread below 10."""
        spread = self.ratio_max / self.ratio_min
        return abs(self.slope - self.expected_slope) <= 0.05 and spread < 10.0  # noqa: PLR2004


@dataclass(frozen=True)
class CalibrationReport:
    """Normalization constants fitted against the partial-wave oracles.

    Attributes:
        c_norm (float): Bochner-Riesz constant.
        c_spec (float): Spectral-measure constant.
        c_res (complex): Resolvent constant.
        diffractive_weight (float): Weight of the s-integral relative to the geometric term.
    """

    c_norm: float
    c_spec: float
    c_res: complex
    diffractive_weight: float


class RadialProfile(Protocol):
    """Profile F(u) of a kernel in u = lambda * distance, with its Hankel envelopes."""

    @property
    def decay(self) -> float:
        """Exponent of the algebraic decay of F."""

    def values(self, u: np.ndarray) -> np.ndarray:
        """F(u) for u > 0."""

    def envelopes(self, u: np.ndarray) -> list[tuple[float, np.ndarray]]:
        """Pairs (omega, G) with F(u) = sum exp(i omega u) G(u)."""


Bracket = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class _RadialProfile:
    """Profile F(u) = scale * W_nu(u) / u**power of a kernel, u = lambda * distance.

    W_nu is J_nu, or H_0^(1) when `outgoing`. F decays like u**-decay.
    """

    nu: float
    scale: float
    power: float
    decay: float
    outgoing: bool = False

    def values(self, u: np.ndarray) -> np.ndarray:
        if self.outgoing:
            return self.scale * _hankel_0_any(u)
        return self.scale * _bessel_j_any(self.nu, u) / u**self.power

    def envelopes(self, u: np.ndarray) -> list[tuple[float, np.ndarray]]:
        envelope = self.scale * np.asarray(hankel1_envelope(self.nu, u)) / u**self.power
        if self.outgoing:
            return [(1.0, envelope)]
        return [(1.0, 0.5 * envelope), (-1.0, 0.5 * np.conj(envelope))]


def _br_radial(lam: float, delta: float) -> _RadialProfile:
    nu = 1.0 + delta
    return _RadialProfile(
        nu=nu, scale=lam**2 * 2.0**delta * gamma(delta + 1.0), power=nu, decay=nu + 0.5
    )


_SPECTRAL_RADIAL = _RadialProfile(nu=0.0, scale=1.0, power=0.0, decay=0.5)
_RESOLVENT_RADIAL = _RadialProfile(nu=0.0, scale=1.0, power=0.0, decay=0.5, outgoing=True)


def _bessel_j_any(nu: float, u: np.ndarray) -> np.ndarray:
    """J_nu(u) for u > 0, through the Hankel envelope beyond the certified box."""
    u = np.asarray(u, dtype=float)
    result = np.empty(u.shape)
    inside = u <= BESSEL_MAX_ARGUMENT
    if np.any(inside):
        result[inside] = bessel_j(nu, u[inside])
    if not np.all(inside):
        far = u[~inside]
        result[~inside] = np.real(np.exp(1j * far) * hankel1_envelope(nu, far))
    return result


def _hankel_0_any(u: np.ndarray) -> np.ndarray:
    """H_0^(1)(u) for u > 0."""
    u = np.asarray(u, dtype=float)
    result = np.empty(u.shape, dtype=complex)
    inside = u <= BESSEL_MAX_ARGUMENT
    if np.any(inside):
        result[inside] = hankel1_0(u[inside])
    if not np.all(inside):
        far = u[~inside]
        result[~inside] = np.exp(1j * far) * hankel1_envelope(0.0, far)
    return result


def _transport_phase(theta1: float, theta2: float, potential: AngularPotential) -> complex:
    """exp(i (p(theta1) - p(theta2))), identically 1 for a pure AB potential."""
    if potential.kind == "pure_ab":
        return 1.0 + 0j
    first = float(potential.periodic_phase(theta1))
    return complex(np.exp(1j * (first - float(potential.periodic_phase(theta2)))))


def _gauge_phase(
    theta1: float, theta2: float, flux: FluxParameter, potential: AngularPotential
) -> complex:
    integer_part = complex(np.exp(1j * flux.m * (theta1 - theta2)))
    return integer_part * _transport_phase(theta1, theta2, potential)


def _geometric_weight(dtheta: float | np.ndarray, alpha0: float) -> complex | np.ndarray:
    """A for a pure AB potential of flux alpha0."""
    delta = np.asarray(dtheta, dtype=float)
    return (np.exp(1j * alpha0 * delta) * flux_indicator(delta, alpha0) / FOUR_PI_SQUARED)[()]


def _negated(
    flux: FluxParameter, potential: AngularPotential
) -> tuple[FluxParameter, AngularPotential]:
    """Flux and potential of the reversed field A -> -A."""
    reversed_flux = FluxParameter.from_total(-flux.alpha_total)
    if potential.kind == "pure_ab" or potential.samples is None:
        return reversed_flux, AngularPotential.pure_ab(-potential.alpha)
    return reversed_flux, AngularPotential.tabulated(-potential.samples)


def diffractive_integral(
    profile: RadialProfile,
    r1: float,
    r2: float,
    dtheta: float | np.ndarray,
    alpha0: float,
    lam: float,
    tol: float,
    *,
    bracket: Bracket | None = None,
) -> complex | np.ndarray:
    """Integral over s in [0, inf) of bracket(s, Delta) * F(lam * d_s(s)).

    Several angle differences are integrated at once as one vector-valued integrand. The
    far field is integrated in the phase u = lam * d_s(s).

    Args:
        profile (RadialProfile): Radial profile F.
        r1 (float): First radius.
        r2 (float): Second radius.
        dtheta (float | np.ndarray): Angle difference(s).
        alpha0 (float): Fractional flux; the integral vanishes for alpha0 = 0.
        lam (float): Frequency scale of the profile.
        tol (float): Quadrature tolerance.
        bracket (Bracket | None): Weight in s and Delta, `magnetic_bracket` by default.

    Returns:
        complex | np.ndarray: One value per angle difference.
    """
    deltas = np.asarray(dtheta, dtype=float)
    if alpha0 == 0.0:
        return np.zeros(deltas.shape, dtype=complex)[()]
    column = deltas[..., None]

    def default_bracket(s: np.ndarray, angles: np.ndarray) -> np.ndarray:
        return np.asarray(magnetic_bracket(s, angles, alpha0))

    weight_of = default_bracket if bracket is None else bracket
    product = r1 * r2
    base = (r1 + r2) ** 2

    def distance(s: np.ndarray) -> np.ndarray:
        return np.asarray(diffractive_distance(np.minimum(s, _S_CEILING), r1, r2))

    def integrand(s: np.ndarray) -> np.ndarray:
        return weight_of(s, column) * profile.values(lam * distance(s))

    def forward(s: np.ndarray) -> np.ndarray:
        return lam * distance(s)

    def inverse(u: np.ndarray) -> np.ndarray:
        radicand = np.maximum((np.asarray(u) / lam) ** 2 - base, 0.0) / (4.0 * product)
        return 2.0 * np.arcsinh(np.sqrt(radicand))

    def rate(s: np.ndarray) -> np.ndarray:
        half = 0.5 * np.minimum(s, _S_CEILING)
        return lam * product * 2.0 * (np.sinh(half) / distance(s)) * np.cosh(half)

    def envelopes(u: np.ndarray) -> list[tuple[float, np.ndarray]]:
        s = inverse(u)
        weight = weight_of(s, column) / rate(s)
        return [(omega, weight * envelope) for omega, envelope in profile.envelopes(u)]

    phase = PhaseMap(forward=forward, inverse=inverse, rate=rate, envelopes=envelopes)
    gaps = np.abs(np.atleast_1d(np.asarray(shadow_gap(deltas))))
    breakpoints = sorted({float(point) for gap in gaps if gap > 0 for point in (gap, 4.0 * gap)})
    probe = max(
        0.0,
        2.0 * math.log(2.0 / (lam * math.sqrt(product))),
        math.log(base / product),
    )

    def run(decay_rate: float) -> complex | np.ndarray:
        result = integrate_semi_infinite(
            integrand, decay_rate, tol, probe=probe, breakpoints=breakpoints, phase=phase
        )
        return np.asarray(result.value).reshape(deltas.shape)[()]

    optimistic = max(abs(alpha0), 0.5 * profile.decay)
    if optimistic > abs(alpha0):
        try:
            return run(optimistic)
        except DecayHypothesisError as error:
            logger.debug("Decay rate %.4g rejected at s = %.4g", optimistic, error.probe)
    return run(abs(alpha0))


def br_profile(dist: float | np.ndarray, lam: float, delta: float) -> float | np.ndarray:
    """Radial Bochner-Riesz profile int_0^lam rho (1 - rho**2/lam**2)**delta J_0(rho d) d rho.

    Closed form lam**2 2**delta Gamma(delta + 1) J_{1+delta}(lam d) / (lam d)**(1+delta),
    continuous at d = 0.

    Args:
        dist (float | np.ndarray): Distance(s) d >= 0.
        lam (float): Spectral cutoff.
        delta (float): Riesz order.

    Returns:
        float | np.ndarray: Profile value(s).

    Raises:
        DomainError: For negative distances or parameters outside their ranges.

    >>> br_profile(0.0, 1.0, 0.0)
    0.5
    """
    if not (lam > 0 and delta >= 0):
        error_message = f"br_profile needs lambda > 0 and delta >= 0, got ({lam}, {delta})"
        raise DomainError(error_message)
    d = np.asarray(dist, dtype=float)
    if np.any(d < 0):
        error_message = "Distances must be non-negative"
        raise DomainError(error_message)
    radial = _br_radial(lam, delta)
    u = lam * d
    small = u < _SMALL_ARGUMENT
    nu = radial.nu
    limit = radial.scale / (2.0**nu * gamma(nu + 1.0))
    result = np.empty(u.shape)
    result[small] = limit * (1.0 - u[small] ** 2 / (4.0 * (nu + 1.0)))
    if not np.all(small):
        result[~small] = radial.values(u[~small])
    return result[()]


def free_br_kernel(dist: float | np.ndarray, lam: float, delta: float) -> float | np.ndarray:
    """Kernel of the free Bochner-Riesz mean in the plane, lam**2 K_1^delta(lam d).

    Args:
        dist (float | np.ndarray): Distance(s) |x - y|.
        lam (float): Spectral cutoff.
        delta (float): Riesz order.

    Returns:
        float | np.ndarray: Kernel value(s), pi / (1 + delta) at d = 0 for lam = 1.

    >>> free_br_kernel(0.0, 1.0, 1.0)
    1.5707963267948966
    """
    return (TWO_PI * np.asarray(br_profile(dist, lam, delta)))[()]


def _spectral_profiles(
    nus: np.ndarray,
    r1: float,
    r2: float,
    lam: float,
    delta: float,
    tol: float,
    weights: np.ndarray | None = None,
) -> np.ndarray:
    """All profiles (lam**2/2) int_0^1 u**delta J_nu(lam r1 sqrt(1-u)) J_nu(lam r2 sqrt(1-u)) du.

    With weights, a last row holds sum_k weights[k] * profile_k, integrated to the same
    tolerance.
    """
    orders = np.asarray(nus, dtype=float)[:, None]

    def integrand(u: np.ndarray) -> np.ndarray:
        rho = np.sqrt(1.0 - u)
        rows = (
            0.5
            * lam**2
            * u**delta
            * np.asarray(bessel_j(orders, lam * r1 * rho))
            * np.asarray(bessel_j(orders, lam * r2 * rho))
        )
        if weights is None:
            return rows
        return np.vstack([rows, weights @ rows])

    return np.asarray(integrate_adaptive(integrand, 0.0, 1.0, tol).value)


def spectral_profile(
    nu: float, r1: float, r2: float, lam: float, delta: float, tol: float = DEFAULT_TOL
) -> float:
    """Profile int_0^lam (1 - rho**2/lam**2)**delta J_nu(r1 rho) J_nu(r2 rho) rho drho.

    The substitution rho = lam sqrt(1 - u) turns the endpoint factor into u**delta.

    Args:
        nu (float): Order nu >= 0.
        r1 (float): First radius, r1 >= 0.
        r2 (float): Second radius, r2 >= 0.
        lam (float): Spectral cutoff.
        delta (float): Riesz order.
        tol (float): Quadrature tolerance.

    Returns:
        float: The profile.

    >>> round(spectral_profile(0.0, 0.0, 0.0, 1.0, 1.0), 12)
    0.25
    """
    return float(_spectral_profiles(np.array([nu]), r1, r2, lam, delta, tol)[0])


def _majorant_log(nu: float, x1: float, x2: float, lam: float) -> float:
    """log of lam**2/(2 nu + 2) (x1 x2 / 4)**nu / Gamma(nu + 1)**2, bounding a BR term."""
    return (
        2.0 * math.log(lam)
        - math.log(2.0 * nu + 2.0)
        + nu * math.log(0.25 * x1 * x2)
        - 2.0 * float(gammaln(nu + 1.0))
    )


def _geometric_tail(log_first: float, ratio: float) -> float:
    if ratio >= 1.0:
        return math.inf
    return math.exp(log_first) / (1.0 - ratio)


def _window(alpha: float, half_width: int) -> np.ndarray:
    center = -round(alpha)
    return np.arange(center - half_width, center + half_width + 1)


def _initial_half_width(lam: float, r1: float, r2: float) -> int:
    return math.ceil(math.e * lam * max(r1, r2)) + SERIES_K_MARGIN


def _quiet(terms: np.ndarray, tol: float) -> bool:
    """The outermost terms on both sides are below tol times the running magnitude sum."""
    threshold = tol * max(1.0, float(terms.sum()))
    edges = np.concatenate([terms[:SERIES_QUIET_TERMS], terms[-SERIES_QUIET_TERMS:]])
    return bool(np.all(edges <= threshold))


def _check_order_box(nus: np.ndarray, half_width: int) -> None:
    if half_width > SERIES_K_CAP or float(nus.max()) > BESSEL_MAX_ORDER:
        error_message = (
            f"Partial-wave series did not converge within |k| <= {half_width} "
            f"(largest order {float(nus.max()):.1f})"
        )
        raise SeriesConvergenceError(error_message)


def br_kernel_series(
    x: PolarPoint, y: PolarPoint, params: BRParams
) -> tuple[complex, SeriesDiagnostics]:
    """Bochner-Riesz kernel from its partial-wave expansion.

    sum_k phi_k(theta1) conj(phi_k(theta2)) * spectral_profile(|k + alpha|, r1, r2, lam, delta),
    truncated once the outermost terms are quiet and the majorant tail is below tol.

    Args:
        x (PolarPoint): First point.
        y (PolarPoint): Second point.
        params (BRParams): Kernel parameters.

    Returns:
        tuple[complex, SeriesDiagnostics]: Kernel value and truncation diagnostics.

    Raises:
        SeriesConvergenceError: If the tail bound is not met within the order cap.
    """
    alpha = params.flux.alpha_total
    dtheta = x.theta - y.theta
    lam, tol = params.lam, params.tol
    x1, x2 = lam * x.r, lam * y.r
    half_width = _initial_half_width(lam, x.r, y.r)
    while True:
        ks = _window(alpha, half_width)
        nus = np.abs(ks + alpha)
        _check_order_box(nus, half_width)
        weights = np.exp(-1j * ks * dtheta) / TWO_PI
        rows = _spectral_profiles(nus, x.r, y.r, lam, params.delta, tol, weights)
        terms = np.abs(rows[:-1].real) / TWO_PI
        tail = 0.0
        for nu_next in (abs(ks[0] - 1 + alpha), abs(ks[-1] + 1 + alpha)):
            ratio = 0.25 * x1 * x2 / (nu_next + 1.0) ** 2
            tail += _geometric_tail(_majorant_log(nu_next, x1, x2, lam), ratio) / TWO_PI
        if _quiet(terms, tol) and tail <= tol:
            break
        half_width += SERIES_K_MARGIN
        logger.debug("Extending the partial-wave window to |k| <= %d", half_width)
    value = complex(rows[-1]) * _transport_phase(x.theta, y.theta, params.potential)
    logger.debug("BR series: %d terms, tail bound %.3g", ks.size, tail)
    return value, SeriesDiagnostics(k_max_used=half_width, tail_bound=tail, terms=terms)


def br_kernel_closed(x: PolarPoint, y: PolarPoint, params: BRParams) -> KernelDecomposition:
    """Bochner-Riesz kernel from its geometric and diffractive closed form.

    geometric = c_norm A br_profile(|x - y|), diffractive = c_norm w int_0^inf B(s)
    br_profile(d_s) ds, both carried by the gauge phase.

    Args:
        x (PolarPoint): First point.
        y (PolarPoint): Second point.
        params (BRParams): Kernel parameters.

    Returns:
        KernelDecomposition: Geometric and diffractive terms.
    """
    alpha0 = params.flux.alpha0
    dtheta = x.theta - y.theta
    phase = _gauge_phase(x.theta, y.theta, params.flux, params.potential)
    d = float(euclidean_distance(x.r, y.r, dtheta))
    profile = float(br_profile(d, params.lam, params.delta))
    geometric = C_NORM * complex(_geometric_weight(dtheta, alpha0)) * profile * phase
    if params.flux.is_integer:
        return KernelDecomposition(geometric=geometric, diffractive=0j)
    integral = diffractive_integral(
        _br_radial(params.lam, params.delta), x.r, y.r, dtheta, alpha0, params.lam, params.tol
    )
    diffractive = -C_NORM * DIFFRACTIVE_WEIGHT * complex(integral) / FOUR_PI_SQUARED * phase
    return KernelDecomposition(geometric=geometric, diffractive=diffractive)


def spectral_measure_kernel(
    rho: float,
    x: PolarPoint,
    y: PolarPoint,
    flux: FluxParameter,
    potential: AngularPotential,
    tol: float = DEFAULT_TOL,
) -> complex:
    """Kernel of the spectral measure dE(rho) of the AB operator.

    c_spec rho [J_0(rho d) A + w int_0^inf J_0(rho d_s) B(s) ds].

    Args:
        rho (float): Spectral parameter rho > 0.
        x (PolarPoint): First point.
        y (PolarPoint): Second point.
        flux (FluxParameter): Flux decomposition.
        potential (AngularPotential): Angular potential.
        tol (float): Quadrature tolerance.

    Returns:
        complex: Kernel value.
    """
    if not rho > 0:
        error_message = f"The spectral parameter must be positive, got {rho}"
        raise DomainError(error_message)
    dtheta = x.theta - y.theta
    phase = _gauge_phase(x.theta, y.theta, flux, potential)
    d = float(euclidean_distance(x.r, y.r, dtheta))
    geometric = float(bessel_j(0.0, rho * d)) * complex(_geometric_weight(dtheta, flux.alpha0))
    integral = diffractive_integral(_SPECTRAL_RADIAL, x.r, y.r, dtheta, flux.alpha0, rho, tol)
    diffractive = -DIFFRACTIVE_WEIGHT * complex(integral) / FOUR_PI_SQUARED
    return C_SPEC * rho * (geometric + diffractive) * phase


def spectral_measure_series(
    rho: float,
    x: PolarPoint,
    y: PolarPoint,
    flux: FluxParameter,
    potential: AngularPotential,
    tol: float = DEFAULT_TOL,
) -> tuple[complex, SeriesDiagnostics]:
    """Spectral measure from sum_k phi_k(theta1) conj(phi_k(theta2)) rho J_nu(rho r1) J_nu(rho r2).

    Args:
        rho (float): Spectral parameter rho > 0.
        x (PolarPoint): First point.
        y (PolarPoint): Second point.
        flux (FluxParameter): Flux decomposition.
        potential (AngularPotential): Angular potential.
        tol (float): Truncation tolerance.

    Returns:
        tuple[complex, SeriesDiagnostics]: Kernel value and truncation diagnostics.

    Raises:
        SeriesConvergenceError: If the tail bound is not met within the order cap.
    """
    alpha = flux.alpha_total
    dtheta = x.theta - y.theta
    x1, x2 = rho * x.r, rho * y.r
    half_width = _initial_half_width(rho, x.r, y.r)
    while True:
        ks = _window(alpha, half_width)
        nus = np.abs(ks + alpha)
        _check_order_box(nus, half_width)
        values = rho * np.asarray(bessel_j(nus, x1)) * np.asarray(bessel_j(nus, x2)) / TWO_PI
        terms = np.abs(values)
        tail = 0.0
        for nu_next in (abs(ks[0] - 1 + alpha), abs(ks[-1] + 1 + alpha)):
            log_first = math.log(rho) + nu_next * math.log(0.25 * x1 * x2) - 2.0 * float(
                gammaln(nu_next + 1.0)
            )
            ratio = 0.25 * x1 * x2 / (nu_next + 1.0) ** 2
            tail += _geometric_tail(log_first, ratio) / TWO_PI
        if _quiet(terms, tol) and tail <= tol:
            break
        half_width += SERIES_K_MARGIN
    total = complex(np.exp(-1j * ks * dtheta) @ values)
    transport = _transport_phase(x.theta, y.theta, potential)
    diagnostics = SeriesDiagnostics(k_max_used=half_width, tail_bound=tail, terms=terms)
    return total * transport, diagnostics


def resolvent_kernel(
    lam: float,
    sign: int,
    x: PolarPoint,
    y: PolarPoint,
    flux: FluxParameter,
    potential: AngularPotential,
    tol: float = DEFAULT_TOL,
) -> complex:
    """Outgoing (sign = +1) or incoming (sign = -1) resolvent kernel at lam**2.

    The outgoing kernel is c_res [H_0^(1)(lam d) A + w int_0^inf H_0^(1)(lam d_s) B(s) ds];
    the incoming one is the conjugate of the outgoing kernel of the reversed field.

    Args:
        lam (float): Square root of the spectral parameter, lam > 0.
        sign (int): +1 for lam**2 + i0, -1 for lam**2 - i0.
        x (PolarPoint): First point.
        y (PolarPoint): Second point, different from x.
        flux (FluxParameter): Flux decomposition.
        potential (AngularPotential): Angular potential.
        tol (float): Quadrature tolerance.

    Returns:
        complex: Kernel value.

    Raises:
        DiagonalSingularityError: For x = y.
    """
    if sign not in (1, -1):
        error_message = f"sign must be +1 or -1, got {sign}"
        raise DomainError(error_message)
    if not lam > 0:
        error_message = f"lambda must be positive, got {lam}"
        raise DomainError(error_message)
    if sign == -1:
        reversed_flux, reversed_potential = _negated(flux, potential)
        outgoing = resolvent_kernel(lam, 1, x, y, reversed_flux, reversed_potential, tol)
        return complex(np.conj(outgoing))
    dtheta = x.theta - y.theta
    d = float(euclidean_distance(x.r, y.r, dtheta))
    if d <= 0.0:
        error_message = f"The resolvent kernel is singular on the diagonal x = y = {x}"
        raise DiagonalSingularityError(error_message)
    phase = _gauge_phase(x.theta, y.theta, flux, potential)
    geometric = complex(_hankel_0_any(np.array([lam * d]))[0]) * complex(
        _geometric_weight(dtheta, flux.alpha0)
    )
    integral = diffractive_integral(_RESOLVENT_RADIAL, x.r, y.r, dtheta, flux.alpha0, lam, tol)
    diffractive = -DIFFRACTIVE_WEIGHT * complex(integral) / FOUR_PI_SQUARED
    return C_RES * (geometric + diffractive) * phase


def resolvent_kernel_series(
    lam: float,
    sign: int,
    x: PolarPoint,
    y: PolarPoint,
    flux: FluxParameter,
    potential: AngularPotential,
    tol: float = DEFAULT_TOL,
) -> tuple[complex, SeriesDiagnostics]:
    """Resolvent from sum_k phi_k(theta1) conj(phi_k(theta2)) (i pi/2) J_nu(lam r<) H_nu(lam r>).

    Args:
        lam (float): Square root of the spectral parameter.
        sign (int): +1 outgoing, -1 incoming.
        x (PolarPoint): First point.
        y (PolarPoint): Second point, at a different radius.
        flux (FluxParameter): Flux decomposition.
        potential (AngularPotential): Angular potential.
        tol (float): Truncation tolerance.

    Returns:
        tuple[complex, SeriesDiagnostics]: Kernel value and truncation diagnostics.

    Raises:
        DomainError: For equal radii, where the series converges too slowly.
        SeriesConvergenceError: If the terms do not fall below tol within the order cap.
    """
    if sign == -1:
        reversed_flux, reversed_potential = _negated(flux, potential)
        value, diagnostics = resolvent_kernel_series(
            lam, 1, x, y, reversed_flux, reversed_potential, tol
        )
        return complex(np.conj(value)), diagnostics
    if x.r == y.r:
        error_message = "The partial-wave resolvent needs r1 != r2"
        raise DomainError(error_message)
    alpha = flux.alpha_total
    dtheta = x.theta - y.theta
    inner, outer = sorted((lam * x.r, lam * y.r))
    quotient = inner / outer
    half_width = _initial_half_width(lam, x.r, y.r)
    while True:
        ks = _window(alpha, half_width)
        nus = np.abs(ks + alpha)
        _check_order_box(nus, half_width)
        values = (
            0.5j * math.pi * np.asarray(bessel_j(nus, inner)) * np.asarray(hankel1(nus, outer))
        ) / TWO_PI
        terms = np.abs(values)
        tail = 0.0
        for nu_next in (abs(ks[0] - 1 + alpha), abs(ks[-1] + 1 + alpha)):
            tail += quotient**nu_next / (2.0 * max(nu_next, 1.0) * (1.0 - quotient)) / TWO_PI
        if _quiet(terms, tol) and tail <= tol:
            break
        half_width += SERIES_K_MARGIN
    total = complex(np.exp(-1j * ks * dtheta) @ values)
    transport = _transport_phase(x.theta, y.theta, potential)
    diagnostics = SeriesDiagnostics(k_max_used=half_width, tail_bound=tail, terms=terms)
    return total * transport, diagnostics


def stone_density(
    lam: float,
    x: PolarPoint,
    y: PolarPoint,
    flux: FluxParameter,
    potential: AngularPotential,
    tol: float = DEFAULT_TOL,
) -> complex:
    """Spectral measure from Stone's formula (lam / (i pi)) (R(lam**2 + i0) - R(lam**2 - i0)).

    Args:
        lam (float): Spectral parameter.
        x (PolarPoint): First point.
        y (PolarPoint): Second point, different from x.
        flux (FluxParameter): Flux decomposition.
        potential (AngularPotential): Angular potential.
        tol (float): Quadrature tolerance.

    Returns:
        complex: dE(lam)(x, y).
    """
    outgoing = resolvent_kernel(lam, 1, x, y, flux, potential, tol)
    incoming = resolvent_kernel(lam, -1, x, y, flux, potential, tol)
    return lam / (1j * math.pi) * (outgoing - incoming)


def riesz_mean_from_spectral(x: PolarPoint, y: PolarPoint, params: BRParams) -> complex:
    """Bochner-Riesz kernel as int_0^lam (1 - rho**2/lam**2)**delta dE(rho)(x, y) d rho.

    Args:
        x (PolarPoint): First point.
        y (PolarPoint): Second point.
        params (BRParams): Kernel parameters.

    Returns:
        complex: Kernel value.
    """
    lam = params.lam

    def integrand(rhos: np.ndarray) -> np.ndarray:
        values = np.array(
            [
                spectral_measure_kernel(
                    float(rho), x, y, params.flux, params.potential, 0.1 * params.tol
                )
                for rho in rhos
            ]
        )
        return (1.0 - (rhos / lam) ** 2) ** params.delta * values

    return complex(integrate_adaptive(integrand, 0.0, lam, params.tol).value)


def asymptotic_amplitude_check(
    lambda_list: Sequence[float], delta: float, samples: int = 64
) -> AmplitudeReport:
    """Fit the envelope of the free kernel on lam d in [20, 2000].

    The envelope of J_{1+delta} is |H_{1+delta}^(1)|, so the envelope of the free kernel is
    2 pi lam**2 2**delta Gamma(delta + 1) |H_{1+delta}^(1)(z)| / z**(1+delta), z = lam d.

    Args:
        lambda_list (Sequence[float]): Spectral cutoffs.
        delta (float): Riesz order.
        samples (int): Points per cutoff, log-spaced in z.

    Returns:
        AmplitudeReport: Slope and envelope-ratio range.
    """
    z = np.geomspace(20.0, 2000.0, samples)
    radial = _br_radial(1.0, delta)
    logs_z: list[np.ndarray] = []
    logs_envelope: list[np.ndarray] = []
    ratios: list[np.ndarray] = []
    for lam in lambda_list:
        distances = z / lam
        envelope = (
            TWO_PI * lam**2 * radial.scale * np.abs(hankel1_envelope(radial.nu, lam * distances))
            / z**radial.nu
        )
        logs_z.append(np.log(z))
        logs_envelope.append(np.log(envelope / lam**2))
        ratios.append(envelope / (lam**2 * (1.0 + z) ** (-1.5 - delta)))
    slope, _ = np.polyfit(np.concatenate(logs_z), np.concatenate(logs_envelope), 1)
    spread = np.concatenate(ratios)
    return AmplitudeReport(
        slope=float(slope),
        expected_slope=-1.5 - delta,
        ratio_min=float(spread.min()),
        ratio_max=float(spread.max()),
    )


def _least_squares(models: np.ndarray, targets: np.ndarray) -> complex:
    return complex(np.vdot(models, targets) / np.vdot(models, models))


def calibrate_constants(
    samples: int = 6, rng: np.random.Generator | None = None, tol: float = 1e-10
) -> CalibrationReport:
    """Fit the normalization constants against the partial-wave oracles.

    c_norm, c_spec and c_res are fitted at alpha = 0 on the geometric term alone; the
    diffractive weight is fitted at alpha = 1/2 on the remainder of the series.

    Args:
        samples (int): Number of random point pairs.
        rng (np.random.Generator | None): Random source, seeded by default.
        tol (float): Oracle tolerance.

    Returns:
        CalibrationReport: The fitted constants.
    """
    rng = np.random.default_rng(DEFAULT_SEED) if rng is None else rng
    free_flux, free_potential = FluxParameter.from_total(0.0), AngularPotential.pure_ab(0.0)
    columns: dict[str, list[complex]] = {
        key: [] for key in ("br", "br_oracle", "spec", "spec_oracle", "res", "res_oracle")
    }
    diffractive_models: list[complex] = []
    diffractive_targets: list[complex] = []
    for _ in range(samples):
        lam = float(rng.uniform(1.0, 4.0))
        delta = float(rng.choice([0.0, 0.5, 1.0]))
        r1 = float(rng.uniform(0.2, 1.0))
        x = PolarPoint(r1, float(rng.uniform(0.0, TWO_PI)))
        y = PolarPoint(r1 * float(rng.uniform(1.3, 2.0)), float(rng.uniform(0.0, TWO_PI)))
        dtheta = x.theta - y.theta
        d = float(euclidean_distance(x.r, y.r, dtheta))
        weight = complex(_geometric_weight(dtheta, 0.0))

        free = BRParams(lam, delta, free_flux, free_potential, tol)
        columns["br"].append(weight * float(br_profile(d, lam, delta)))
        columns["br_oracle"].append(br_kernel_series(x, y, free)[0])
        columns["spec"].append(weight * lam * float(bessel_j(0.0, lam * d)))
        columns["spec_oracle"].append(
            spectral_measure_series(lam, x, y, free_flux, free_potential, tol)[0]
        )
        columns["res"].append(weight * complex(_hankel_0_any(np.array([lam * d]))[0]))
        columns["res_oracle"].append(
            resolvent_kernel_series(lam, 1, x, y, free_flux, free_potential, tol)[0]
        )

        half = BRParams.pure_ab(lam, delta, 0.5, tol)
        profile = float(br_profile(d, lam, delta))
        geometric = C_NORM * complex(_geometric_weight(dtheta, 0.5)) * profile
        integral = diffractive_integral(_br_radial(lam, delta), x.r, y.r, dtheta, 0.5, lam, tol)
        diffractive_models.append(-C_NORM * complex(integral) / FOUR_PI_SQUARED)
        diffractive_targets.append(br_kernel_series(x, y, half)[0] - geometric)

    def fit(key: str) -> complex:
        return _least_squares(np.array(columns[key]), np.array(columns[f"{key}_oracle"]))

    report = CalibrationReport(
        c_norm=fit("br").real,
        c_spec=fit("spec").real,
        c_res=fit("res"),
        diffractive_weight=_least_squares(
            np.array(diffractive_models), np.array(diffractive_targets)
        ).real,
    )
    logger.info("Calibrated constants: %s", report)
    return report


def _table_series(
    r_nodes: np.ndarray, n_theta: int, lam: float, delta: float, alpha: float
) -> np.ndarray:
    """Kernel table from the partial-wave series, aliased onto the angular grid."""
    largest = lam * float(r_nodes.max())
    half_width = _initial_half_width(lam, float(r_nodes.max()), 0.0)
    ks = _window(alpha, half_width)
    nus = np.abs(ks + alpha)
    _check_order_box(nus, half_width)
    nodes, weights = gauss_jacobi_unit(math.ceil(largest) + _TABLE_EXTRA_NODES, delta)
    bessel = np.asarray(
        bessel_j(nus[:, None, None], lam * r_nodes[None, :, None] * nodes[None, None, :])
    )
    weighted = bessel * (weights * nodes * (1.0 + nodes) ** delta)
    profiles = lam**2 * np.einsum("kiq,kjq->kij", weighted, bessel)
    aliased = np.zeros((n_theta, r_nodes.size, r_nodes.size))
    np.add.at(aliased, ks % n_theta, profiles)
    table = np.fft.fft(aliased, axis=0) / TWO_PI
    return np.moveaxis(table, 0, -1)


def _table_closed(
    r_nodes: np.ndarray, n_theta: int, params: BRParams, threads: int
) -> np.ndarray:
    """Kernel table from the closed form, one vector-valued integral per radial pair."""
    dthetas = TWO_PI * np.arange(n_theta) / n_theta
    alpha0 = params.flux.alpha0
    radial = _br_radial(params.lam, params.delta)
    weight = np.asarray(_geometric_weight(dthetas, alpha0))
    gauge = np.exp(1j * params.flux.m * dthetas)
    size = r_nodes.size
    table = np.empty((size, size, n_theta), dtype=complex)

    def row(pair: tuple[int, int]) -> tuple[int, int, np.ndarray]:
        i, j = pair
        r1, r2 = float(r_nodes[i]), float(r_nodes[j])
        d = np.asarray(euclidean_distance(r1, r2, dthetas))
        values = C_NORM * weight * np.asarray(br_profile(d, params.lam, params.delta))
        if not params.flux.is_integer:
            integral = np.asarray(
                diffractive_integral(radial, r1, r2, dthetas, alpha0, params.lam, params.tol)
            )
            values = values - C_NORM * DIFFRACTIVE_WEIGHT * integral / FOUR_PI_SQUARED
        return i, j, values * gauge

    pairs = [(i, j) for i in range(size) for j in range(i, size)]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        for i, j, values in executor.map(row, pairs):
            table[i, j] = values
            if i != j:
                table[j, i] = np.conj(values[(-np.arange(n_theta)) % n_theta])
    return table


def br_kernel_table(
    r_nodes: np.ndarray,
    n_theta: int,
    params: BRParams,
    route: str = "series",
    threads: int = THREADS,
) -> np.ndarray:
    """Pure-AB kernel K(r_i, 2 pi m / N; r_j, 0) on all radial pairs and angular steps.

    Args:
        r_nodes (np.ndarray): Radial nodes, positive.
        n_theta (int): Number of angular steps N.
        params (BRParams): Kernel parameters; the potential must be pure AB.
        route (str): "series" (aliased partial waves) or "closed" (closed form per pair).
        threads (int): Worker bound for the closed route.

    Returns:
        np.ndarray: Complex table of shape (len(r_nodes), len(r_nodes), n_theta).

    Raises:
        DomainError: For an unknown route or a tabulated potential.
    """
    if params.potential.kind != "pure_ab":
        error_message = "Kernel tables are built for pure AB potentials"
        raise DomainError(error_message)
    nodes = np.asarray(r_nodes, dtype=float)
    logger.info(
        "Building %s kernel table: %d radii, %d angles, lambda = %g",
        route,
        nodes.size,
        n_theta,
        params.lam,
    )
    if route == "series":
        return _table_series(nodes, n_theta, params.lam, params.delta, params.flux.alpha_total)
    if route == "closed":
        return _table_closed(nodes, n_theta, params, threads)
    error_message = f"Unknown kernel table route {route!r}"
    raise DomainError(error_message)
