"""Data of the planar Aharonov-Bohm operator.

Flux, angular potential, eigenpairs, the Euclidean and diffractive distances and the
magnetic weights of the resolvent kernel. Angles are radians, Delta = theta1 - theta2.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from ab_riesz.config import DEFAULT_TOL
from ab_riesz.errors import (
    BIntegralError,
    DecayHypothesisError,
    DomainError,
    QuadratureConvergenceError,
)
from ab_riesz.quadrature import integrate_semi_infinite


logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
FOUR_PI_SQUARED = 4.0 * math.pi**2
MIN_POTENTIAL_SAMPLES = 4
LARGE_S = 40.0  # beyond, hyperbolic functions are evaluated in e^{-s}-scaled form
_SMALL_RADIUS2 = 1e-8
_GRID_RTOL = 1e-9

ArrayLike = float | np.ndarray


@dataclass(frozen=True, eq=False)
class AngularPotential:
    """Angular part A(theta) of a transversal, homogeneous magnetic potential.

    Pure AB potentials are constant. Tabulated potentials are sampled on the uniform grid
    theta_j = 2 pi j / N and interpolated by their trigonometric polynomial.

    Attributes:
        kind (Literal["pure_ab", "tabulated"]): Representation.
        alpha (float): Total flux, the mean of A over a period.
        samples (np.ndarray | None): Values A(theta_j) of a tabulated potential.
    """

    kind: Literal["pure_ab", "tabulated"]
    alpha: float
    samples: np.ndarray | None = None
    cosine: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    sine: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    @classmethod
    def pure_ab(cls, alpha: float) -> "AngularPotential":
        """Constant potential A(theta) = alpha.

        Args:
            alpha (float): Flux.

        Returns:
            AngularPotential: The pure Aharonov-Bohm potential.

        >>> float(AngularPotential.pure_ab(0.25).primitive(math.pi))
        0.7853981633974483
        """
        if not math.isfinite(alpha):
            error_message = f"Flux must be finite, got {alpha}"
            raise DomainError(error_message)
        return cls(kind="pure_ab", alpha=float(alpha))

    @classmethod
    def tabulated(cls, samples: Sequence[float] | np.ndarray) -> "AngularPotential":
        """Potential sampled on the uniform grid theta_j = 2 pi j / N.

        Args:
            samples (Sequence[float] | np.ndarray): Values A(theta_j), N >= 4.

        Returns:
            AngularPotential: The interpolated potential.

        Raises:
            DomainError: If there are fewer than 4 samples or a value is not finite.
        """
        values = np.asarray(samples, dtype=float)
        if values.ndim != 1 or values.size < MIN_POTENTIAL_SAMPLES:
            error_message = f"A tabulated potential needs at least {MIN_POTENTIAL_SAMPLES} samples"
            raise DomainError(error_message)
        if not np.all(np.isfinite(values)):
            error_message = "Potential samples must be finite"
            raise DomainError(error_message)
        count = values.size
        spectrum = np.fft.rfft(values) / count
        cosine = 2.0 * spectrum[1:].real
        sine = -2.0 * spectrum[1:].imag
        if count % 2 == 0:
            cosine[-1] *= 0.5
            sine[-1] = 0.0
        return cls(
            kind="tabulated",
            alpha=float(spectrum[0].real),
            samples=values,
            cosine=cosine,
            sine=sine,
        )

    def value(self, theta: ArrayLike) -> ArrayLike:
        """Evaluate A(theta).

        Args:
            theta (ArrayLike): Angle(s).

        Returns:
            ArrayLike: Potential value(s).
        """
        if self.kind == "pure_ab":
            return np.full_like(np.asarray(theta, dtype=float), self.alpha)[()]
        angles = np.asarray(theta, dtype=float)
        orders = np.arange(1, self.cosine.size + 1)
        phases = angles[..., None] * orders
        return self.alpha + np.cos(phases) @ self.cosine + np.sin(phases) @ self.sine

    def primitive(self, theta: ArrayLike) -> ArrayLike:
        """Cumulative integral of A from 0 to theta.

        Args:
            theta (ArrayLike): Angle(s).

        Returns:
            ArrayLike: primitive(theta), with primitive(2 pi) = 2 pi alpha.
        """
        angles = np.asarray(theta, dtype=float)
        if self.kind == "pure_ab":
            return (self.alpha * angles)[()]
        orders = np.arange(1, self.cosine.size + 1)
        phases = angles[..., None] * orders
        periodic = np.sin(phases) @ (self.cosine / orders) + (1.0 - np.cos(phases)) @ (
            self.sine / orders
        )
        return (self.alpha * angles + periodic)[()]

    def periodic_phase(self, theta: ArrayLike) -> ArrayLike:
        """Gauge part primitive(theta) - alpha * theta, 2 pi-periodic.

        Args:
            theta (ArrayLike): Angle(s).

        Returns:
            ArrayLike: Zero for pure AB potentials.
        """
        if self.kind == "pure_ab":
            return np.zeros_like(np.asarray(theta, dtype=float))[()]
        angles = np.asarray(theta, dtype=float)
        return (np.asarray(self.primitive(angles)) - self.alpha * angles)[()]


@dataclass(frozen=True)
class FluxParameter:
    """Total flux split into an integer gauge part and a fractional part.

    Attributes:
        alpha_total (float): Total flux.
        m (int): Integer part removed by a gauge transformation.
        alpha0 (float): Fractional part in (-1/2, 1/2].
    """

    alpha_total: float
    m: int
    alpha0: float

    @classmethod
    def from_total(cls, alpha: float) -> "FluxParameter":
        """Decompose alpha = m + alpha0 with alpha0 in (-1/2, 1/2].

        Args:
            alpha (float): Total flux.

        Returns:
            FluxParameter: The decomposition; ties at -1/2 go to +1/2.

        >>> FluxParameter.from_total(-0.5)
        FluxParameter(alpha_total=-0.5, m=-1, alpha0=0.5)
        """
        if not math.isfinite(alpha):
            error_message = f"Flux must be finite, got {alpha}"
            raise DomainError(error_message)
        m = math.ceil(alpha - 0.5)
        return cls(alpha_total=float(alpha), m=m, alpha0=float(alpha - m))

    @property
    def is_integer(self) -> bool:
        """Whether the flux is an integer."""
        return self.alpha0 == 0.0


@dataclass(frozen=True)
class PolarPoint:
    """A point of the punctured plane in polar coordinates.

    Attributes:
        r (float): Radius, r > 0.
        theta (float): Angle, normalized to [0, 2 pi).
    """

    r: float
    theta: float

    def __post_init__(self) -> None:
        """Validate the radius and normalize the angle."""
        if not (math.isfinite(self.r) and self.r > 0 and math.isfinite(self.theta)):
            error_message = f"Polar point needs r > 0 and a finite angle: ({self.r}, {self.theta})"
            raise DomainError(error_message)
        angle = self.theta % TWO_PI
        object.__setattr__(self, "theta", 0.0 if angle >= TWO_PI else angle)


@dataclass(frozen=True)
class GeometricFactors:
    """Distances entering the kernel of a pair of points.

    Attributes:
        d (float): Euclidean distance |x - y|.
        d_s (Callable[[ArrayLike], ArrayLike]): Diffractive distance s -> d_s.
        b (float): sqrt(2) sin((Delta + pi) / 2), the gap to the shadow line.
    """

    d: float
    d_s: Callable[[ArrayLike], ArrayLike]
    b: float


@dataclass(frozen=True)
class MagneticFactors:
    """Magnetic weights of the resolvent kernel of a pair of points.

    Attributes:
        a_weight (complex): Geometric weight A(theta1, theta2).
        b_weight (Callable[[ArrayLike], ArrayLike]): Diffractive weight s -> B(s, theta1, theta2).
    """

    a_weight: complex
    b_weight: Callable[[ArrayLike], ArrayLike]


def flux(potential: AngularPotential) -> float:
    """Total flux, the mean of A over [0, 2 pi).

    Args:
        potential (AngularPotential): Angular potential.

    Returns:
        float: The flux alpha.

    >>> flux(AngularPotential.pure_ab(0.5))
    0.5
    """
    return potential.alpha


def eigen_nu(k: int, alpha: float) -> float:
    """Square root |k + alpha| of the k-th angular eigenvalue.

    Args:
        k (int): Angular quantum number.
        alpha (float): Flux.

    Returns:
        float: nu_k.

    >>> eigen_nu(3, -0.25)
    2.75
    """
    return abs(k + alpha)


def eigenfunction(k: int, theta: ArrayLike, potential: AngularPotential) -> complex | np.ndarray:
    """Normalized angular eigenfunction exp(-i(theta(k + alpha) - primitive(theta))) / sqrt(2 pi).

    Args:
        k (int): Angular quantum number.
        theta (ArrayLike): Angle(s) in [0, 2 pi).
        potential (AngularPotential): Angular potential.

    Returns:
        complex | np.ndarray: Eigenfunction value(s), of modulus 1 / sqrt(2 pi).
    """
    angles = np.asarray(theta, dtype=float)
    if potential.kind == "pure_ab":
        phase = k * angles
    else:
        phase = angles * (k + potential.alpha) - np.asarray(potential.primitive(angles))
    return (np.exp(-1j * phase) / math.sqrt(TWO_PI))[()]


def euclidean_distance(r1: ArrayLike, r2: ArrayLike, dtheta: ArrayLike) -> ArrayLike:
    """|x - y| from the radii and the angle difference, with a non-negative radicand.

    Args:
        r1 (ArrayLike): First radius.
        r2 (ArrayLike): Second radius.
        dtheta (ArrayLike): Angle difference.

    Returns:
        ArrayLike: sqrt((r1 - r2)**2 + 4 r1 r2 sin(dtheta / 2)**2).
    """
    half_sine = np.sin(0.5 * np.asarray(dtheta, dtype=float))
    radicand = (np.asarray(r1) - r2) ** 2 + 4.0 * np.asarray(r1) * r2 * half_sine**2
    return np.sqrt(np.maximum(radicand, 0.0))[()]


def diffractive_distance(s: ArrayLike, r1: ArrayLike, r2: ArrayLike) -> ArrayLike:
    """Diffractive distance sqrt(r1**2 + r2**2 + 2 r1 r2 cosh s).

    Args:
        s (ArrayLike): Diffraction parameter(s), s >= 0.
        r1 (ArrayLike): First radius.
        r2 (ArrayLike): Second radius.

    Returns:
        ArrayLike: d_s, increasing in s with d_0 = r1 + r2.
    """
    s_array, r1_array, r2_array = np.broadcast_arrays(
        np.asarray(s, dtype=float), np.asarray(r1, dtype=float), np.asarray(r2, dtype=float)
    )
    result = np.empty(s_array.shape)
    near = s_array <= LARGE_S
    half_sinh = np.sinh(0.5 * s_array[near])
    product = r1_array[near] * r2_array[near]
    result[near] = np.sqrt((r1_array[near] + r2_array[near]) ** 2 + 4.0 * product * half_sinh**2)
    if not np.all(near):
        far = ~near
        product = r1_array[far] * r2_array[far]
        decay = np.exp(-s_array[far])
        squares = (r1_array[far] ** 2 + r2_array[far] ** 2) / product
        result[far] = (
            np.sqrt(product)
            * np.exp(0.5 * s_array[far])
            * np.sqrt(1.0 + squares * decay + decay**2)
        )
    return result[()]


def distance_d(x: PolarPoint, y: PolarPoint) -> float:
    """Euclidean distance of two polar points.

    Args:
        x (PolarPoint): First point.
        y (PolarPoint): Second point.

    Returns:
        float: |x - y|.

    >>> distance_d(PolarPoint(1.0, 0.0), PolarPoint(1.0, math.pi))
    2.0
    """
    return float(euclidean_distance(x.r, y.r, x.theta - y.theta))


def distance_ds(s: ArrayLike, x: PolarPoint, y: PolarPoint) -> ArrayLike:
    """Diffractive distance of two polar points.

    Args:
        s (ArrayLike): Diffraction parameter(s), s >= 0.
        x (PolarPoint): First point.
        y (PolarPoint): Second point.

    Returns:
        ArrayLike: d_s(x, y).

    Raises:
        DomainError: For negative s.
    """
    if np.any(np.asarray(s) < 0):
        error_message = "The diffraction parameter must be non-negative"
        raise DomainError(error_message)
    return diffractive_distance(s, x.r, y.r)


def shadow_angle(dtheta: ArrayLike) -> ArrayLike:
    """Delta + pi wrapped to (-pi, pi]; zero on the shadow line |Delta| = pi.

    Args:
        dtheta (ArrayLike): Angle difference in (-2 pi, 2 pi).

    Returns:
        ArrayLike: The wrapped angle psi.
    """
    phi = np.asarray(dtheta, dtype=float) + math.pi
    return (phi - TWO_PI * np.round(phi / TWO_PI))[()]


def shadow_gap(dtheta: ArrayLike) -> ArrayLike:
    """b = sqrt(2) sin((Delta + pi) / 2), up to the sign fixed by the wrapping.

    Args:
        dtheta (ArrayLike): Angle difference.

    Returns:
        ArrayLike: b, with b**2 = 1 - cos(Delta + pi).
    """
    return (math.sqrt(2.0) * np.sin(0.5 * np.asarray(shadow_angle(dtheta))))[()]


def flux_indicator(dtheta: ArrayLike, alpha: float) -> complex | np.ndarray:
    """Sheet factor of the geometric weight.

    1 for |Delta| < pi, exp(-2 pi i alpha) for Delta > pi, exp(2 pi i alpha) for
    Delta < -pi and the average of the adjacent values on |Delta| = pi.

    Args:
        dtheta (ArrayLike): Angle difference in (-2 pi, 2 pi).
        alpha (float): Flux.

    Returns:
        complex | np.ndarray: The factor.
    """
    delta = np.asarray(dtheta, dtype=float)
    forward = np.exp(-2j * math.pi * alpha)
    backward = np.exp(2j * math.pi * alpha)
    factor = np.where(np.abs(delta) < math.pi, 1.0 + 0j, 0j)
    factor = np.where(delta > math.pi, forward, factor)
    factor = np.where(delta < -math.pi, backward, factor)
    factor = np.where(delta == math.pi, 0.5 * (1.0 + forward), factor)
    factor = np.where(delta == -math.pi, 0.5 * (1.0 + backward), factor)
    return factor[()]


def a_factor(
    theta1: ArrayLike, theta2: ArrayLike, flux: FluxParameter, potential: AngularPotential
) -> complex | np.ndarray:
    """Geometric weight exp(i int_{theta2}^{theta1} A) * indicator / (4 pi**2).

    Args:
        theta1 (ArrayLike): Angle of x in [0, 2 pi).
        theta2 (ArrayLike): Angle of y in [0, 2 pi).
        flux (FluxParameter): Flux decomposition.
        potential (AngularPotential): Angular potential, of flux flux.alpha_total.

    Returns:
        complex | np.ndarray: A(theta1, theta2).

    >>> weight = a_factor(0.0, 1.0, FluxParameter.from_total(0.0), AngularPotential.pure_ab(0.0))
    >>> round(abs(weight) * FOUR_PI_SQUARED, 12)
    1.0
    """
    dtheta = np.asarray(theta1, dtype=float) - np.asarray(theta2, dtype=float)
    line = np.asarray(potential.primitive(theta1)) - np.asarray(potential.primitive(theta2))
    value = np.exp(1j * line) * flux_indicator(dtheta, flux.alpha_total) / FOUR_PI_SQUARED
    return value[()]


def a_factor_literal(
    theta1: ArrayLike, theta2: ArrayLike, flux: FluxParameter, potential: AngularPotential
) -> complex | np.ndarray:
    """Geometric weight with the line integral taken from theta1 to theta2.

    Args:
        theta1 (ArrayLike): Angle of x.
        theta2 (ArrayLike): Angle of y.
        flux (FluxParameter): Flux decomposition.
        potential (AngularPotential): Angular potential.

    Returns:
        complex | np.ndarray: The conjugate-orientation weight.
    """
    dtheta = np.asarray(theta1, dtype=float) - np.asarray(theta2, dtype=float)
    line = np.asarray(potential.primitive(theta2)) - np.asarray(potential.primitive(theta1))
    value = np.exp(1j * line) * flux_indicator(dtheta, flux.alpha_total) / FOUR_PI_SQUARED
    return value[()]


def magnetic_bracket(s: ArrayLike, dtheta: ArrayLike, alpha0: float) -> np.ndarray:
    """Bracket of the diffractive weight for a fractional flux alpha0.

    sin(|a| pi) e^{-|a| s} + sin(a pi) [(e^{-s} - cos phi) sinh(a s) - i sin phi cosh(a s)]
    / (cosh s - cos phi), phi = Delta + pi, evaluated with
    cosh s - cos phi = 2 sinh(s/2)**2 + b**2 and e^{-s} - cos phi = expm1(-s) + b**2.
    At s = b = 0 the ratio takes its limit -2a along the shadow line.

    Args:
        s (ArrayLike): Diffraction parameter(s), s >= 0.
        dtheta (ArrayLike): Angle difference(s), broadcast against s.
        alpha0 (float): Fractional flux in (-1, 1).

    Returns:
        np.ndarray: Complex bracket values; zero for alpha0 = 0.
    """
    s_array, psi = np.broadcast_arrays(
        np.asarray(s, dtype=float), np.asarray(shadow_angle(dtheta), dtype=float)
    )
    if alpha0 == 0.0:
        return np.zeros(s_array.shape, dtype=complex)
    a = alpha0
    b_squared = 2.0 * np.sin(0.5 * psi) ** 2
    sin_phi = np.sin(psi)
    cos_phi = np.cos(psi)
    real = np.empty(s_array.shape)
    imag = np.empty(s_array.shape)

    near = s_array <= LARGE_S
    sn, bn = s_array[near], b_squared[near]
    denominator = 2.0 * np.sinh(0.5 * sn) ** 2 + bn
    numerator = np.expm1(-sn) + bn
    small = sn**2 + bn < _SMALL_RADIUS2
    singular = small & (denominator == 0.0)
    safe = np.where(singular, 1.0, denominator)
    real[near] = np.where(singular, -2.0 * a, numerator * np.sinh(a * sn) / safe)
    imag[near] = np.where(singular, 0.0, -sin_phi[near] * np.cosh(a * sn) / safe)

    if not np.all(near):
        far = ~near
        sf = s_array[far]
        decay = np.exp(-sf)
        scaled = 1.0 + decay**2 - 2.0 * cos_phi[far] * decay
        grow = np.exp((abs(a) - 1.0) * sf)
        shrink = np.exp(-(abs(a) + 1.0) * sf)
        sign = math.copysign(1.0, a)
        real[far] = (decay - cos_phi[far]) * sign * (grow - shrink) / scaled
        imag[far] = -sin_phi[far] * (grow + shrink) / scaled

    leading = math.sin(abs(a) * math.pi) * np.exp(-abs(a) * s_array)
    return leading + math.sin(a * math.pi) * (real + 1j * imag)


def b_factor(
    s: ArrayLike,
    theta1: ArrayLike,
    theta2: ArrayLike,
    flux: FluxParameter,
    potential: AngularPotential,
) -> complex | np.ndarray:
    """Diffractive weight B(s, theta1, theta2).

    -(1/4 pi**2) exp(-i alpha Delta + i int_{theta2}^{theta1} A) * bracket(alpha0), the
    phase being exactly 1 for pure AB potentials.

    Args:
        s (ArrayLike): Diffraction parameter(s), s >= 0.
        theta1 (ArrayLike): Angle of x.
        theta2 (ArrayLike): Angle of y.
        flux (FluxParameter): Flux decomposition.
        potential (AngularPotential): Angular potential.

    Returns:
        complex | np.ndarray: B values; identically zero for integer flux.

    Raises:
        DomainError: For negative s.
    """
    if np.any(np.asarray(s) < 0):
        error_message = "The diffraction parameter must be non-negative"
        raise DomainError(error_message)
    dtheta = np.asarray(theta1, dtype=float) - np.asarray(theta2, dtype=float)
    bracket = magnetic_bracket(s, dtheta, flux.alpha0)
    if potential.kind == "pure_ab":
        phase = 1.0 + 0j
    else:
        gauge = np.asarray(potential.periodic_phase(theta1)) - np.asarray(
            potential.periodic_phase(theta2)
        )
        phase = np.exp(1j * gauge)
    return (-phase * bracket / FOUR_PI_SQUARED)[()]


def b_integral_check(
    theta_grid: Sequence[float] | np.ndarray, flux: FluxParameter, tol: float = DEFAULT_TOL
) -> float:
    """Supremum over Delta of the integral of |B| over s in [0, inf).

    Args:
        theta_grid (Sequence[float] | np.ndarray): Angle differences.
        flux (FluxParameter): Flux decomposition.
        tol (float): Quadrature tolerance.

    Returns:
        float: The supremum, zero for integer flux.

    Raises:
        BIntegralError: If the integral fails for some angle difference.
    """
    if flux.is_integer:
        return 0.0
    rate = abs(flux.alpha0)
    supremum = 0.0
    for dtheta in np.asarray(theta_grid, dtype=float):
        gap = abs(float(shadow_gap(dtheta)))
        breakpoints = [gap, 4.0 * gap] if gap > 0 else []
        try:
            result = integrate_semi_infinite(
                lambda s, dtheta=dtheta: np.abs(magnetic_bracket(s, dtheta, flux.alpha0))
                / FOUR_PI_SQUARED,
                rate,
                tol,
                breakpoints=breakpoints,
            )
        except (QuadratureConvergenceError, DecayHypothesisError) as error:
            error_message = f"Integral of |B| failed at Delta = {dtheta:.17g}: {error}"
            raise BIntegralError(error_message, float(dtheta)) from error
        supremum = max(supremum, float(result.value))
        logger.debug("Integral of |B| at Delta = %.6g: %.12g", dtheta, result.value)
    return supremum


def geometric_factors(x: PolarPoint, y: PolarPoint) -> GeometricFactors:
    """Distances of a pair of points.

    Args:
        x (PolarPoint): First point.
        y (PolarPoint): Second point.

    Returns:
        GeometricFactors: d, d_s and b.
    """
    return GeometricFactors(
        d=distance_d(x, y),
        d_s=lambda s: distance_ds(s, x, y),
        b=float(shadow_gap(x.theta - y.theta)),
    )


def magnetic_factors(
    x: PolarPoint, y: PolarPoint, flux: FluxParameter, potential: AngularPotential
) -> MagneticFactors:
    """Magnetic weights of a pair of points.

    Args:
        x (PolarPoint): First point.
        y (PolarPoint): Second point.
        flux (FluxParameter): Flux decomposition.
        potential (AngularPotential): Angular potential.

    Returns:
        MagneticFactors: A and s -> B.
    """
    return MagneticFactors(
        a_weight=complex(a_factor(x.theta, y.theta, flux, potential)),
        b_weight=lambda s: b_factor(s, x.theta, y.theta, flux, potential),
    )


def distance_bound_check(samples: int, rng: np.random.Generator) -> float:
    """Fraction of random tuples (r1, r2, Delta, s) with d_s < |x - y|.

    Args:
        samples (int): Number of tuples.
        rng (np.random.Generator): Random source.

    Returns:
        float: Violation fraction, zero when d_s >= d holds.
    """
    r1 = rng.uniform(1e-3, 10.0, samples)
    r2 = rng.uniform(1e-3, 10.0, samples)
    dtheta = rng.uniform(-TWO_PI, TWO_PI, samples)
    s = rng.uniform(0.0, 60.0, samples)
    d = np.asarray(euclidean_distance(r1, r2, dtheta))
    d_s = np.asarray(diffractive_distance(s, r1, r2))
    violations = int(np.count_nonzero(d_s < d * (1.0 - 4.0 * np.finfo(float).eps)))
    return violations / samples


def load_potential(path: Path) -> AngularPotential:
    """Read a tabulated potential from a two-column comma-separated file (theta, A).

    Args:
        path (Path): File path; lines starting with '#' are comments.

    Returns:
        AngularPotential: The tabulated potential.

    Raises:
        DomainError: If the grid is not theta_j = 2 pi j / N or values are not finite.
    """
    try:
        table = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except ValueError as error:
        error_message = f"Unreadable potential file {path}: {error}"
        raise DomainError(error_message) from error
    if table.shape[1] != 2:  # noqa: PLR2004
        error_message = f"Potential file {path} must have two columns, found {table.shape[1]}"
        raise DomainError(error_message)
    theta = table[:, 0]
    expected = TWO_PI * np.arange(theta.size) / theta.size
    if not np.allclose(theta, expected, rtol=0.0, atol=_GRID_RTOL * TWO_PI):
        error_message = f"Potential file {path} is not on the uniform grid 2 pi j / N"
        raise DomainError(error_message)
    logger.info("Loaded tabulated potential with %d samples from %s", theta.size, path)
    return AngularPotential.tabulated(table[:, 1])


def save_potential(path: Path, potential: AngularPotential) -> None:
    """Write a tabulated potential as comma-separated (theta, A) rows.

    Args:
        path (Path): Destination.
        potential (AngularPotential): A tabulated potential.

    Raises:
        DomainError: For pure AB potentials, which have no samples.
    """
    if potential.samples is None:
        error_message = "Only tabulated potentials can be saved"
        raise DomainError(error_message)
    count = potential.samples.size
    theta = TWO_PI * np.arange(count) / count
    table = np.column_stack([theta, potential.samples])
    np.savetxt(path, table, fmt="%.17g", delimiter=",", header="theta,A")
