"""Numerical checks of the dyadic kernel estimates.

The kernels are cut into dyadic pieces by a partition of unity in the distance |x - y|
(geometric pieces) or in r1 + r2 (diffractive pieces). Every check scans a grid, takes
the supremum of |kernel| / bound and reports it as a `BoundReport`; the amplitude symbol
of the pieces is the constant 1.
"""

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import TypeVar

import numpy as np
from numpy.typing import ArrayLike

from ab_riesz.ab_model import (
    FluxParameter,
    PolarPoint,
    euclidean_distance,
    magnetic_bracket,
    shadow_angle,
)
from ab_riesz.config import (
    D_BOUND_CEILING,
    D_BOUND_J_WINDOW,
    DEFAULT_SEED,
    DEFAULT_TOL,
    DERIVATIVE_TOLERANCE,
    DET_FD_STEP,
    DET_TOLERANCE,
    FOURIER_NYQUIST_MARGIN,
    FOURIER_REFINEMENT,
    FTH_BOUND_CEILING,
    H_SCALING_TOLERANCE,
    H_THETA_CUTOFF,
    IJ_BOUND_CEILING,
    PARTITION_INNER,
    PARTITION_OUTER,
    THREADS,
)
from ab_riesz.errors import DiagonalSingularityError, DomainError, ResolutionError
from ab_riesz.kernels import Bracket, diffractive_integral
from ab_riesz.quadrature import PhaseMap, integrate_oscillatory_tail
from ab_riesz.utils import to_record, write_records


logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

D_BOUND_SUMS = (0.5, 0.8, 1.0, 1.2)
D_BOUND_PRODUCTS = tuple(float(p) for p in np.geomspace(0.1, 1e3, 33))
D_BOUND_ANGLES = (0.0, 0.5 * math.pi, math.pi - 1e-1, math.pi - 1e-2, math.pi - 1e-3, math.pi)
IJ_SUM = 1.2
IJ_PRODUCTS = tuple(float(p) for p in np.geomspace(0.1, 0.36, 5))
IJ_THETAS = (1e-3, 3e-3, 1e-2, 3e-2, 1e-1)
H_SCALING_SUM = 1.0
H_SCALING_PRODUCTS = (0.1, 0.2)
H_SCALING_THETAS = (0.01, 0.02, 0.05, 0.1)
STABILITY_FACTOR = 2.0

_PHASE_BREAKPOINTS = tuple(4.0**k for k in range(8))


@dataclass(frozen=True)
class DyadicPiece:
    """Index of a dyadic kernel piece.

    Attributes:
        j (int): Dyadic index, j >= 0.
        ell (int | None): Diffractive component in {1, 2, 3}; None for geometric pieces.
        delta (float): Riesz order.
        flux (FluxParameter): Flux decomposition.
    """

    j: int
    ell: int | None
    delta: float
    flux: FluxParameter

    def __post_init__(self) -> None:
        """Validate the indices."""
        if self.j < 0:
            error_message = f"Dyadic index must be non-negative, got {self.j}"
            raise DomainError(error_message)
        if self.ell is not None and self.ell not in {1, 2, 3}:
            error_message = f"Diffractive component must be 1, 2 or 3, got {self.ell}"
            raise DomainError(error_message)
        if not self.delta >= 0:
            error_message = f"delta must be non-negative, got {self.delta}"
            raise DomainError(error_message)

    @property
    def exponent(self) -> float:
        """Decay exponent 3/2 + delta of the pieces."""
        return 1.5 + self.delta

    @property
    def scale(self) -> float:
        """Size 2**(-j (3/2 + delta)) of the piece."""
        return 2.0 ** (-self.j * self.exponent)


@dataclass(frozen=True)
class BoundReport:
    """Supremum of a kernel-to-bound ratio over a grid.

    Attributes:
        suite (str): Name of the check.
        j (int): Dyadic index, -1 when the report covers several.
        ell (int): Diffractive component, 0 when not applicable.
        alpha (float): Total flux, 0 for checks that do not depend on it.
        delta (float): Riesz order, 0 for checks that do not depend on it.
        sup_ratio (float): Supremum of the ratio, non-negative.
        argmax_point (tuple[float, ...]): Grid node of the supremum.
        grid_spec (str): Description of the grid.
        ceiling (float): Largest accepted ratio.
        details (dict[str, float]): Check-specific quantities.
        passed (bool): Whether sup_ratio <= ceiling.
    """

    suite: str
    j: int
    ell: int
    alpha: float
    delta: float
    sup_ratio: float
    argmax_point: tuple[float, ...]
    grid_spec: str
    ceiling: float
    details: dict[str, float] = field(default_factory=dict)
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        """Derive the verdict from the supremum."""
        if not self.sup_ratio >= 0:
            error_message = f"Ratios are non-negative, got {self.sup_ratio}"
            raise DomainError(error_message)
        object.__setattr__(self, "passed", bool(self.sup_ratio <= self.ceiling))


def _smoothstep(t: np.ndarray) -> np.ndarray:
    """C2 quintic rising from 0 at t <= 0 to 1 at t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    return t**3 * (10.0 - 15.0 * t + 6.0 * t**2)


def _cutoff(r: ArrayLike) -> np.ndarray:
    """Equal to 1 on [0, 0.8] and 0 on [1.25, inf)."""
    t = (np.asarray(r, dtype=float) - PARTITION_INNER) / (PARTITION_OUTER - PARTITION_INNER)
    return 1.0 - _smoothstep(t)


def bump_beta(r: ArrayLike) -> float | np.ndarray:
    """Dyadic bump chi(r) - chi(2 r), supported in [0.4, 1.25].

    Args:
        r (ArrayLike): Radii r >= 0.

    Returns:
        float | np.ndarray: Bump values.

    >>> float(bump_beta(0.2))
    0.0
    """
    return (_cutoff(r) - _cutoff(2.0 * np.asarray(r, dtype=float)))[()]


def partition(j: int, r: ArrayLike) -> float | np.ndarray:
    """Member j of the dyadic partition of unity.

    partition(0, r) = chi(r) and partition(j, r) = beta(2**-j r) for j >= 1, so that the
    members sum to 1 for every r > 0.

    Args:
        j (int): Dyadic index.
        r (ArrayLike): Radii.

    Returns:
        float | np.ndarray: Partition values.

    Raises:
        DomainError: For negative j.
    """
    if j < 0:
        error_message = f"Dyadic index must be non-negative, got {j}"
        raise DomainError(error_message)
    if j == 0:
        return _cutoff(r)[()]
    return bump_beta(2.0**-j * np.asarray(r, dtype=float))


def kernel_piece_G(  # noqa: N802
    j: int, x: PolarPoint, y: PolarPoint, delta: float, flux: FluxParameter
) -> complex:
    """Geometric dyadic piece beta_j(d) exp(i d) (1 + d)**(-3/2 - delta) on the lit sheet.

    The value carries the flux phase exp(i alpha0 Delta) and vanishes for |Delta| > pi.

    Args:
        j (int): Dyadic index.
        x (PolarPoint): First point.
        y (PolarPoint): Second point.
        delta (float): Riesz order.
        flux (FluxParameter): Flux decomposition.

    Returns:
        complex: Piece value.
    """
    piece = DyadicPiece(j, None, delta, flux)
    dtheta = x.theta - y.theta
    if abs(dtheta) > math.pi:
        return 0j
    distance = float(euclidean_distance(x.r, y.r, dtheta))
    cutoff = float(partition(j, distance))
    if cutoff == 0.0:
        return 0j
    modulus = cutoff * (1.0 + distance) ** -piece.exponent
    return modulus * complex(np.exp(1j * (distance + flux.alpha0 * dtheta)))


@dataclass(frozen=True)
class _ModelProfile:
    """exp(i u) (1 + u)**-decay, the oscillating profile of the dyadic pieces."""

    decay: float

    def values(self, u: np.ndarray) -> np.ndarray:
        return np.exp(1j * u) * (1.0 + u) ** -self.decay

    def envelopes(self, u: np.ndarray) -> list[tuple[float, np.ndarray]]:
        return [(1.0, (1.0 + u) ** -self.decay)]


def _piece_bracket(ell: int, alpha0: float) -> Bracket:
    """Weight w_ell of the diffractive component ell.

    w_1 = sin(|a| pi) e^{-|a| s}, w_2 = sin(a pi) (e^{-s} - cos phi) sinh(a s) / D and
    w_3 = sin(a pi) sin phi cosh(a s) / D, D = cosh s - cos phi, so that
    w_1 + w_2 - i w_3 is the magnetic bracket.
    """
    leading_weight = math.sin(abs(alpha0) * math.pi)

    def bracket(s: np.ndarray, angles: np.ndarray) -> np.ndarray:
        full = magnetic_bracket(s, angles, alpha0)
        leading = leading_weight * np.exp(-abs(alpha0) * np.asarray(s, dtype=float))
        if ell == 1:
            return np.broadcast_to(leading, full.shape).astype(complex)
        if ell == 2:  # noqa: PLR2004
            return (full.real - leading).astype(complex)
        return (-full.imag).astype(complex)

    return bracket


def _piece_d_values(
    piece: DyadicPiece, r1: float, r2: float, dthetas: np.ndarray, tol: float
) -> np.ndarray:
    """Diffractive piece at the radii (r1, r2) for several angle differences."""
    alpha0 = piece.flux.alpha0
    cutoff = float(partition(piece.j, r1 + r2))
    if cutoff == 0.0 or alpha0 == 0.0 or piece.ell is None:
        return np.zeros(dthetas.shape, dtype=complex)
    values = diffractive_integral(
        _ModelProfile(piece.exponent),
        r1,
        r2,
        dthetas,
        alpha0,
        1.0,
        tol,
        bracket=_piece_bracket(piece.ell, alpha0),
    )
    return cutoff * np.asarray(values, dtype=complex)


def kernel_piece_D(  # noqa: N802, PLR0913, PLR0917
    ell: int,
    j: int,
    x: PolarPoint,
    y: PolarPoint,
    delta: float,
    flux: FluxParameter,
    tol: float = DEFAULT_TOL,
) -> complex:
    """Diffractive dyadic piece beta(2**-j (r1 + r2)) int_0^inf e^{i n_s} w_ell(s) ds.

    The integrand is exp(i n_s) (1 + n_s)**(-3/2 - delta) w_ell(s) with n_s the
    diffractive distance. The three components sum, as D_1 + D_2 - i D_3, to the
    magnetic bracket integral and vanish for integer flux.

    Args:
        ell (int): Component in {1, 2, 3}.
        j (int): Dyadic index.
        x (PolarPoint): First point.
        y (PolarPoint): Second point.
        delta (float): Riesz order.
        flux (FluxParameter): Flux decomposition.
        tol (float): Quadrature tolerance.

    Returns:
        complex: Piece value.
    """
    piece = DyadicPiece(j, ell, delta, flux)
    dtheta = np.array([x.theta - y.theta])
    return complex(_piece_d_values(piece, x.r, y.r, dtheta, tol)[0])


def _radii(total: float, product: float) -> tuple[float, float]:
    """Radii with the given sum and product."""
    spread = math.sqrt(max(0.25 * total**2 - product, 0.0))
    return 0.5 * total + spread, 0.5 * total - spread


def _map_nodes(evaluate: Callable[[T], R], nodes: Sequence[T], threads: int) -> list[R]:
    if threads <= 1:
        return [evaluate(node) for node in nodes]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(evaluate, nodes))


def kernel_piece_D_table(  # noqa: N802, PLR0913, PLR0917
    ell: int,
    j: int,
    r_nodes: np.ndarray,
    n_theta: int,
    delta: float,
    flux: FluxParameter,
    tol: float = DEFAULT_TOL,
    threads: int = THREADS,
) -> np.ndarray:
    """Diffractive piece D_ell at (r_i, 2 pi m / N; r_k, 0) for all radial pairs.

    The piece depends on the radii only through r1 + r2 and the diffractive distance,
    so the table is symmetric in its two radial axes.

    Args:
        ell (int): Component in {1, 2, 3}.
        j (int): Dyadic index.
        r_nodes (np.ndarray): Radial nodes.
        n_theta (int): Number of angular steps N.
        delta (float): Riesz order.
        flux (FluxParameter): Flux decomposition.
        tol (float): Quadrature tolerance relative to the piece size.
        threads (int): Worker bound.

    Returns:
        np.ndarray: Complex table of shape (len(r_nodes), len(r_nodes), n_theta).
    """
    piece = DyadicPiece(j, ell, delta, flux)
    nodes = np.asarray(r_nodes, dtype=float)
    table = np.zeros((nodes.size, nodes.size, n_theta), dtype=complex)
    if flux.is_integer:
        return table
    dthetas = 2.0 * math.pi * np.arange(n_theta) / n_theta
    pairs = [(i, k) for i in range(nodes.size) for k in range(i, nodes.size)]

    def evaluate(pair: tuple[int, int]) -> np.ndarray:
        i, k = pair
        return _piece_d_values(piece, float(nodes[i]), float(nodes[k]), dthetas, tol * piece.scale)

    for (i, k), values in zip(pairs, _map_nodes(evaluate, pairs, threads), strict=True):
        table[i, k] = values
        table[k, i] = values
    logger.info("Tabulated D%d piece at j = %d on %d radial pairs", ell, j, len(pairs))
    return table


def verify_D_bound(  # noqa: N802
    ell: int,
    j: int,
    delta: float,
    flux: FluxParameter,
    *,
    exponent: float | None = None,
    tol: float = 1e-8,
    threads: int = THREADS,
) -> BoundReport:
    """Scan |K_D^{ell,j}| / [2**(-j e) (1 + 2**j r1 r2)**(-1/2)] in the rescaled frame.

    Rescaled radii r1 + r2 = sigma are lifted to 2**j r1, 2**j r2. The grid covers
    sigma in `D_BOUND_SUMS`, 2**j r1 r2 in `D_BOUND_PRODUCTS` (as far as r1 r2 <=
    sigma**2 / 4 allows) and the angles `D_BOUND_ANGLES`, which approach the shadow line.

    Args:
        ell (int): Component, 1 or 2.
        j (int): Dyadic index.
        delta (float): Riesz order.
        flux (FluxParameter): Flux decomposition.
        exponent (float | None): Exponent e of the bound, 3/2 + delta by default.
        tol (float): Quadrature tolerance relative to the piece size.
        threads (int): Worker threads over the grid nodes.

    Returns:
        BoundReport: Report of suite "D".

    Raises:
        DomainError: If ell is not 1 or 2.
    """
    if ell not in {1, 2}:
        error_message = f"The decay bound covers the components 1 and 2, got {ell}"
        raise DomainError(error_message)
    piece = DyadicPiece(j, ell, delta, flux)
    exponent = piece.exponent if exponent is None else exponent
    scale = 2.0**j
    nodes = [
        (total, product)
        for total in D_BOUND_SUMS
        for product in D_BOUND_PRODUCTS
        if product / scale <= 0.25 * total**2
    ]
    angles = np.array(D_BOUND_ANGLES)
    grid_spec = (
        f"sigma={list(D_BOUND_SUMS)}; 2^j r1 r2 in [0.1, 1000] x{len(D_BOUND_PRODUCTS)}"
        f" ({len(nodes)} kept); angles={len(D_BOUND_ANGLES)}"
    )

    def evaluate(node: tuple[float, float]) -> np.ndarray:
        total, product = node
        r1, r2 = _radii(total, product / scale)
        values = _piece_d_values(piece, scale * r1, scale * r2, angles, tol * piece.scale)
        bound = 2.0 ** (-j * exponent) / math.sqrt(1.0 + product)
        return np.abs(values) / bound

    ratios = np.array(_map_nodes(evaluate, nodes, threads))
    node_index, angle_index = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
    total, product = nodes[int(node_index)]
    sup_ratio = float(ratios[node_index, angle_index])
    logger.info(
        "D bound ell=%d j=%d alpha=%g: sup ratio %.4g", ell, j, flux.alpha_total, sup_ratio
    )
    return BoundReport(
        suite="D",
        j=j,
        ell=ell,
        alpha=flux.alpha_total,
        delta=delta,
        sup_ratio=sup_ratio,
        argmax_point=(total, product, float(angles[angle_index])),
        grid_spec=grid_spec,
        ceiling=D_BOUND_CEILING,
        details={"exponent": exponent, "nodes": float(len(nodes) * angles.size)},
    )


def d_bound_scan(
    ell: int,
    delta: float,
    flux: FluxParameter,
    *,
    js: Sequence[int] = D_BOUND_J_WINDOW,
    exponent: float | None = None,
    threads: int = THREADS,
) -> tuple[list[BoundReport], bool]:
    """Run `verify_D_bound` over several dyadic indices and test their stability.

    Args:
        ell (int): Component, 1 or 2.
        delta (float): Riesz order.
        flux (FluxParameter): Flux decomposition.
        js (Sequence[int]): Dyadic indices.
        exponent (float | None): Exponent override of the bound.
        threads (int): Worker threads.

    Returns:
        tuple[list[BoundReport], bool]: Reports, and whether the largest supremum stays
        within twice the smallest.
    """
    reports = [
        verify_D_bound(ell, j, delta, flux, exponent=exponent, threads=threads) for j in js
    ]
    ratios = [report.sup_ratio for report in reports]
    stable = max(ratios) <= STABILITY_FACTOR * min(ratios)
    if not stable:
        logger.warning("D bound ratios drift across j: %s", ", ".join(f"{r:.3g}" for r in ratios))
    return reports, stable


def gaussian_phase_integral(kappa: float, a: float, tol: float = DEFAULT_TOL) -> complex:
    """Integral of exp(i kappa s**2) / (s**2 + a**2) over s in [0, inf).

    Evaluated as g(kappa a**2) / a with g(z) the integral of exp(i z t**2) / (1 + t**2),
    whose far field is integrated in the phase z t**2.

    Args:
        kappa (float): Frequency, kappa > 0.
        a (float): Width, a > 0.
        tol (float): Quadrature tolerance.

    Returns:
        complex: Integral value.

    Raises:
        DomainError: If kappa or a is not positive.
    """
    if not (kappa > 0 and a > 0):
        error_message = f"Gaussian phase integral needs kappa, a > 0, got ({kappa}, {a})"
        raise DomainError(error_message)
    z = kappa * a**2

    def integrand(t: np.ndarray) -> np.ndarray:
        return np.exp(1j * z * t**2) / (1.0 + t**2)

    def forward(t: np.ndarray) -> np.ndarray:
        return z * np.asarray(t) ** 2

    def inverse(u: np.ndarray) -> np.ndarray:
        return np.sqrt(np.maximum(np.asarray(u), 0.0) / z)

    def rate(t: np.ndarray) -> np.ndarray:
        return 2.0 * z * np.asarray(t)

    def envelopes(u: np.ndarray) -> list[tuple[float, np.ndarray]]:
        t = inverse(u)
        return [(1.0, 1.0 / ((1.0 + t**2) * rate(t)))]

    phase = PhaseMap(forward=forward, inverse=inverse, rate=rate, envelopes=envelopes)
    result = integrate_oscillatory_tail(
        integrand, phase, math.inf, tol, breakpoints=_PHASE_BREAKPOINTS
    )
    return complex(result.value) / a


def i_j_integral(
    j: int, r1: float, r2: float, theta: float, tol: float = DEFAULT_TOL
) -> complex:
    """Model integral beta(r1 + r2) sqrt(2) theta int_0^inf e^{i kappa s^2} / (s^2 + 2 theta^2).

    kappa = 2**(j+1) r1 r2 / (r1 + r2). The value is odd in theta and vanishes at 0.

    Args:
        j (int): Dyadic index.
        r1 (float): First rescaled radius.
        r2 (float): Second rescaled radius.
        theta (float): Angle.
        tol (float): Quadrature tolerance.

    Returns:
        complex: I_j(r1, r2; theta).
    """
    if j < 0 or not (r1 > 0 and r2 > 0):
        error_message = f"i_j_integral needs j >= 0 and positive radii, got ({j}, {r1}, {r2})"
        raise DomainError(error_message)
    cutoff = float(bump_beta(r1 + r2))
    if theta == 0.0 or cutoff == 0.0:
        return 0j
    kappa = 2.0 ** (j + 1) * r1 * r2 / (r1 + r2)
    width = math.sqrt(2.0) * abs(theta)
    return cutoff * math.sqrt(2.0) * theta * gaussian_phase_integral(kappa, width, tol)


def h_kernel(  # noqa: PLR0913, PLR0917
    j: int,
    r1: float,
    r2: float,
    dtheta: float,
    delta: float,
    flux: FluxParameter,
    tol: float = DEFAULT_TOL,
) -> complex:
    """Model kernel of the third diffractive component near the shadow line.

    sin(a0 pi) 2**(-j e) beta(sigma) sigma**-e 2 sin(phi)
    int_0^inf e^{i kappa s^2} / (s^2 + 4 sin(phi / 2)**2) ds, with sigma = r1 + r2,
    kappa = 2**j r1 r2 / sigma, phi = Delta + pi and e = 3/2 + delta.

    Args:
        j (int): Dyadic index.
        r1 (float): First rescaled radius.
        r2 (float): Second rescaled radius.
        dtheta (float): Angle difference Delta.
        delta (float): Riesz order.
        flux (FluxParameter): Flux decomposition.
        tol (float): Quadrature tolerance.

    Returns:
        complex: H value; zero on the shadow line and for integer flux.
    """
    piece = DyadicPiece(j, 3, delta, flux)
    if not (r1 > 0 and r2 > 0):
        error_message = f"h_kernel needs positive radii, got ({r1}, {r2})"
        raise DomainError(error_message)
    psi = float(shadow_angle(dtheta))
    total = r1 + r2
    cutoff = float(bump_beta(total))
    if psi == 0.0 or flux.alpha0 == 0.0 or cutoff == 0.0:
        return 0j
    kappa = 2.0**j * r1 * r2 / total
    width = 2.0 * abs(math.sin(0.5 * psi))
    prefactor = math.sin(flux.alpha0 * math.pi) * piece.scale * cutoff
    prefactor *= total**-piece.exponent * 2.0 * math.sin(psi)
    return prefactor * gaussian_phase_integral(kappa, width, tol)


def verify_ij_bound(j: int, tol: float = 1e-9, threads: int = THREADS) -> BoundReport:
    """Scan |I_j| (1 + 2**j r1 r2 theta**2)**(1/2) over small angles.

    Args:
        j (int): Dyadic index.
        tol (float): Quadrature tolerance.
        threads (int): Worker threads.

    Returns:
        BoundReport: Report of suite "IJ".
    """
    nodes = [(product, theta) for product in IJ_PRODUCTS for theta in IJ_THETAS]

    def evaluate(node: tuple[float, float]) -> float:
        product, theta = node
        r1, r2 = _radii(IJ_SUM, product)
        value = i_j_integral(j, r1, r2, theta, tol)
        return abs(value) * math.sqrt(1.0 + 2.0**j * product * theta**2)

    ratios = _map_nodes(evaluate, nodes, threads)
    best = int(np.argmax(ratios))
    return BoundReport(
        suite="IJ",
        j=j,
        ell=3,
        alpha=0.0,
        delta=0.0,
        sup_ratio=float(ratios[best]),
        argmax_point=nodes[best],
        grid_spec=f"sigma={IJ_SUM}; r1 r2 in [0.1, 0.36] x{len(IJ_PRODUCTS)}; theta={IJ_THETAS}",
        ceiling=IJ_BOUND_CEILING,
    )


def verify_h_scaling(
    j: int, delta: float, flux: FluxParameter, tol: float = 1e-10
) -> BoundReport:
    """Compare 2**(3/2 + delta) |H_{j+1}| at angle theta / sqrt(2) with |H_j| at theta.

    Both kernels are taken at Delta = 2 theta - pi so that 2**j r1 r2 theta**2 is held
    fixed; the ratio of the two magnitudes stays within `H_SCALING_TOLERANCE` of 1.

    Args:
        j (int): Dyadic index.
        delta (float): Riesz order.
        flux (FluxParameter): Flux decomposition.
        tol (float): Quadrature tolerance.

    Returns:
        BoundReport: Report of suite "H"; sup_ratio is the largest |ratio - 1|.
    """
    deviations: list[float] = []
    nodes: list[tuple[float, float]] = []
    for product in H_SCALING_PRODUCTS:
        r1, r2 = _radii(H_SCALING_SUM, product)
        for theta in H_SCALING_THETAS:
            coarse = h_kernel(j, r1, r2, 2.0 * theta - math.pi, delta, flux, tol)
            fine = h_kernel(j + 1, r1, r2, math.sqrt(2.0) * theta - math.pi, delta, flux, tol)
            nodes.append((product, theta))
            if coarse == 0.0:
                deviations.append(0.0)
                continue
            ratio = abs(fine) * 2.0 ** (1.5 + delta) / abs(coarse)
            deviations.append(abs(ratio - 1.0))
    best = int(np.argmax(deviations))
    return BoundReport(
        suite="H",
        j=j,
        ell=3,
        alpha=flux.alpha_total,
        delta=delta,
        sup_ratio=deviations[best],
        argmax_point=nodes[best],
        grid_spec=f"sigma={H_SCALING_SUM}; r1 r2={H_SCALING_PRODUCTS}; theta={H_SCALING_THETAS}",
        ceiling=H_SCALING_TOLERANCE,
    )


def _angular_cutoff(theta: np.ndarray) -> np.ndarray:
    """Even cutoff equal to 1 for |theta| <= eps / 2 and 0 beyond eps."""
    half = 0.5 * H_THETA_CUTOFF
    return 1.0 - _smoothstep((np.abs(theta) - half) / half)


def fourier_bound_H(  # noqa: N802, PLR0913, PLR0917
    j: int,
    r1: float,
    r2: float,
    zeta_grid: Sequence[float],
    delta: float,
    flux: FluxParameter,
    tol: float = 1e-10,
    threads: int = THREADS,
) -> BoundReport:
    """Check the Fourier transform of the localized model kernel against its two regimes.

    The kernel H(theta) = sin(a0 pi) 2**(-j e) chi(theta) sigma**-e I_j(r1, r2; theta) is
    odd, so its transform over [-eps, eps] is -2i times its sine transform on [0, eps].
    The sine transform is a trapezoid sum on a grid fine for both max |zeta| and the
    width of I_j; the grid is doubled once and a relative change above
    `FOURIER_REFINEMENT` is a resolution failure. The bound is
    2**(-j e) min((2**j r1 r2)**(-1/2), 1 / |zeta|).

    Args:
        j (int): Dyadic index.
        r1 (float): First rescaled radius.
        r2 (float): Second rescaled radius.
        zeta_grid (Sequence[float]): Fourier variables.
        delta (float): Riesz order.
        flux (FluxParameter): Flux decomposition.
        tol (float): Quadrature tolerance of I_j.
        threads (int): Worker threads.

    Returns:
        BoundReport: Report of suite "FTH" with the per-regime suprema in its details.

    Raises:
        ResolutionError: If doubling the angular grid changes the transform.
    """
    piece = DyadicPiece(j, 3, delta, flux)
    zetas = np.abs(np.asarray(zeta_grid, dtype=float))
    total = r1 + r2
    product = 2.0**j * r1 * r2
    prefactor = math.sin(flux.alpha0 * math.pi) * piece.scale * total**-piece.exponent
    kappa = 2.0 * product / total
    spacing = min(
        math.pi / (FOURIER_NYQUIST_MARGIN * max(float(zetas.max()), 1.0)),
        1.0 / (FOURIER_NYQUIST_MARGIN * math.sqrt(kappa)),
    )
    coarse_count = math.ceil(H_THETA_CUTOFF / spacing)
    fine_count = 2 * coarse_count
    grid_spec = f"theta on [0, {H_THETA_CUTOFF}] x{fine_count}; zeta x{zetas.size}"
    regime_edge = math.sqrt(product)
    low = zetas <= regime_edge

    if prefactor == 0.0:
        return BoundReport(
            suite="FTH",
            j=j,
            ell=3,
            alpha=flux.alpha_total,
            delta=delta,
            sup_ratio=0.0,
            argmax_point=(r1, r2, float(zetas[0])),
            grid_spec=grid_spec,
            ceiling=FTH_BOUND_CEILING,
            details={"low_regime": 0.0, "high_regime": 0.0},
        )

    step = H_THETA_CUTOFF / fine_count
    thetas = step * np.arange(1, fine_count)
    values = np.array(
        _map_nodes(lambda theta: i_j_integral(j, r1, r2, theta, tol), thetas.tolist(), threads)
    )
    kernel = prefactor * _angular_cutoff(thetas) * values
    sines = np.sin(np.outer(zetas, thetas))
    fine = -2j * step * (sines @ kernel)
    coarse = -2j * (2.0 * step) * (sines[:, 1::2] @ kernel[1::2])
    change = float(np.max(np.abs(fine - coarse)))
    size = float(np.max(np.abs(fine)))
    if change > FOURIER_REFINEMENT * size:
        error_message = (
            f"Angular grid of {fine_count} cells does not resolve the transform: "
            f"doubling changes it by {change / size:.2%}"
        )
        raise ResolutionError(error_message, (1, 2 * fine_count))

    with np.errstate(divide="ignore"):
        bound = piece.scale * np.minimum(1.0 / math.sqrt(product), 1.0 / zetas)
    ratios = np.abs(fine) / bound
    best = int(np.argmax(ratios))
    details = {
        "low_regime": float(ratios[low].max()) if np.any(low) else 0.0,
        "high_regime": float(ratios[~low].max()) if np.any(~low) else 0.0,
        "refinement_change": change / size,
    }
    logger.info(
        "Fourier bound j=%d: low %.4g, high %.4g", j, details["low_regime"], details["high_regime"]
    )
    return BoundReport(
        suite="FTH",
        j=j,
        ell=3,
        alpha=flux.alpha_total,
        delta=delta,
        sup_ratio=float(ratios[best]),
        argmax_point=(r1, r2, float(zetas[best])),
        grid_spec=grid_spec,
        ceiling=FTH_BOUND_CEILING,
        details=details,
    )


def _geometry(r1: float, r2: float, dtheta: float) -> tuple[float, float, float, float]:
    """Distance, cos, sin and r1 - r2 cos of a non-degenerate configuration."""
    if not (r1 > 0 and r2 > 0):
        error_message = f"Radii must be positive, got ({r1}, {r2})"
        raise DomainError(error_message)
    distance = float(euclidean_distance(r1, r2, dtheta))
    if distance <= 0.0:
        error_message = f"Coincident points r = {r1}, Delta = {dtheta}"
        raise DiagonalSingularityError(error_message)
    cosine, sine = math.cos(dtheta), math.sin(dtheta)
    return distance, cosine, sine, r1 - r2 * cosine


def derivative_d_theta(r1: float, r2: float, dtheta: float) -> float:
    """d|x - y| / d theta1 = r1 r2 sin(Delta) / |x - y|.

    Args:
        r1 (float): First radius.
        r2 (float): Second radius.
        dtheta (float): Angle difference.

    Returns:
        float: The derivative.
    """
    distance, _, sine, _ = _geometry(r1, r2, dtheta)
    return r1 * r2 * sine / distance


def derivative_d_theta_theta(r1: float, r2: float, dtheta: float) -> float:
    """Second angular derivative r1 r2 cos / d - (r1 r2 sin)**2 / d**3 of |x - y|.

    Args:
        r1 (float): First radius.
        r2 (float): Second radius.
        dtheta (float): Angle difference.

    Returns:
        float: The derivative.
    """
    distance, cosine, sine, _ = _geometry(r1, r2, dtheta)
    return r1 * r2 * cosine / distance - (r1 * r2 * sine) ** 2 / distance**3


def determinant_matrix(r1: float, r2: float, dtheta: float) -> np.ndarray:
    """Matrix [[d_r d_t d, d_t^2 d], [d_r d_t^2 d, d_t^3 d]] of partials of |x - y|.

    Derivatives are taken in r1 and theta1.

    Args:
        r1 (float): First radius.
        r2 (float): Second radius.
        dtheta (float): Angle difference.

    Returns:
        np.ndarray: The 2 x 2 matrix.
    """
    d, cosine, sine, gap = _geometry(r1, r2, dtheta)
    product = r1 * r2
    mixed = r2 * sine / d - product * sine * gap / d**3
    second = product * cosine / d - (product * sine) ** 2 / d**3
    mixed_second = (
        r2 * cosine / d
        - product * cosine * gap / d**3
        - 2.0 * r1 * r2**2 * sine**2 / d**3
        + 3.0 * (product * sine) ** 2 * gap / d**5
    )
    third = (
        -product * sine / d
        - 3.0 * product**2 * sine * cosine / d**3
        + 3.0 * (product * sine) ** 3 / d**5
    )
    return np.array([[mixed, second], [mixed_second, third]])


def det_lemma(r1: float, r2: float, dtheta: float) -> float:
    """Closed-form determinant r1 r2**3 (r1 cos Delta - r2)**3 / |x - y|**6.

    Args:
        r1 (float): First radius.
        r2 (float): Second radius.
        dtheta (float): Angle difference.

    Returns:
        float: The determinant of `determinant_matrix`.

    Raises:
        DiagonalSingularityError: At coincident points.

    >>> det_lemma(1.0, 1.0, math.pi / 2)
    -0.125
    """
    distance, cosine, _, _ = _geometry(r1, r2, dtheta)
    return r1 * r2**3 * (r1 * cosine - r2) ** 3 / distance**6


def _difference_matrix(r1: float, r2: float, dtheta: float, h: float) -> np.ndarray:
    """Central differences in (r1, theta1) of the closed-form angular derivative."""

    def f(radius: float, angle: float) -> float:
        return derivative_d_theta(radius, r2, angle)

    centre = f(r1, dtheta)
    d_r = (f(r1 + h, dtheta) - f(r1 - h, dtheta)) / (2.0 * h)
    d_t = (f(r1, dtheta + h) - f(r1, dtheta - h)) / (2.0 * h)
    d_rt = (
        f(r1 + h, dtheta + h)
        - f(r1 + h, dtheta - h)
        - f(r1 - h, dtheta + h)
        + f(r1 - h, dtheta - h)
    ) / (4.0 * h**2)
    d_tt = (f(r1, dtheta + h) - 2.0 * centre + f(r1, dtheta - h)) / h**2
    return np.array([[d_r, d_t], [d_rt, d_tt]])


def fd_determinant(r1: float, r2: float, dtheta: float, step: float = DET_FD_STEP) -> float:
    """Determinant of `determinant_matrix` from finite differences.

    The closed-form angular derivative is differenced at steps h and h/2 and combined by
    one Richardson step.

    Args:
        r1 (float): First radius.
        r2 (float): Second radius.
        dtheta (float): Angle difference.
        step (float): Difference step h.

    Returns:
        float: The determinant.
    """
    coarse = _difference_matrix(r1, r2, dtheta, step)
    fine = _difference_matrix(r1, r2, dtheta, 0.5 * step)
    matrix = (4.0 * fine - coarse) / 3.0
    return float(np.linalg.det(matrix))


def _separated_configuration(rng: np.random.Generator) -> tuple[float, float, float]:
    """Random (r1, r2, Delta) with r in [0.5, 2] away from the line r1 cos Delta = r2."""
    while True:
        r1, r2 = (float(r) for r in rng.uniform(0.5, 2.0, 2))
        dtheta = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.1, math.pi - 0.1))
        if abs(r1 * math.cos(dtheta) - r2) >= 0.4 * max(r1, r2):
            return r1, r2, dtheta


def verify_det_lemma(samples: int = 100, seed: int = DEFAULT_SEED) -> BoundReport:
    """Compare `det_lemma` with `fd_determinant` on random separated configurations.

    Args:
        samples (int): Number of configurations.
        seed (int): Seed of the sampler.

    Returns:
        BoundReport: Report of suite "DET"; sup_ratio is the largest relative error.
    """
    rng = np.random.default_rng(seed)
    worst, worst_point = 0.0, (0.0, 0.0, 0.0)
    for _ in range(samples):
        point = _separated_configuration(rng)
        exact = det_lemma(*point)
        error = abs(fd_determinant(*point) - exact) / abs(exact)
        if error > worst:
            worst, worst_point = error, point
    logger.info("Determinant lemma on %d configurations: worst error %.3g", samples, worst)
    return BoundReport(
        suite="DET",
        j=-1,
        ell=0,
        alpha=0.0,
        delta=0.0,
        sup_ratio=worst,
        argmax_point=worst_point,
        grid_spec=f"{samples} random (r1, r2, Delta), seed {seed}",
        ceiling=DET_TOLERANCE,
        details={"samples": float(samples)},
    )


def verify_derivatives(samples: int = 100, seed: int = DEFAULT_SEED) -> BoundReport:
    """Compare the closed-form angular derivatives of |x - y| with central differences.

    Args:
        samples (int): Number of configurations.
        seed (int): Seed of the sampler.

    Returns:
        BoundReport: Report of suite "DERIV"; sup_ratio is the largest error relative to
        max(1, |derivative|).
    """
    rng = np.random.default_rng(seed)
    worst, worst_point = 0.0, (0.0, 0.0, 0.0)
    for _ in range(samples):
        r1, r2, dtheta = _separated_configuration(rng)

        def distance(angle: float, r1: float = r1, r2: float = r2) -> float:
            return float(euclidean_distance(r1, r2, angle))

        h = 1e-5
        first = (distance(dtheta + h) - distance(dtheta - h)) / (2.0 * h)
        h = 1e-4
        second = (distance(dtheta + h) - 2.0 * distance(dtheta) + distance(dtheta - h)) / h**2
        for estimate, exact in (
            (first, derivative_d_theta(r1, r2, dtheta)),
            (second, derivative_d_theta_theta(r1, r2, dtheta)),
        ):
            error = abs(estimate - exact) / max(1.0, abs(exact))
            if error > worst:
                worst, worst_point = error, (r1, r2, dtheta)
    return BoundReport(
        suite="DERIV",
        j=-1,
        ell=0,
        alpha=0.0,
        delta=0.0,
        sup_ratio=worst,
        argmax_point=worst_point,
        grid_spec=f"{samples} random (r1, r2, Delta), seed {seed}",
        ceiling=DERIVATIVE_TOLERANCE,
        details={"samples": float(samples)},
    )


def write_reports(rows: Sequence[BoundReport], path: Path | None = None) -> None:
    """Emit bound reports as delimited records.

    Args:
        rows (Sequence[BoundReport]): Reports.
        path (Path | None): Destination; standard output when None.
    """
    write_records([to_record(row) for row in rows], path)
