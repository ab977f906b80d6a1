"""Bochner-Riesz means applied to sampled functions on polar grids.

The operators here are integral operators whose kernels only depend on the angle
difference, so applying them is a circular convolution in the angle per radial pair.
Norms of dyadic pieces are empirical lower bounds: power iteration for p = 2, and the best
ratio over a battery of structured inputs otherwise.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from itertools import pairwise
from typing import Protocol

import numpy as np

from ab_riesz.ab_model import TWO_PI, FluxParameter
from ab_riesz.config import (
    DEFAULT_SEED,
    DYADIC_LAB_SPACING,
    MAX_LAB_GRID,
    MAX_LAB_LAMBDA,
    PARTITION_OUTER,
    POWER_ITERATIONS,
    RESOLUTION_LIMIT,
    SLOPE_MARGIN,
    THREADS,
)
from ab_riesz.dyadic_bounds import DyadicPiece, bump_beta, kernel_piece_D_table, partition
from ab_riesz.errors import DomainError, ResolutionError
from ab_riesz.kernels import BRParams, br_kernel_table
from ab_riesz.utils import Record, Scalar


logger = logging.getLogger(__name__)

PIECES = ("G", "D1", "D2", "D3")
MAX_DYADIC_INDEX = 7
POWER_SETTLE = 1e-3  # relative change of the last power step above which a warning is logged
PACKET_FREQUENCY = 4

_RADIAL_PROFILES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "disk": lambda t: (t <= 1.0).astype(float),
    "annulus": lambda t: ((t >= 0.5) & (t <= 1.0)).astype(float),
    "gaussian": lambda t: np.exp(-((3.0 * t) ** 2)),
    "packet": lambda t: np.exp(-((6.0 * (t - 0.5)) ** 2)),
}
CATALOG = tuple(_RADIAL_PROFILES)


@dataclass(frozen=True)
class PolarGrid:
    """Midpoint radii times uniform angles on the disk of radius R.

    Attributes:
        n_r (int): Number of radial nodes.
        n_theta (int): Number of angular nodes.
        radius (float): Outer radius R.
    """

    n_r: int
    n_theta: int
    radius: float

    def __post_init__(self) -> None:
        """Validate the node counts against the lab cap."""
        if self.n_r < 1 or self.n_theta < 1:
            error_message = f"Grid needs at least one node per axis, got {self.n_r}x{self.n_theta}"
            raise DomainError(error_message)
        if max(self.n_r, self.n_theta) > MAX_LAB_GRID:
            error_message = f"Grid {self.n_r}x{self.n_theta} exceeds the cap of {MAX_LAB_GRID}"
            raise DomainError(error_message)
        if not (math.isfinite(self.radius) and self.radius > 0):
            error_message = f"Grid radius must be positive, got {self.radius}"
            raise DomainError(error_message)

    @property
    def shape(self) -> tuple[int, int]:
        """(n_r, n_theta)."""
        return self.n_r, self.n_theta

    @property
    def dr(self) -> float:
        """Radial spacing."""
        return self.radius / self.n_r

    @property
    def dtheta(self) -> float:
        """Angular spacing."""
        return TWO_PI / self.n_theta

    @property
    def r_nodes(self) -> np.ndarray:
        """Radii (i + 1/2) dr."""
        return (np.arange(self.n_r) + 0.5) * self.dr

    @property
    def theta_nodes(self) -> np.ndarray:
        """Angles 2 pi m / n_theta."""
        return np.arange(self.n_theta) * self.dtheta

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights r dr dtheta, summing to pi R**2 exactly.

        >>> grid = PolarGrid(8, 16, 2.0)
        >>> bool(abs(grid.weights.sum() - 4.0 * math.pi) < 1e-12)
        True
        """
        return np.repeat((self.r_nodes * self.dr * self.dtheta)[:, None], self.n_theta, axis=1)

    def required_grid(self, lam: float) -> tuple[int, int]:
        """Smallest node counts resolving the oscillation at frequency lam."""
        scaled = lam * self.radius / RESOLUTION_LIMIT
        return math.ceil(scaled), math.ceil(TWO_PI * scaled)

    def check_resolution(self, lam: float) -> None:
        """Require lam dr <= 1/4 and lam R dtheta <= 1/4.

        Args:
            lam (float): Spectral cutoff.

        Raises:
            ResolutionError: If the grid is too coarse, with the node counts needed.
        """
        limit = RESOLUTION_LIMIT * (1.0 + 1e-12)
        if lam * self.dr > limit or lam * self.radius * self.dtheta > limit:
            required = self.required_grid(lam)
            error_message = (
                f"A {self.n_r}x{self.n_theta} grid of radius {self.radius:g} does not resolve "
                f"lambda = {lam:g}; need at least {required[0]}x{required[1]}"
            )
            raise ResolutionError(error_message, required)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex values of a function at the nodes of a polar grid.

    Attributes:
        values (np.ndarray): Array of shape grid.shape.
        grid (PolarGrid): The grid.
    """

    values: np.ndarray
    grid: PolarGrid

    def __post_init__(self) -> None:
        """Coerce to complex and validate shape and finiteness."""
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            error_message = f"Values of shape {values.shape} do not fit grid {self.grid.shape}"
            raise DomainError(error_message)
        if not np.all(np.isfinite(values)):
            error_message = "Sampled values must be finite"
            raise DomainError(error_message)
        object.__setattr__(self, "values", values)

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        """Pointwise sum on a shared grid."""
        if other.grid != self.grid:
            error_message = "Cannot add functions sampled on different grids"
            raise DomainError(error_message)
        return SampledFunction(self.values + other.values, self.grid)

    def scaled(self, factor: complex) -> "SampledFunction":
        """Pointwise multiple factor * f."""
        return SampledFunction(factor * self.values, self.grid)


def sample_function(
    name: str, grid: PolarGrid, scale: float = 1.0, frequency: int = 3
) -> SampledFunction:
    """Sample a member of the test-function catalog.

    With t = r / scale: disk 1[t <= 1], annulus 1[1/2 <= t <= 1], gaussian exp(-9 t**2)
    and packet exp(i frequency theta) exp(-36 (t - 1/2)**2).

    Args:
        name (str): One of CATALOG.
        grid (PolarGrid): Grid to sample on.
        scale (float): Radius of the support.
        frequency (int): Angular frequency of the packet.

    Returns:
        SampledFunction: The samples.

    Raises:
        DomainError: For an unknown name or a non-positive scale.
    """
    if name not in _RADIAL_PROFILES:
        error_message = f"Unknown test function {name!r}; expected one of {', '.join(CATALOG)}"
        raise DomainError(error_message)
    if not scale > 0:
        error_message = f"Scale must be positive, got {scale}"
        raise DomainError(error_message)
    radial = _RADIAL_PROFILES[name](grid.r_nodes / scale)[:, None]
    angular = np.ones(grid.n_theta, dtype=complex)
    if name == "packet":
        angular = np.exp(1j * frequency * grid.theta_nodes)
    return SampledFunction(radial * angular[None, :], grid)


def critical_index(p: float, n: int = 2) -> float:
    """Critical Bochner-Riesz index max(0, n |1/2 - 1/p| - 1/2).

    Args:
        p (float): Exponent p >= 1; math.inf is accepted.
        n (int): Dimension.

    Returns:
        float: The index.

    Raises:
        DomainError: If p < 1.

    >>> critical_index(2.0)
    0.0
    >>> critical_index(math.inf)
    0.5
    """
    if math.isnan(p) or p < 1:
        error_message = f"Exponent p must be at least 1, got {p}"
        raise DomainError(error_message)
    inverse = 0.0 if math.isinf(p) else 1.0 / p
    return max(0.0, n * abs(0.5 - inverse) - 0.5)


def _lp(values: np.ndarray, weights: np.ndarray, p: float) -> float:
    moduli = np.abs(values)
    if math.isinf(p):
        return float(moduli.max(initial=0.0))
    return float(np.sum(moduli**p * weights) ** (1.0 / p))


def lp_norm(f: SampledFunction, p: float) -> float:
    """Discrete L^p norm (sum |f|**p w)**(1/p), the maximum for p = inf.

    Args:
        f (SampledFunction): Function.
        p (float): Exponent p >= 1.

    Returns:
        float: The norm.

    Raises:
        DomainError: If p < 1.
    """
    if math.isnan(p) or p < 1:
        error_message = f"Exponent p must be at least 1, got {p}"
        raise DomainError(error_message)
    return _lp(f.values, f.grid.weights, p)


class DiscreteOperator(Protocol):
    """Linear operator on weighted node values."""

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights of the nodes."""
        ...

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Image of values."""
        ...

    def adjoint_apply(self, values: np.ndarray) -> np.ndarray:
        """Image of values under the adjoint for the weighted inner product."""
        ...


class RotationalOperator:
    """Integral operator on a polar grid with a kernel depending on theta1 - theta2.

    The kernel is given as K(r_i, 2 pi m / N; r_k, 0), shape (n_r, n_r, N), and
    g(r_i, theta_a) = sum_{k, b} K[i, k, a - b] f(r_k, theta_b) w_k.
    """

    def __init__(self, table: np.ndarray, grid: PolarGrid) -> None:
        """Initialize with a kernel table.

        Args:
            table (np.ndarray): Kernel table.
            grid (PolarGrid): Grid the table was built on.

        Raises:
            DomainError: If the table does not match the grid.
        """
        expected = (grid.n_r, grid.n_r, grid.n_theta)
        if table.shape != expected:
            error_message = f"Kernel table of shape {table.shape} does not match {expected}"
            raise DomainError(error_message)
        self.grid = grid
        self.weights = grid.weights
        self._spectrum = np.fft.fft(table, axis=-1)
        self._adjoint_spectrum = np.conj(np.swapaxes(self._spectrum, 0, 1))

    def _convolve(self, spectrum: np.ndarray, values: np.ndarray) -> np.ndarray:
        transformed = np.fft.fft(values * self.weights, axis=-1)
        return np.fft.ifft(np.einsum("ikq,kq->iq", spectrum, transformed), axis=-1)

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Image of node values."""
        return self._convolve(self._spectrum, values)

    def adjoint_apply(self, values: np.ndarray) -> np.ndarray:
        """Image under the kernel conj(K(y, x))."""
        return self._convolve(self._adjoint_spectrum, values)


@dataclass(frozen=True, eq=False)
class _TorusConvolution:
    """Convolution on a periodic Cartesian grid, given by its multiplier."""

    multiplier: np.ndarray
    weights: np.ndarray

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Convolve."""
        return np.fft.ifft2(self.multiplier * np.fft.fft2(values))

    def adjoint_apply(self, values: np.ndarray) -> np.ndarray:
        """Convolve with the conjugate multiplier."""
        return np.fft.ifft2(np.conj(self.multiplier) * np.fft.fft2(values))


def br_operator(
    grid: PolarGrid, params: BRParams, method: str = "series", threads: int = THREADS
) -> RotationalOperator:
    """Discretized S_lambda^delta of the pure AB operator with the flux of params.

    Args:
        grid (PolarGrid): Grid.
        params (BRParams): Kernel parameters; only the total flux of the potential is used.
        method (str): "series" or "closed" kernel evaluation.
        threads (int): Worker bound for the closed route.

    Returns:
        RotationalOperator: The operator.

    Raises:
        DomainError: If lambda exceeds the lab cap.
    """
    if params.lam > MAX_LAB_LAMBDA:
        error_message = f"lambda = {params.lam:g} exceeds the lab cap of {MAX_LAB_LAMBDA:g}"
        raise DomainError(error_message)
    grid.check_resolution(params.lam)
    pure = BRParams.pure_ab(params.lam, params.delta, params.flux.alpha_total, params.tol)
    table = br_kernel_table(grid.r_nodes, grid.n_theta, pure, route=method, threads=threads)
    return RotationalOperator(table, grid)


def apply_br(
    f: SampledFunction, params: BRParams, method: str = "series", threads: int = THREADS
) -> SampledFunction:
    """Apply S_lambda^delta: g(x) = sum_y K(x, y) f(y) w_y.

    Tabulated potentials are handled by conjugating the pure AB operator of the same flux
    with the transport phase exp(i p(theta)).

    Args:
        f (SampledFunction): Input function.
        params (BRParams): Kernel parameters.
        method (str): "series" or "closed" kernel evaluation.
        threads (int): Worker bound for the closed route.

    Returns:
        SampledFunction: S_lambda^delta f on the same grid.

    Raises:
        ResolutionError: If lambda dr or lambda R dtheta exceeds 1/4.
    """
    operator = br_operator(f.grid, params, method, threads)
    phase = np.asarray(params.potential.periodic_phase(f.grid.theta_nodes), dtype=float)
    gauge = np.exp(1j * phase)[None, :]
    return SampledFunction(gauge * operator.apply(np.conj(gauge) * f.values), f.grid)


def operator_norm_2(
    operator: DiscreteOperator,
    start: np.ndarray | None = None,
    iterations: int = POWER_ITERATIONS,
    seed: int = DEFAULT_SEED,
) -> float:
    """Estimate the L^2 operator norm by power iteration on T* T.

    The estimate never exceeds the true norm. A warning is logged when the last step
    still changes the estimate by more than POWER_SETTLE.

    Args:
        operator (DiscreteOperator): Operator.
        start (np.ndarray | None): Starting vector; random when None.
        iterations (int): Number of steps.
        seed (int): Seed of the random start.

    Returns:
        float: Norm estimate.

    Raises:
        DomainError: If the starting vector vanishes.
    """
    weights = operator.weights
    if start is None:
        rng = np.random.default_rng(seed)
        start = rng.standard_normal(weights.shape) + 1j * rng.standard_normal(weights.shape)
    size = _lp(start, weights, 2.0)
    if size == 0.0:
        error_message = "Power iteration needs a non-zero starting vector"
        raise DomainError(error_message)
    vector = start / size
    estimate = previous = 0.0
    for _ in range(iterations):
        image = operator.adjoint_apply(operator.apply(vector))
        size = _lp(image, weights, 2.0)
        if size == 0.0:
            return 0.0
        previous, estimate = estimate, size
        vector = image / size
    change = abs(estimate - previous) / estimate
    if change > POWER_SETTLE:
        logger.warning(
            "Power iteration did not settle after %d steps (last relative change %.2g)",
            iterations,
            change,
        )
    return math.sqrt(estimate)


@dataclass(frozen=True)
class ConvergenceReport:
    """Errors ||S_lambda f - f||_p along increasing lambda.

    Attributes:
        function (str): Catalog name of f.
        p (float): Exponent.
        delta (float): Riesz order.
        alpha (float): Total flux.
        lambda_list (tuple[float, ...]): Cutoffs that the grid resolves.
        errors (tuple[float, ...]): Errors per cutoff.
        slope (float): Fitted slope of log error against log lambda; 0 below two points.
        status (str): "decreasing", "stalled" or "inconclusive".
        required_grid (tuple[int, int] | None): Grid needed for the first unresolved cutoff.
    """

    function: str
    p: float
    delta: float
    alpha: float
    lambda_list: tuple[float, ...]
    errors: tuple[float, ...]
    slope: float
    status: str
    required_grid: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        """Validate the errors."""
        if any(not error >= 0 for error in self.errors):
            error_message = f"Convergence errors must be non-negative, got {self.errors}"
            raise DomainError(error_message)

    def records(self) -> list[Record]:
        """One row per cutoff."""
        return [
            {
                "experiment": f"converge-{self.function}",
                "p": self.p,
                "delta": self.delta,
                "lambda_or_j": lam,
                "value": error,
                "slope": self.slope,
                "status": self.status,
            }
            for lam, error in zip(self.lambda_list, self.errors, strict=True)
        ]


@dataclass(frozen=True)
class ScalingReport:
    """Empirical norms of a dyadic piece family against j.

    Attributes:
        piece (str): One of PIECES.
        p (float): Exponent.
        delta (float): Riesz order.
        alpha (float): Total flux.
        js (tuple[int, ...]): Dyadic indices.
        norms (tuple[float, ...]): Lower-bound norm per index.
        slope (float): Fitted slope of log2 norm against j; -inf when every norm vanishes.
        bound_slope (float): Predicted slope critical_index(p) - delta.
        passed (bool): slope <= bound_slope + SLOPE_MARGIN.
    """

    piece: str
    p: float
    delta: float
    alpha: float
    js: tuple[int, ...]
    norms: tuple[float, ...]
    slope: float
    bound_slope: float
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        """Set the verdict."""
        object.__setattr__(self, "passed", self.slope <= self.bound_slope + SLOPE_MARGIN)

    def records(self) -> list[Record]:
        """One row per dyadic index; the slope cell is empty when every norm vanishes."""
        slope: Scalar = self.slope if math.isfinite(self.slope) else ""
        return [
            {
                "experiment": f"scaling-{self.piece}",
                "p": self.p,
                "delta": self.delta,
                "lambda_or_j": j,
                "value": norm,
                "slope": slope,
                "status": "pass" if self.passed else "fail",
            }
            for j, norm in zip(self.js, self.norms, strict=True)
        ]


@dataclass(frozen=True)
class ComparisonReport:
    """Two convergence runs of one function that differ only in the Riesz order.

    Attributes:
        lower (ConvergenceReport): Run at the smaller order.
        upper (ConvergenceReport): Run at the larger order.
        lam (float): Largest cutoff both runs resolve.
        lower_error (float): Error of the lower run at lam.
        upper_error (float): Error of the upper run at lam.
        gap (float): lower_error - upper_error.
        ordered (bool): gap >= 0, the lower order converging no faster.
    """

    lower: ConvergenceReport
    upper: ConvergenceReport
    lam: float = field(init=False)
    lower_error: float = field(init=False)
    upper_error: float = field(init=False)
    gap: float = field(init=False)
    ordered: bool = field(init=False)

    def __post_init__(self) -> None:
        """Compare the runs at their last common cutoff."""
        last = min(len(self.lower.errors), len(self.upper.errors)) - 1
        lower_error, upper_error = self.lower.errors[last], self.upper.errors[last]
        gap = lower_error - upper_error
        object.__setattr__(self, "lam", self.lower.lambda_list[last])
        object.__setattr__(self, "lower_error", lower_error)
        object.__setattr__(self, "upper_error", upper_error)
        object.__setattr__(self, "gap", gap)
        object.__setattr__(self, "ordered", gap >= 0)

    def records(self) -> list[Record]:
        """The rows of both runs, lower order first."""
        return [*self.lower.records(), *self.upper.records()]


def _trend(errors: Sequence[float]) -> str:
    if len(errors) < 3:  # noqa: PLR2004
        return "inconclusive"
    if all(later < earlier for earlier, later in pairwise(errors)):
        return "decreasing"
    return "stalled"


def _log_slope(lambdas: Sequence[float], errors: Sequence[float]) -> float:
    points = [(lam, error) for lam, error in zip(lambdas, errors, strict=True) if error > 0]
    if len(points) < 2:  # noqa: PLR2004
        return 0.0
    xs, ys = zip(*points, strict=True)
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def convergence_experiment(  # noqa: PLR0913
    f: SampledFunction,
    p: float,
    delta: float,
    lambda_list: Sequence[float],
    method: str = "series",
    *,
    alpha: float = 0.5,
    name: str = "custom",
    threads: int = THREADS,
) -> ConvergenceReport:
    """Track ||S_lambda f - f||_p for increasing lambda.

    The run stops at the first cutoff the grid does not resolve. Fewer than three
    resolved cutoffs make the status inconclusive; a non-decreasing sequence above the
    critical index is logged as a warning.

    Args:
        f (SampledFunction): Input function.
        p (float): Exponent.
        delta (float): Riesz order.
        lambda_list (Sequence[float]): Cutoffs, sorted before use.
        method (str): "series" or "closed" kernel evaluation.
        alpha (float): Total flux of the AB potential.
        name (str): Label of f in the report.
        threads (int): Worker bound for the closed route.

    Returns:
        ConvergenceReport: Errors and trend.

    Raises:
        DomainError: If delta < 0 or no cutoff is given.
        ResolutionError: If the grid does not resolve even the smallest cutoff.
    """
    if not delta >= 0:
        error_message = f"delta must be non-negative, got {delta}"
        raise DomainError(error_message)
    lambdas = sorted(float(lam) for lam in lambda_list)
    if not lambdas:
        error_message = "At least one cutoff is needed"
        raise DomainError(error_message)
    lp_norm(f, p)
    resolved: list[float] = []
    errors: list[float] = []
    required: tuple[int, int] | None = None
    for lam in lambdas:
        params = BRParams.pure_ab(lam, delta, alpha)
        try:
            smoothed = apply_br(f, params, method, threads)
        except ResolutionError as error:
            if not resolved:
                raise
            required = error.required_grid
            logger.warning("Resolution floor reached at lambda = %g: %s", lam, error)
            break
        resolved.append(lam)
        errors.append(lp_norm(smoothed + f.scaled(-1.0), p))
        logger.debug("lambda = %g: error %.6g", lam, errors[-1])
    status = _trend(errors)
    if status == "stalled" and delta > critical_index(p):
        logger.warning(
            "Errors do not decrease for delta = %g above the critical index %g at p = %g",
            delta,
            critical_index(p),
            p,
        )
    report = ConvergenceReport(
        function=name,
        p=p,
        delta=delta,
        alpha=alpha,
        lambda_list=tuple(resolved),
        errors=tuple(errors),
        slope=_log_slope(resolved, errors),
        status=status,
        required_grid=required,
    )
    logger.info("Convergence of %s at p = %g, delta = %g: %s", name, p, delta, status)
    return report


def comparative_experiment(  # noqa: PLR0913
    f: SampledFunction,
    p: float,
    deltas: tuple[float, float],
    lambda_list: Sequence[float],
    method: str = "series",
    *,
    alpha: float = 0.5,
    name: str = "custom",
    threads: int = THREADS,
) -> ComparisonReport:
    """Run the convergence experiment at two Riesz orders on the same grid.

    The gap is a trend only: at desk resolution the order below the critical index
    may well end with the smaller error.

    Args:
        f (SampledFunction): Input function.
        p (float): Exponent.
        deltas (tuple[float, float]): The two orders, in any order.
        lambda_list (Sequence[float]): Cutoffs shared by both runs.
        method (str): "series" or "closed" kernel evaluation.
        alpha (float): Total flux of the AB potential.
        name (str): Label of f in the report.
        threads (int): Worker bound for the closed route.

    Returns:
        ComparisonReport: Both runs and the gap of their final errors.

    Raises:
        DomainError: If the orders coincide or one is negative.
    """
    lower, upper = sorted(deltas)
    if lower == upper:
        error_message = f"The compared orders must differ, got {lower} twice"
        raise DomainError(error_message)
    runs = [
        convergence_experiment(
            f, p, delta, lambda_list, method, alpha=alpha, name=name, threads=threads
        )
        for delta in (lower, upper)
    ]
    report = ComparisonReport(runs[0], runs[1])
    logger.info(
        "%s at p = %g (critical index %g): delta %g ends at %.6g, delta %g at %.6g, gap %.3g",
        name,
        p,
        critical_index(p),
        lower,
        report.lower_error,
        upper,
        report.upper_error,
        report.gap,
    )
    return report


def _torus_lab(piece: DyadicPiece) -> tuple[DiscreteOperator, list[np.ndarray]]:
    """Geometric piece as a convolution on a torus of side at least 3 * 2**j.

    The sheet indicator and the flux phase of the piece are dropped, leaving the
    translation-invariant kernel beta_j(|x|) exp(i |x|) (1 + |x|)**(-3/2 - delta).
    """
    size = 2 * math.ceil(1.5 * 2.0**piece.j / DYADIC_LAB_SPACING)
    axis = np.fft.fftfreq(size, d=1.0 / size) * DYADIC_LAB_SPACING
    x, y = np.meshgrid(axis, axis, indexing="ij")
    distance = np.hypot(x, y)
    kernel = (
        np.asarray(partition(piece.j, distance))
        * np.exp(1j * distance)
        * (1.0 + distance) ** -piece.exponent
    )
    area = DYADIC_LAB_SPACING**2
    operator = _TorusConvolution(np.fft.fft2(kernel) * area, np.full(kernel.shape, area))
    radial = np.asarray(bump_beta(2.0**-piece.j * distance))
    battery = [
        np.conj(kernel),
        radial + 0j,
        radial * np.exp(1j * PACKET_FREQUENCY * np.arctan2(y, x)),
        radial * np.exp(1j * x),
    ]
    return operator, battery


def _polar_lab(piece: DyadicPiece, threads: int) -> tuple[DiscreteOperator, list[np.ndarray]]:
    """Diffractive piece on a polar grid covering r1 + r2 <= 1.25 * 2**j."""
    ell = piece.ell if piece.ell is not None else 1
    radius = PARTITION_OUTER * 2.0**piece.j
    n_r = math.ceil(radius / RESOLUTION_LIMIT)
    n_theta = 2 * math.ceil(math.pi * radius / RESOLUTION_LIMIT)
    if max(n_r, n_theta) > MAX_LAB_GRID:
        error_message = (
            f"D{ell} piece at j = {piece.j} needs a {n_r}x{n_theta} grid, "
            f"above the cap of {MAX_LAB_GRID}"
        )
        raise ResolutionError(error_message, (n_r, n_theta))
    grid = PolarGrid(n_r, n_theta, radius)
    table = kernel_piece_D_table(
        ell, piece.j, grid.r_nodes, n_theta, piece.delta, piece.flux, threads=threads
    )
    anchor = int(np.argmin(np.abs(grid.r_nodes - 0.4 * 2.0**piece.j)))
    r = grid.r_nodes[:, None]
    theta = grid.theta_nodes[None, :]
    radial = np.broadcast_to(np.asarray(bump_beta(2.0 ** (1 - piece.j) * r)), grid.shape)
    battery = [
        np.conj(table[anchor][:, (-np.arange(n_theta)) % n_theta]),
        radial + 0j,
        radial * np.exp(1j * PACKET_FREQUENCY * theta),
        radial * np.exp(1j * r * np.cos(theta)),
    ]
    return RotationalOperator(table, grid), battery


def _estimate_norm(operator: DiscreteOperator, battery: Sequence[np.ndarray], p: float) -> float:
    weights = operator.weights
    if p == 2.0:  # noqa: PLR2004
        start = next((values for values in battery if np.any(values)), None)
        return 0.0 if start is None else operator_norm_2(operator, start)
    ratios = [
        _lp(operator.apply(values), weights, p) / size
        for values in battery
        if (size := _lp(values, weights, p)) > 0
    ]
    return max(ratios, default=0.0)


def _fit_slope(js: Sequence[int], norms: Sequence[float]) -> float:
    points = [(j, norm) for j, norm in zip(js, norms, strict=True) if norm > 0]
    if not points:
        return -math.inf
    if len(points) < 2:  # noqa: PLR2004
        error_message = "A slope needs at least two dyadic indices with non-zero norm"
        raise DomainError(error_message)
    xs, ys = zip(*points, strict=True)
    return float(np.polyfit(np.asarray(xs, dtype=float), np.log2(ys), 1)[0])


def dyadic_norm_scaling(  # noqa: PLR0913
    piece: str,
    p: float,
    js: Sequence[int],
    delta: float,
    flux: FluxParameter,
    *,
    trials: int = 2,
    seed: int = DEFAULT_SEED,
    threads: int = THREADS,
) -> ScalingReport:
    """Empirical operator norms of the dyadic pieces T^j and their slope in j.

    The geometric piece "G" runs on a Cartesian torus; the diffractive pieces "D1", "D2"
    and "D3" run on polar grids and vanish for integer flux. Norms are lower bounds:
    power iteration for p = 2 and the best ratio ||T f||_p / ||f||_p over the input battery
    (matched kernel, radial bump, angular packet, plane-wave bump and `trials` random
    fields) otherwise.

    Args:
        piece (str): One of PIECES.
        p (float): Exponent, 2 or above 4 (math.inf accepted).
        js (Sequence[int]): At least two dyadic indices in 1..7.
        delta (float): Riesz order.
        flux (FluxParameter): Flux decomposition.
        trials (int): Number of random fields.
        seed (int): Seed of the random fields.
        threads (int): Worker bound for the diffractive tables.

    Returns:
        ScalingReport: Norms, slope and verdict.

    Raises:
        DomainError: For an unknown piece, p outside {2} and (4, inf], or invalid indices.
        ResolutionError: If a diffractive piece needs a grid above the lab cap.
    """
    if piece not in PIECES:
        error_message = f"Unknown piece {piece!r}; expected one of {', '.join(PIECES)}"
        raise DomainError(error_message)
    if not (p == 2.0 or p > 4.0):  # noqa: PLR2004
        error_message = f"Norm scaling needs p = 2 or p > 4, got {p}"
        raise DomainError(error_message)
    indices = tuple(sorted(set(js)))
    if len(indices) < 2 or indices[0] < 1 or indices[-1] > MAX_DYADIC_INDEX:  # noqa: PLR2004
        error_message = f"Need at least two dyadic indices in 1..{MAX_DYADIC_INDEX}, got {js}"
        raise DomainError(error_message)
    if trials < 0:
        error_message = f"Number of random fields must be non-negative, got {trials}"
        raise DomainError(error_message)
    rng = np.random.default_rng(seed)
    ell = None if piece == "G" else int(piece[1])
    norms: list[float] = []
    for j in indices:
        dyadic = DyadicPiece(j, ell, delta, flux)
        operator, battery = _torus_lab(dyadic) if ell is None else _polar_lab(dyadic, threads)
        shape = operator.weights.shape
        battery.extend(
            rng.standard_normal(shape) + 1j * rng.standard_normal(shape) for _ in range(trials)
        )
        norms.append(_estimate_norm(operator, battery, p))
        logger.info("%s piece, j = %d, p = %g: norm %.6g", piece, j, p, norms[-1])
    report = ScalingReport(
        piece=piece,
        p=p,
        delta=delta,
        alpha=flux.alpha_total,
        js=indices,
        norms=tuple(norms),
        slope=_fit_slope(indices, norms),
        bound_slope=critical_index(p) - delta,
    )
    logger.info("%s piece slope %.3f against %.3f", piece, report.slope, report.bound_slope)
    return report
