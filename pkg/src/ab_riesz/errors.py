"""Exception hierarchy shared by the library and the command line."""


class AbRieszError(Exception):
    """Base class for every error raised by ab-riesz."""

    exit_code = 3


class DomainError(AbRieszError, ValueError):
    """An argument lies outside the supported box of an operation."""


class SpecialFunctionRangeError(AbRieszError):
    """The requested special-function value would overflow."""


class QuadratureConvergenceError(AbRieszError):
    """Adaptive quadrature reached its subdivision limit.

    Attributes:
        worst_interval (tuple[float, float]): Subinterval with the largest error estimate.
        error_estimate (float): Error estimate carried by that subinterval.
    """

    def __init__(
        self, message: str, worst_interval: tuple[float, float], error_estimate: float
    ) -> None:
        """Initialize the error with the offending subinterval.

        Args:
            message (str): Human readable description.
            worst_interval (tuple[float, float]): Subinterval with the largest error.
            error_estimate (float): Its error estimate.
        """
        super().__init__(message)
        self.worst_interval = worst_interval
        self.error_estimate = error_estimate


class DecayHypothesisError(AbRieszError):
    """Sampling contradicts the exponential decay assumed for a semi-infinite integral."""

    def __init__(self, message: str, probe: float) -> None:
        """Initialize the error with the probe point that failed.

        Args:
            message (str): Human readable description.
            probe (float): Sample point where the bound was exceeded.
        """
        super().__init__(message)
        self.probe = probe


class SeriesConvergenceError(AbRieszError):
    """The partial-wave series could not meet its tail bound below the order cap."""


class DiagonalSingularityError(AbRieszError):
    """A kernel was requested on its singular set."""


class BIntegralError(AbRieszError):
    """Integrating the magnetic weight failed for one angle."""

    def __init__(self, message: str, dtheta: float) -> None:
        """Initialize the error with the offending angle difference.

        Args:
            message (str): Human readable description.
            dtheta (float): Angle difference where quadrature failed.
        """
        super().__init__(message)
        self.dtheta = dtheta


class ResolutionError(AbRieszError):
    """A discretization is too coarse to resolve the kernel oscillation."""

    exit_code = 4

    def __init__(self, message: str, required_grid: tuple[int, int]) -> None:
        """Initialize the error with the grid that would be fine enough.

        Args:
            message (str): Human readable description.
            required_grid (tuple[int, int]): Minimal (radial, angular) node counts.
        """
        super().__init__(message)
        self.required_grid = required_grid


class ConfigurationError(AbRieszError):
    """A run configuration is missing, unreadable or invalid."""

    exit_code = 2
