"""Configuration and constants for the kernel library and the command line."""

import math

from decouple import config


# Environment settings
THREADS: int = config("AB_RIESZ_THREADS", default=1, cast=int)
DEFAULT_TOL: float = config("AB_RIESZ_TOL", default=1e-9, cast=float)
LOG_LEVEL: str = config("AB_RIESZ_LOG_LEVEL", default="INFO")
CONFIG_SECTION = "ab-riesz"
DEFAULT_SEED = 0xAB01

# Special functions
BESSEL_MAX_ORDER = 200.0
BESSEL_MAX_ARGUMENT = 1e5
BESSEL_SERIES_MAX_X = 12.0  # power series below, cancellation grows like e^x beyond
BESSEL_SERIES_TERMS = 60
BESSEL_ASYMPTOTIC_MIN_X = 35.0  # Hankel expansion once x >= max(35, nu**2)
BESSEL_ASYMPTOTIC_TERMS = 30
BESSEL_I_MAX_ORDER = 50.0
BESSEL_I_MAX_ARGUMENT = 50.0
GAMMA_MAX_ARGUMENT = 171.0
Y0_SERIES_MAX_X = 12.0

# Quadrature
QUAD_MAX_INTERVALS = 4000
QUAD_PROBE_COUNT = 10
QUAD_TRUNCATION_MARGIN = 10.0  # in units of 1/decay_rate
QUAD_NEAR_PHASE_SPAN = 64.0  # radians of phase integrated in s before switching to u
QUAD_FAR_PHASE_SPAN = 512.0  # radians of phase integrated in u before the asymptotic tail

# Partial-wave series
SERIES_K_MARGIN = 30
SERIES_K_CAP = 2000
SERIES_QUIET_TERMS = 5

# Normalization, fitted against the alpha = 0 partial-wave oracles
C_NORM = 2.0 * math.pi
C_SPEC = 2.0 * math.pi
C_RES = 1j * math.pi**2
DIFFRACTIVE_WEIGHT = 1.0 / math.pi

# Dyadic bounds
PARTITION_INNER = 0.8
PARTITION_OUTER = 1.25
D_BOUND_CEILING = 25.0
IJ_BOUND_CEILING = 8.0
FTH_BOUND_CEILING = 8.0
H_THETA_CUTOFF = 0.1
H_SCALING_TOLERANCE = 0.05
FOURIER_NYQUIST_MARGIN = 16.0  # theta spacing <= pi / (margin * max |zeta|)
FOURIER_REFINEMENT = 0.01  # largest relative change allowed on grid doubling
D_BOUND_J_WINDOW = (2, 3, 4, 5, 6, 7, 8)
DET_FD_STEP = 1e-3
DET_TOLERANCE = 1e-5
DERIVATIVE_TOLERANCE = 1e-6
B_INTEGRAL_CEILING = 1.0
B_INTEGRAL_REFINEMENT = 0.01  # largest relative change of the supremum from 64 to 256 angles

# Operator lab
POWER_ITERATIONS = 20
MAX_LAB_LAMBDA = 16.0
MAX_LAB_GRID = 256
RESOLUTION_LIMIT = 0.25
DYADIC_LAB_SPACING = 0.5  # Cartesian cell size for translation-invariant dyadic pieces
SLOPE_MARGIN = 0.15
