"""Tests for the Bochner-Riesz, spectral-measure and resolvent kernels."""

import cmath
import math

import mpmath
import numpy as np
import pytest

from ab_riesz.ab_model import (
    TWO_PI,
    AngularPotential,
    FluxParameter,
    PolarPoint,
    a_factor,
    a_factor_literal,
    euclidean_distance,
)
from ab_riesz.config import C_NORM, C_RES, C_SPEC, DIFFRACTIVE_WEIGHT
from ab_riesz.errors import DiagonalSingularityError, DomainError
from ab_riesz.kernels import (
    BRParams,
    asymptotic_amplitude_check,
    br_kernel_closed,
    br_kernel_series,
    br_kernel_table,
    br_profile,
    calibrate_constants,
    free_br_kernel,
    resolvent_kernel,
    resolvent_kernel_series,
    riesz_mean_from_spectral,
    spectral_measure_kernel,
    spectral_measure_series,
    spectral_profile,
    stone_density,
)


mpmath.mp.dps = 30

TOL = 1e-10

# (alpha, lam, delta, x, y); the last two pairs lie across the cut |Delta| = pi
ORACLE_CASES = [
    (0.3, 2.0, 0.5, (0.7, 0.4), (1.1, 2.2)),
    (-0.2, 1.5, 1.0, (0.9, 1.0), (0.5, 0.3)),
    (0.5, 2.0, 0.0, (0.6, 5.0), (0.9, 0.5)),
    (0.25, 3.0, 1.0, (0.4, 0.2), (0.8, 4.1)),
]


def _check_close(actual: complex, expected: complex, tolerance: float, label: str) -> None:
    if not abs(actual - expected) <= tolerance:
        error_message = f"{label}: got {actual!r}, expected {expected!r} (tolerance {tolerance:g})"
        raise AssertionError(error_message)


def _pure_ab(alpha: float) -> tuple[FluxParameter, AngularPotential]:
    return FluxParameter.from_total(alpha), AngularPotential.pure_ab(alpha)


def _points(x: tuple[float, float], y: tuple[float, float]) -> tuple[PolarPoint, PolarPoint]:
    return PolarPoint(*x), PolarPoint(*y)


class TestProfiles:
    """Test the radial profiles."""

    @staticmethod
    def test_br_profile_at_origin() -> None:
        """The profile is lam**2 / (2 (1 + delta)) on the diagonal."""
        _check_close(br_profile(0.0, 2.0, 0.5), 4.0 / 3.0, 1e-14, "P(0)")

    @staticmethod
    def test_br_profile_against_direct_integral() -> None:
        """The closed form matches int_0^lam rho (1 - rho**2/lam**2)**delta J_0(rho d)."""
        lam, delta, d = 3.0, 1.0, 0.7
        expected = mpmath.quad(
            lambda rho: rho * (1 - rho**2 / lam**2) ** delta * mpmath.besselj(0, rho * d),
            [0, lam],
        )
        _check_close(br_profile(d, lam, delta), float(expected), 1e-12, "P(0.7)")

    @staticmethod
    def test_br_profile_is_continuous_at_zero() -> None:
        """The small-argument branch meets the Bessel branch."""
        below, above = br_profile(np.array([0.99e-4, 1.01e-4]), 1.0, 0.5)
        _check_close(below, above, 1e-9, "continuity")

    @staticmethod
    def test_negative_distance() -> None:
        """Negative distances are rejected."""
        with pytest.raises(DomainError):
            br_profile(-1.0, 1.0, 0.0)

    @staticmethod
    @pytest.mark.parametrize("delta", [0.0, 0.5, 2.0])
    def test_free_kernel_at_origin(delta: float) -> None:
        """The free kernel at d = 0 is pi / (1 + delta) for lam = 1."""
        _check_close(free_br_kernel(0.0, 1.0, delta), math.pi / (1.0 + delta), 1e-14, "K(0)")

    @staticmethod
    @pytest.mark.parametrize(("delta", "expected"), [(0.0, 0.5), (1.0, 0.25)])
    def test_spectral_profile_at_origin(delta: float, expected: float) -> None:
        """With r1 = r2 = 0 and nu = 0 the profile is int_0^1 (1 - t**2)**delta t dt."""
        _check_close(spectral_profile(0.0, 0.0, 0.0, 1.0, delta), expected, 1e-12, "profile")

    @staticmethod
    def test_spectral_profile_against_mpmath() -> None:
        """A fractional-order profile agrees with direct quadrature."""
        nu, r1, r2, lam, delta = 0.3, 0.5, 0.8, 2.0, 0.5
        expected = mpmath.quad(
            lambda rho: (1 - rho**2 / lam**2) ** delta
            * mpmath.besselj(nu, r1 * rho)
            * mpmath.besselj(nu, r2 * rho)
            * rho,
            [0, lam],
        )
        _check_close(
            spectral_profile(nu, r1, r2, lam, delta, TOL), float(expected), 1e-9, "profile"
        )


class TestBRParams:
    """Test parameter validation."""

    @staticmethod
    @pytest.mark.parametrize(
        ("lam", "delta", "tol"), [(0.0, 0.0, 1e-9), (1.0, -0.5, 1e-9), (1.0, 0.0, 0.0)]
    )
    def test_rejects_out_of_range(lam: float, delta: float, tol: float) -> None:
        """lambda, delta and the tolerance are range-checked."""
        with pytest.raises(DomainError):
            BRParams.pure_ab(lam, delta, 0.3, tol)

    @staticmethod
    def test_rejects_mismatched_flux() -> None:
        """The flux decomposition must describe the potential."""
        with pytest.raises(DomainError):
            BRParams(1.0, 0.0, FluxParameter.from_total(0.3), AngularPotential.pure_ab(0.4))

    @staticmethod
    def test_with_potential_takes_its_flux() -> None:
        """The flux of a tabulated potential is its mean."""
        params = BRParams.with_potential(1.0, 0.0, AngularPotential.tabulated([0.2] * 8))
        _check_close(params.flux.alpha0, 0.2, 1e-15, "alpha0")


class TestBRKernel:
    """Test the closed-form Bochner-Riesz kernel against its partial-wave series."""

    @staticmethod
    @pytest.mark.parametrize(("alpha", "lam", "delta", "x", "y"), ORACLE_CASES)
    def test_closed_form_matches_series(
        alpha: float,
        lam: float,
        delta: float,
        x: tuple[float, float],
        y: tuple[float, float],
    ) -> None:
        """Both routes agree, on either side of the cut."""
        first, second = _points(x, y)
        params = BRParams.pure_ab(lam, delta, alpha, TOL)
        series, diagnostics = br_kernel_series(first, second, params)
        closed = br_kernel_closed(first, second, params)
        _check_close(closed.total, series, 1e-7, f"alpha={alpha}")
        if not diagnostics.tail_bound <= TOL:
            error_message = f"Tail bound {diagnostics.tail_bound:.3g} above tolerance"
            raise AssertionError(error_message)

    @staticmethod
    def test_free_anchor() -> None:
        """At alpha = 0 the kernel is the free one and has no diffractive part."""
        first, second = PolarPoint(0.8, 0.3), PolarPoint(1.2, 2.0)
        params = BRParams.pure_ab(2.0, 0.5, 0.0, TOL)
        d = float(euclidean_distance(0.8, 1.2, 0.3 - 2.0))
        closed = br_kernel_closed(first, second, params)
        expected = float(free_br_kernel(d, 2.0, 0.5)) / (4.0 * math.pi**2)
        _check_close(closed.total, expected, 1e-13, "closed")
        _check_close(closed.diffractive, 0.0, 0.0, "diffractive")
        _check_close(br_kernel_series(first, second, params)[0], expected, 1e-8, "series")

    @staticmethod
    def test_integer_flux_is_a_gauge() -> None:
        """Integer flux has no diffractive part and agrees with the series."""
        first, second = PolarPoint(0.5, 1.0), PolarPoint(0.9, 4.5)
        params = BRParams.pure_ab(2.0, 1.0, 1.0, TOL)
        closed = br_kernel_closed(first, second, params)
        if closed.diffractive != 0j:
            error_message = f"Integer flux produced a diffractive term {closed.diffractive}"
            raise AssertionError(error_message)
        _check_close(closed.total, br_kernel_series(first, second, params)[0], 1e-8, "alpha=1")

    @staticmethod
    def test_gauge_sign() -> None:
        """Shifting the flux by one multiplies the series by exp(+i Delta)."""
        first, second = PolarPoint(0.7, 2.5), PolarPoint(1.0, 0.5)
        shifted = br_kernel_series(first, second, BRParams.pure_ab(2.0, 0.5, 1.3, TOL))[0]
        base = br_kernel_series(first, second, BRParams.pure_ab(2.0, 0.5, 0.3, TOL))[0]
        _check_close(shifted, cmath.exp(2.0j) * base, 1e-8, "gauge")

    @staticmethod
    def test_hermitian() -> None:
        """K(x, y) = conj K(y, x)."""
        first, second = PolarPoint(0.6, 0.9), PolarPoint(1.1, 3.9)
        params = BRParams.pure_ab(2.5, 0.5, 0.35, TOL)
        forward = br_kernel_closed(first, second, params).total
        backward = br_kernel_closed(second, first, params).total
        _check_close(forward, backward.conjugate(), 1e-8, "hermitian")

    @staticmethod
    def test_rotation_invariance() -> None:
        """Rotating both points leaves a pure AB kernel unchanged."""
        params = BRParams.pure_ab(2.0, 1.0, 0.3, TOL)
        base = br_kernel_closed(PolarPoint(0.6, 0.2), PolarPoint(0.9, 1.7), params).total
        rotated = br_kernel_closed(PolarPoint(0.6, 1.2), PolarPoint(0.9, 2.7), params).total
        _check_close(rotated, base, 1e-8, "rotation")

    @staticmethod
    def test_scaling() -> None:
        """K_lam(x, y) = lam**2 K_1(lam x, lam y)."""
        lam = 2.0
        scaled = br_kernel_series(
            PolarPoint(0.4, 0.5), PolarPoint(0.6, 2.0), BRParams.pure_ab(lam, 0.5, 0.3, TOL)
        )[0]
        unit = br_kernel_series(
            PolarPoint(0.8, 0.5), PolarPoint(1.2, 2.0), BRParams.pure_ab(1.0, 0.5, 0.3, TOL)
        )[0]
        _check_close(scaled, lam**2 * unit, 1e-8, "scaling")

    @staticmethod
    def test_tabulated_potential_orientation() -> None:
        """A tabulated potential follows the series, and the reversed line integral does not."""
        grid = TWO_PI * np.arange(16) / 16
        potential = AngularPotential.tabulated(0.3 + 0.1 * np.cos(grid) ** 2)
        params = BRParams.with_potential(2.0, 0.5, potential, TOL)
        first, second = PolarPoint(0.7, 0.5), PolarPoint(1.0, 2.0)
        closed = br_kernel_closed(first, second, params)
        _check_close(closed.total, br_kernel_series(first, second, params)[0], 1e-7, "series")

        profile = float(br_profile(float(euclidean_distance(0.7, 1.0, -1.5)), 2.0, 0.5))
        oriented = C_NORM * complex(a_factor(0.5, 2.0, params.flux, potential)) * profile
        reversed_ = C_NORM * complex(a_factor_literal(0.5, 2.0, params.flux, potential)) * profile
        _check_close(closed.geometric, oriented, 1e-12, "geometric")
        if abs(reversed_ - oriented) <= 1e-3 * abs(oriented):
            error_message = "The reversed orientation should disagree with the series"
            raise AssertionError(error_message)


class TestSpectralAndResolvent:
    """Test the spectral measure, the resolvent and Stone's formula."""

    @staticmethod
    def test_free_anchors() -> None:
        """At alpha = 0: dE = rho J_0(rho d) / (2 pi) and R = (i/4) H_0(lam d)."""
        flux, potential = _pure_ab(0.0)
        first, second = PolarPoint(0.5, 0.0), PolarPoint(1.0, 1.0)
        d = float(euclidean_distance(0.5, 1.0, -1.0))
        spectral = spectral_measure_kernel(1.5, first, second, flux, potential, TOL)
        expected = 1.5 * float(mpmath.besselj(0, 1.5 * d)) / TWO_PI
        _check_close(spectral, expected, 1e-12, "dE")
        resolvent = resolvent_kernel(1.5, 1, first, second, flux, potential, TOL)
        _check_close(resolvent, 0.25j * complex(mpmath.hankel1(0, 1.5 * d)), 1e-12, "R+")

    @staticmethod
    def test_constants() -> None:
        """The configured constants reproduce the free normalization."""
        _check_close(C_SPEC / (4.0 * math.pi**2), 1.0 / TWO_PI, 1e-15, "c_spec")
        _check_close(C_RES / (4.0 * math.pi**2), 0.25j, 1e-15, "c_res")
        _check_close(DIFFRACTIVE_WEIGHT, 1.0 / math.pi, 0.0, "weight")

    @staticmethod
    @pytest.mark.parametrize("alpha", [0.3, -0.45])
    def test_spectral_matches_series(alpha: float) -> None:
        """Closed and partial-wave spectral measures agree."""
        flux, potential = _pure_ab(alpha)
        first, second = PolarPoint(0.6, 0.4), PolarPoint(1.0, 4.0)
        closed = spectral_measure_kernel(2.0, first, second, flux, potential, TOL)
        series, _ = spectral_measure_series(2.0, first, second, flux, potential, TOL)
        _check_close(closed, series, 1e-8, f"dE alpha={alpha}")

    @staticmethod
    def test_resolvent_matches_series() -> None:
        """Closed and partial-wave outgoing resolvents agree."""
        flux, potential = _pure_ab(0.3)
        first, second = PolarPoint(0.5, 0.4), PolarPoint(1.0, 2.5)
        closed = resolvent_kernel(2.0, 1, first, second, flux, potential, TOL)
        series, _ = resolvent_kernel_series(2.0, 1, first, second, flux, potential, TOL)
        _check_close(closed, series, 1e-8, "R+")

    @staticmethod
    def test_incoming_resolvent_matches_series() -> None:
        """The incoming kernel also agrees with its series."""
        flux, potential = _pure_ab(0.3)
        first, second = PolarPoint(0.5, 0.4), PolarPoint(1.0, 2.5)
        closed = resolvent_kernel(2.0, -1, first, second, flux, potential, TOL)
        series, _ = resolvent_kernel_series(2.0, -1, first, second, flux, potential, TOL)
        _check_close(closed, series, 1e-8, "R-")

    @staticmethod
    def test_stone_formula() -> None:
        """(lam / (i pi)) (R+ - R-) is the spectral measure."""
        flux, potential = _pure_ab(0.3)
        first, second = PolarPoint(0.7, 0.2), PolarPoint(1.1, 3.0)
        stone = stone_density(1.5, first, second, flux, potential, TOL)
        direct = spectral_measure_kernel(1.5, first, second, flux, potential, TOL)
        _check_close(stone, direct, 1e-8, "Stone")

    @staticmethod
    def test_diagonal_is_singular() -> None:
        """The resolvent is not defined at x = y."""
        flux, potential = _pure_ab(0.3)
        point = PolarPoint(1.0, 1.0)
        with pytest.raises(DiagonalSingularityError):
            resolvent_kernel(1.0, 1, point, point, flux, potential)

    @staticmethod
    def test_invalid_sign() -> None:
        """Only the two limits +-i0 exist."""
        flux, potential = _pure_ab(0.3)
        with pytest.raises(DomainError):
            resolvent_kernel(1.0, 0, PolarPoint(1.0, 0.0), PolarPoint(2.0, 0.0), flux, potential)

    @staticmethod
    def test_series_needs_distinct_radii() -> None:
        """The partial-wave resolvent is only summed for r1 != r2."""
        flux, potential = _pure_ab(0.3)
        with pytest.raises(DomainError):
            resolvent_kernel_series(
                1.0, 1, PolarPoint(1.0, 0.0), PolarPoint(1.0, 1.0), flux, potential
            )


class TestChecks:
    """Test the amplitude check, the calibration and the spectral integration."""

    @staticmethod
    @pytest.mark.parametrize("delta", [0.0, 1.0])
    def test_amplitude_slope(delta: float) -> None:
        """The envelope decays like (lam d)**(-3/2 - delta)."""
        report = asymptotic_amplitude_check([1.0, 4.0, 16.0], delta)
        _check_close(report.slope, -1.5 - delta, 0.05, "slope")
        if not report.passed:
            error_message = f"Amplitude check failed: {report}"
            raise AssertionError(error_message)

    @staticmethod
    @pytest.mark.slow()
    def test_calibration_recovers_constants() -> None:
        """Fitted constants match the configured ones."""
        report = calibrate_constants(samples=3)
        _check_close(report.c_norm, C_NORM, 1e-6, "c_norm")
        _check_close(report.c_spec, C_SPEC, 1e-6, "c_spec")
        _check_close(report.c_res, C_RES, 1e-6, "c_res")
        _check_close(report.diffractive_weight, DIFFRACTIVE_WEIGHT, 1e-6, "weight")

    @staticmethod
    @pytest.mark.slow()
    def test_riesz_mean_from_spectral() -> None:
        """Integrating the spectral measure against (1 - rho**2/lam**2)**delta gives K."""
        params = BRParams.pure_ab(1.5, 1.0, 0.3, 1e-8)
        first, second = PolarPoint(0.6, 0.3), PolarPoint(0.9, 2.0)
        integrated = riesz_mean_from_spectral(first, second, params)
        _check_close(integrated, br_kernel_closed(first, second, params).total, 1e-6, "mean")


class TestKernelTable:
    """Test the tabulated kernel."""

    @pytest.fixture()
    @staticmethod
    def params() -> BRParams:
        """Parameters shared by the table tests."""
        return BRParams.pure_ab(2.0, 1.0, 0.3, TOL)

    @staticmethod
    def test_series_table_matches_pointwise(params: BRParams) -> None:
        """Aliased partial waves reproduce the kernel at every grid angle."""
        radii = np.array([0.5, 1.0])
        table = br_kernel_table(radii, 8, params)
        if table.shape != (2, 2, 8):
            error_message = f"Unexpected table shape {table.shape}"
            raise AssertionError(error_message)
        for i, j, m in [(0, 1, 0), (1, 0, 3), (1, 1, 5), (0, 0, 7)]:
            first = PolarPoint(float(radii[i]), TWO_PI * m / 8)
            expected = br_kernel_series(first, PolarPoint(float(radii[j]), 0.0), params)[0]
            _check_close(table[i, j, m], expected, 1e-8, f"T[{i}, {j}, {m}]")

    @staticmethod
    def test_series_table_is_hermitian(params: BRParams) -> None:
        """T[j, i, m] = conj T[i, j, -m]."""
        table = br_kernel_table(np.array([0.4, 0.7, 1.2]), 6, params)
        mirrored = np.conj(table[:, :, (-np.arange(6)) % 6]).transpose(1, 0, 2)
        _check_close(float(np.max(np.abs(table - mirrored))), 0.0, 1e-10, "hermitian")

    @staticmethod
    @pytest.mark.slow()
    def test_closed_table_matches_series(params: BRParams) -> None:
        """Both routes build the same table."""
        radii = np.array([0.5, 1.0])
        series = br_kernel_table(radii, 6, params, route="series")
        closed = br_kernel_table(radii, 6, params, route="closed", threads=2)
        _check_close(float(np.max(np.abs(series - closed))), 0.0, 1e-7, "routes")

    @staticmethod
    def test_rejects_tabulated_potential() -> None:
        """Tables are built for pure AB potentials only."""
        params = BRParams.with_potential(1.0, 0.0, AngularPotential.tabulated([0.2] * 8))
        with pytest.raises(DomainError):
            br_kernel_table(np.array([1.0]), 4, params)

    @staticmethod
    def test_unknown_route(params: BRParams) -> None:
        """Only the series and closed routes exist."""
        with pytest.raises(DomainError):
            br_kernel_table(np.array([1.0]), 4, params, route="fft")
