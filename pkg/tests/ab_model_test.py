"""Tests for the Aharonov-Bohm model data."""

import math
from pathlib import Path

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ab_riesz.ab_model import (
    FOUR_PI_SQUARED,
    TWO_PI,
    AngularPotential,
    FluxParameter,
    PolarPoint,
    a_factor,
    b_factor,
    b_integral_check,
    distance_bound_check,
    distance_d,
    distance_ds,
    eigen_nu,
    eigenfunction,
    flux,
    geometric_factors,
    load_potential,
    magnetic_factors,
    save_potential,
)
from ab_riesz.config import DEFAULT_SEED
from ab_riesz.errors import DomainError


DATA_DIR = Path(__file__).parent / "tests_data"


def _check_close(actual: complex, expected: complex, tolerance: float, label: str) -> None:
    if not abs(actual - expected) <= tolerance:
        error_message = f"{label}: got {actual!r}, expected {expected!r} (tolerance {tolerance:g})"
        raise AssertionError(error_message)


def _pure_ab(alpha: float) -> tuple[FluxParameter, AngularPotential]:
    return FluxParameter.from_total(alpha), AngularPotential.pure_ab(alpha)


def _literal_b(s: float, dtheta: float, alpha: float) -> complex:
    """Diffractive weight of a pure AB potential evaluated term by term in 40 digits."""
    with mpmath.workdps(40):
        phi = mpmath.mpf(dtheta) + mpmath.pi
        a = mpmath.mpf(alpha)
        s_mp = mpmath.mpf(s)
        ratio = (
            (mpmath.exp(-s_mp) - mpmath.cos(phi)) * mpmath.sinh(a * s_mp)
            - 1j * mpmath.sin(phi) * mpmath.cosh(a * s_mp)
        ) / (mpmath.cosh(s_mp) - mpmath.cos(phi))
        bracket = mpmath.sin(abs(a) * mpmath.pi) * mpmath.exp(-abs(a) * s_mp) + mpmath.sin(
            a * mpmath.pi
        ) * ratio
        return complex(-bracket / (4 * mpmath.pi**2))


class TestAngularPotential:
    """Test pure and tabulated potentials."""

    @pytest.fixture()
    @staticmethod
    def cosine_squared() -> AngularPotential:
        """A(theta) = 0.3 + 0.1 cos(theta)**2 on 16 samples."""
        theta = TWO_PI * np.arange(16) / 16
        return AngularPotential.tabulated(0.3 + 0.1 * np.cos(theta) ** 2)

    @staticmethod
    def test_flux_of_pure_ab() -> None:
        """The flux of a constant potential is the constant."""
        _check_close(flux(AngularPotential.pure_ab(0.5)), 0.5, 0.0, "pure AB flux")

    @staticmethod
    def test_flux_of_sine() -> None:
        """A sine perturbation integrates to zero."""
        theta = TWO_PI * np.arange(12) / 12
        potential = AngularPotential.tabulated(0.3 + 0.1 * np.sin(theta))
        _check_close(flux(potential), 0.3, 1e-12, "sine flux")

    @staticmethod
    def test_flux_of_cosine_squared(cosine_squared: AngularPotential) -> None:
        """The mean of cos(theta)**2 is 1/2."""
        _check_close(flux(cosine_squared), 0.35, 1e-12, "cos^2 flux")

    @staticmethod
    def test_primitive_endpoints(cosine_squared: AngularPotential) -> None:
        """primitive(0) = 0 and primitive(2 pi) = 2 pi alpha."""
        _check_close(cosine_squared.primitive(0.0), 0.0, 1e-15, "primitive(0)")
        _check_close(cosine_squared.primitive(TWO_PI), TWO_PI * 0.35, 1e-12, "primitive(2 pi)")

    @staticmethod
    def test_interpolation_and_derivative(cosine_squared: AngularPotential) -> None:
        """The interpolant reproduces the samples and is the derivative of the primitive."""
        theta = TWO_PI * np.arange(16) / 16
        if not np.allclose(cosine_squared.value(theta), cosine_squared.samples, atol=1e-13):
            error_message = "The interpolant does not reproduce the samples"
            raise AssertionError(error_message)
        points = np.array([0.3, 1.7, 4.1])
        step = 1e-5
        forward = cosine_squared.primitive(points + step)
        backward = cosine_squared.primitive(points - step)
        slope = (forward - backward) / (2.0 * step)
        if not np.allclose(slope, cosine_squared.value(points), atol=1e-8):
            error_message = f"primitive' = {slope} differs from A = {cosine_squared.value(points)}"
            raise AssertionError(error_message)

    @staticmethod
    def test_periodic_phase(cosine_squared: AngularPotential) -> None:
        """The gauge part is 2 pi-periodic and vanishes for pure AB."""
        theta = np.linspace(0.0, TWO_PI, 9)
        shifted = cosine_squared.periodic_phase(theta + TWO_PI)
        if not np.allclose(shifted, cosine_squared.periodic_phase(theta), atol=1e-12):
            error_message = "Gauge part is not periodic"
            raise AssertionError(error_message)
        if np.any(AngularPotential.pure_ab(0.3).periodic_phase(theta) != 0.0):
            error_message = "Pure AB gauge part must vanish"
            raise AssertionError(error_message)

    @staticmethod
    @pytest.mark.parametrize("samples", [[0.1, 0.2, 0.3], [0.1, math.nan, 0.2, 0.3]])
    def test_invalid_samples(samples: list[float]) -> None:
        """Too few or non-finite samples are rejected."""
        with pytest.raises(DomainError):
            AngularPotential.tabulated(samples)

    @staticmethod
    def test_load_fixture() -> None:
        """The packaged fixture holds 0.3 + 0.1 cos(theta)**2."""
        potential = load_potential(DATA_DIR / "potential.csv")
        _check_close(flux(potential), 0.35, 1e-12, "fixture flux")

    @staticmethod
    def test_save_and_load(cosine_squared: AngularPotential, tmp_path: Path) -> None:
        """A saved potential loads back with the same samples."""
        path = tmp_path / "potential.csv"
        save_potential(path, cosine_squared)
        loaded = load_potential(path)
        if not np.array_equal(loaded.samples, cosine_squared.samples):
            error_message = "Samples changed on the way through the file"
            raise AssertionError(error_message)

    @staticmethod
    def test_non_uniform_grid(tmp_path: Path) -> None:
        """Files off the grid 2 pi j / N are rejected."""
        path = tmp_path / "bad.csv"
        path.write_text("0,0.1\n1,0.1\n2,0.1\n4,0.1\n", encoding="utf-8")
        with pytest.raises(DomainError):
            load_potential(path)


class TestFluxParameter:
    """Test the gauge decomposition of the flux."""

    @staticmethod
    @pytest.mark.parametrize(
        ("alpha", "m", "alpha0"),
        [(0.5, 0, 0.5), (-0.5, -1, 0.5), (0.7, 1, 0.7 - 1.0), (3.0, 3, 0.0)],
    )
    def test_examples(alpha: float, m: int, alpha0: float) -> None:
        """Ties at +-1/2 go to +1/2."""
        parameter = FluxParameter.from_total(alpha)
        if (parameter.m, parameter.alpha0) != (m, alpha0):
            error_message = f"{alpha} decomposed as {parameter}"
            raise AssertionError(error_message)

    @staticmethod
    @settings(max_examples=200, deadline=None)
    @given(alpha=st.floats(-50.0, 50.0))
    def test_exact_decomposition(alpha: float) -> None:
        """alpha = m + alpha0 exactly with alpha0 in (-1/2, 1/2]."""
        parameter = FluxParameter.from_total(alpha)
        if not -0.5 < parameter.alpha0 <= 0.5 or parameter.m + parameter.alpha0 != alpha:
            error_message = f"Bad decomposition {parameter}"
            raise AssertionError(error_message)


class TestEigenpairs:
    """Test eigenvalues and eigenfunctions."""

    @staticmethod
    @pytest.mark.parametrize(
        ("k", "alpha", "nu"), [(0, 0.5, 0.5), (-1, 0.5, 0.5), (3, -0.25, 2.75)]
    )
    def test_eigen_nu(k: int, alpha: float, nu: float) -> None:
        """nu_k = |k + alpha|."""
        _check_close(eigen_nu(k, alpha), nu, 0.0, "nu")

    @staticmethod
    def test_pure_ab_eigenfunction() -> None:
        """The flux drops out for a constant potential."""
        theta = np.linspace(0.0, 6.0, 7)
        values = eigenfunction(3, theta, AngularPotential.pure_ab(0.37))
        if not np.allclose(values, np.exp(-3j * theta) / math.sqrt(TWO_PI), atol=1e-15):
            error_message = "Pure AB eigenfunction is not exp(-ik theta) / sqrt(2 pi)"
            raise AssertionError(error_message)
        _check_close(
            eigenfunction(0, 0.0, AngularPotential.pure_ab(0.37)),
            1.0 / math.sqrt(TWO_PI),
            1e-16,
            "phi_0(0)",
        )

    @staticmethod
    def test_tabulated_modulus() -> None:
        """Eigenfunctions of a tabulated potential are unimodular up to 1/sqrt(2 pi)."""
        rng = np.random.default_rng(DEFAULT_SEED)
        grid = TWO_PI * np.arange(8) / 8
        potential = AngularPotential.tabulated(0.2 + 0.3 * np.sin(2.0 * grid))
        values = eigenfunction(2, rng.uniform(0.0, TWO_PI, 100), potential)
        if not np.allclose(np.abs(values), 1.0 / math.sqrt(TWO_PI), rtol=1e-14):
            error_message = "Eigenfunction modulus differs from 1/sqrt(2 pi)"
            raise AssertionError(error_message)

    @staticmethod
    def test_orthonormality() -> None:
        """The trapezoid rule on 256 points is exact for |k|, |j| <= 8."""
        theta = TWO_PI * np.arange(256) / 256
        potential = AngularPotential.pure_ab(0.3)
        basis = np.array([eigenfunction(k, theta, potential) for k in range(-8, 9)])
        gram = (TWO_PI / 256) * basis @ basis.conj().T
        if not np.allclose(gram, np.eye(17), atol=1e-10):
            error_message = "Eigenfunctions are not orthonormal"
            raise AssertionError(error_message)


class TestDistances:
    """Test the Euclidean and diffractive distances."""

    @staticmethod
    @pytest.mark.parametrize(
        ("x", "y", "expected"),
        [
            (PolarPoint(2.0, 1.0), PolarPoint(0.5, 1.0), 1.5),
            (PolarPoint(2.0, 0.0), PolarPoint(0.5, math.pi), 2.5),
            (PolarPoint(1.0, 0.0), PolarPoint(1.0, math.pi / 2), math.sqrt(2.0)),
        ],
    )
    def test_euclidean(x: PolarPoint, y: PolarPoint, expected: float) -> None:
        """Law-of-cosines examples."""
        _check_close(distance_d(x, y), expected, 1e-15, "d")

    @staticmethod
    def test_diffractive_examples() -> None:
        """d_0 = r1 + r2, small r2 gives r1, and d_s increases."""
        x, y = PolarPoint(1.0, 0.0), PolarPoint(1.0, 2.0)
        _check_close(distance_ds(0.0, x, y), 2.0, 0.0, "d_0")
        _check_close(distance_ds(1.0, x, PolarPoint(1e-12, 2.0)), 1.0, 1e-11, "r2 -> 0")
        if not distance_ds(1.0, x, y) < distance_ds(2.0, x, y):
            error_message = "d_s is not increasing"
            raise AssertionError(error_message)

    @staticmethod
    @pytest.mark.parametrize("s", [39.5, 40.5, 45.0, 300.0])
    def test_large_s(s: float) -> None:
        """The scaled form agrees with the direct formula."""
        x, y = PolarPoint(0.7, 0.0), PolarPoint(1.3, 2.0)
        with mpmath.workdps(30):
            expected = float(mpmath.sqrt(0.7**2 + 1.3**2 + 2 * 0.7 * 1.3 * mpmath.cosh(s)))
        _check_close(distance_ds(s, x, y), expected, 1e-14 * expected, f"d_{s}")

    @staticmethod
    def test_negative_s() -> None:
        """The diffraction parameter is non-negative."""
        with pytest.raises(DomainError):
            distance_ds(-1.0, PolarPoint(1.0, 0.0), PolarPoint(1.0, 1.0))

    @staticmethod
    def test_distance_bound() -> None:
        """d_s >= |x - y| on 1000 random tuples."""
        fraction = distance_bound_check(1000, np.random.default_rng(DEFAULT_SEED))
        _check_close(fraction, 0.0, 0.0, "violation fraction")

    @staticmethod
    def test_polar_point_validation() -> None:
        """Angles are normalized and the origin is excluded."""
        _check_close(PolarPoint(1.0, -math.pi / 2).theta, 1.5 * math.pi, 1e-15, "normalized angle")
        with pytest.raises(DomainError):
            PolarPoint(0.0, 1.0)

    @staticmethod
    def test_geometric_factors() -> None:
        """The bundle agrees with the individual functions."""
        x, y = PolarPoint(1.0, 0.5), PolarPoint(2.0, 2.0)
        factors = geometric_factors(x, y)
        _check_close(factors.d, distance_d(x, y), 0.0, "d")
        _check_close(factors.d_s(0.0), 3.0, 0.0, "d_s(0)")
        _check_close(factors.b, math.sqrt(2.0) * math.sin((-1.5 + math.pi) / 2), 1e-15, "b")


class TestMagneticWeights:
    """Test the weights A and B."""

    @staticmethod
    def test_a_without_flux() -> None:
        """All phases are one for alpha = 0 and |Delta| < pi."""
        weight = a_factor(2.0, 0.5, FluxParameter.from_total(0.0), AngularPotential.pure_ab(0.0))
        _check_close(weight, 1.0 / FOUR_PI_SQUARED, 1e-18, "A at alpha = 0")

    @staticmethod
    def test_a_integer_flux() -> None:
        """The weight has constant modulus for integer flux."""
        rng = np.random.default_rng(DEFAULT_SEED)
        theta1, theta2 = rng.uniform(0.0, TWO_PI, (2, 100))
        weights = a_factor(theta1, theta2, *_pure_ab(2.0))
        if not np.allclose(np.abs(weights), 1.0 / FOUR_PI_SQUARED, rtol=1e-14):
            error_message = "|A| is not 1/(4 pi**2) for integer flux"
            raise AssertionError(error_message)

    @staticmethod
    def test_a_beyond_pi() -> None:
        """alpha = 1/2, Delta = 3 pi/2 gives exp(0.75 pi i) exp(-pi i) / (4 pi**2)."""
        weight = a_factor(
            1.5 * math.pi, 0.0, FluxParameter.from_total(0.5), AngularPotential.pure_ab(0.5)
        )
        expected = np.exp(0.75j * math.pi) * np.exp(-1j * math.pi) / FOUR_PI_SQUARED
        _check_close(weight, expected, 1e-17, "A at 3 pi/2")

    @staticmethod
    def test_a_shadow_line_average() -> None:
        """On Delta = pi the sheet factor is the average of both sides."""
        alpha = 0.3
        weight = a_factor(math.pi, 0.0, *_pure_ab(alpha))
        expected = np.exp(1j * alpha * math.pi) * 0.5 * (1.0 + np.exp(-2j * math.pi * alpha))
        _check_close(weight, expected / FOUR_PI_SQUARED, 1e-17, "A on the shadow line")

    @staticmethod
    def test_conjugation_symmetry() -> None:
        """A(alpha) and B(alpha) are the conjugates of A(-alpha) and B(-alpha)."""
        rng = np.random.default_rng(DEFAULT_SEED)
        theta1, theta2 = rng.uniform(0.0, TWO_PI, (2, 200))
        s = rng.uniform(0.0, 5.0, 200)
        for alpha in rng.uniform(-0.45, 0.45, 5):
            plus, minus = FluxParameter.from_total(alpha), FluxParameter.from_total(-alpha)
            potential_plus = AngularPotential.pure_ab(alpha)
            potential_minus = AngularPotential.pure_ab(-alpha)
            a_plus = a_factor(theta1, theta2, plus, potential_plus)
            a_minus = a_factor(theta1, theta2, minus, potential_minus)
            b_plus = b_factor(s, theta1, theta2, plus, potential_plus)
            b_minus = b_factor(s, theta1, theta2, minus, potential_minus)
            symmetric = np.allclose(a_plus, np.conj(a_minus))
            symmetric = symmetric and np.allclose(b_plus, np.conj(b_minus))
            if not symmetric:
                error_message = f"Conjugation symmetry fails at alpha = {alpha}"
                raise AssertionError(error_message)

    @staticmethod
    def test_b_integer_flux() -> None:
        """B vanishes identically for integer flux."""
        s = np.linspace(0.0, 10.0, 11)
        values = b_factor(s, 1.0, 4.0, *_pure_ab(-1.0))
        if np.any(values != 0.0):
            error_message = "B must vanish for integer flux"
            raise AssertionError(error_message)

    @staticmethod
    @pytest.mark.parametrize(
        ("s", "dtheta", "alpha"),
        [(1.0, 0.0, 0.5), (0.7, 1.3, 0.3), (2.0, -2.5, -0.2), (0.01, 3.0, 0.4), (45.0, 1.0, 0.3)],
    )
    def test_b_against_direct_formula(s: float, dtheta: float, alpha: float) -> None:
        """The stable evaluation matches the formula evaluated in 40 digits."""
        value = b_factor(s, dtheta, 0.0, *_pure_ab(alpha))
        expected = _literal_b(s, dtheta, alpha)
        _check_close(value, expected, 1e-13 * abs(expected) + 1e-300, f"B({s}, {dtheta})")

    @staticmethod
    def test_b_removable_point() -> None:
        """At s = 0 on the shadow line the ratio takes its limit -2 alpha."""
        alpha = 0.3
        parameter, potential = _pure_ab(alpha)
        at_zero = b_factor(0.0, math.pi, 0.0, parameter, potential)
        nearby = b_factor(1e-7, math.pi, 0.0, parameter, potential)
        expected = -(math.sin(alpha * math.pi) * (1.0 - 2.0 * alpha)) / FOUR_PI_SQUARED
        _check_close(at_zero, expected, 1e-15, "B(0) on the shadow line")
        _check_close(nearby, expected, 1e-8, "B(1e-7) on the shadow line")

    @staticmethod
    def test_b_decay() -> None:
        """|B| <= C exp(-|alpha0| s) at s = 30."""
        alpha = 0.3
        value = b_factor(30.0, 2.0, 0.5, *_pure_ab(alpha))
        if not abs(value) * math.exp(alpha * 30.0) <= 1.0 / FOUR_PI_SQUARED:
            error_message = f"B decays too slowly: {abs(value)}"
            raise AssertionError(error_message)

    @staticmethod
    def test_magnetic_factors() -> None:
        """The bundle agrees with the individual weights."""
        x, y = PolarPoint(1.0, 0.5), PolarPoint(2.0, 2.0)
        parameter, potential = FluxParameter.from_total(0.25), AngularPotential.pure_ab(0.25)
        factors = magnetic_factors(x, y, parameter, potential)
        _check_close(factors.a_weight, a_factor(0.5, 2.0, parameter, potential), 0.0, "A")
        expected = b_factor(1.5, 0.5, 2.0, parameter, potential)
        _check_close(factors.b_weight(1.5), expected, 0.0, "B")

    @staticmethod
    def test_b_integral_examples() -> None:
        """The integral of |B| is zero for integer flux and finite near the shadow line."""
        integer = b_integral_check([0.0, 1.0], FluxParameter.from_total(1.0))
        _check_close(integer, 0.0, 0.0, "integer flux")
        grid = [0.0, math.pi / 2, math.pi - 1e-3, math.pi]
        supremum = b_integral_check(grid, FluxParameter.from_total(0.5))
        if not 0.0 < supremum < 1.0:
            error_message = f"Unexpected supremum {supremum}"
            raise AssertionError(error_message)

    @staticmethod
    def test_b_integral_refinement() -> None:
        """The supremum is stable between 64- and 256-point grids."""
        parameter = FluxParameter.from_total(0.5)
        coarse = b_integral_check(TWO_PI * np.arange(64) / 64 - math.pi, parameter)
        fine = b_integral_check(TWO_PI * np.arange(256) / 256 - math.pi, parameter)
        _check_close(coarse, fine, 0.01 * fine, "refined supremum")
