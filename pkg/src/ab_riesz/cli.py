"""Command-line front end of ab-riesz.

Subcommands:
    eval      evaluate a kernel in closed form, by its partial-wave series, or both
    verify    run the dyadic bound suites
    converge  track ||S_lambda f - f||_p as lambda grows, optionally against a second order
    scaling   measure the operator norms of dyadic pieces against j

Records go to standard output (or --out) as comma-delimited rows; --summary writes a
JSON summary of the run. Settings can come from an INI file (--config) whose
`[ab-riesz]` section uses the field names below; flags override file values.

Exit codes: 0 pass, 1 suite failure, 2 configuration error, 3 computational error,
4 resolution error.
"""

import argparse
import configparser
import logging
import math
from collections.abc import Sequence
from itertools import product
from pathlib import Path
from typing import Annotated, Literal, TypeVar

import coloredlogs
import numpy as np
from decouple import RepositoryIni
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    FilePath,
    NonNegativeFloat,
    NonNegativeInt,
    PositiveFloat,
    ValidationError,
    field_validator,
    model_validator,
)

from ab_riesz.ab_model import (
    TWO_PI,
    AngularPotential,
    FluxParameter,
    PolarPoint,
    b_integral_check,
    load_potential,
)
from ab_riesz.config import (
    B_INTEGRAL_CEILING,
    B_INTEGRAL_REFINEMENT,
    CONFIG_SECTION,
    D_BOUND_J_WINDOW,
    DEFAULT_SEED,
    DEFAULT_TOL,
    LOG_LEVEL,
    MAX_LAB_GRID,
    THREADS,
)
from ab_riesz.dyadic_bounds import (
    STABILITY_FACTOR,
    BoundReport,
    d_bound_scan,
    fourier_bound_H,
    verify_derivatives,
    verify_det_lemma,
    verify_h_scaling,
    verify_ij_bound,
)
from ab_riesz.errors import AbRieszError, ConfigurationError
from ab_riesz.kernels import (
    BRParams,
    SeriesDiagnostics,
    br_kernel_closed,
    br_kernel_series,
    resolvent_kernel,
    resolvent_kernel_series,
    spectral_measure_kernel,
    spectral_measure_series,
)
from ab_riesz.operator_lab import (
    CATALOG,
    MAX_DYADIC_INDEX,
    PIECES,
    ComparisonReport,
    PolarGrid,
    comparative_experiment,
    convergence_experiment,
    critical_index,
    dyadic_norm_scaling,
    sample_function,
)
from ab_riesz.utils import Record, save_summary, to_record, write_records


logger = logging.getLogger(__name__)

SUITES = ("b-integral", "d-bound", "ij-bound", "ft-h", "det", "derivs")
B_COARSE_ANGLES = 64
B_FINE_ANGLES = 256
NEAR_SHADOW = math.pi - 1e-3
FOURIER_RADIUS = 0.5
FOURIER_ZETAS = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)

Outcome = tuple[list[Record], dict[str, object], int]


def _split(value: object) -> object:
    """Split comma-separated text into items.

    >>> _split("0.3, 0.5")
    ['0.3', '0.5']
    """
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


def _index_range(value: object) -> object:
    """Read "low-high" as an inclusive range and anything else as a comma list.

    >>> _index_range("3-6")
    [3, 4, 5, 6]
    """
    if isinstance(value, str) and "-" in value:
        low, _, high = value.partition("-")
        return list(range(int(low), int(high) + 1))
    return _split(value)


def _grid_shape(value: object) -> object:
    """Read "NxM" as a pair of node counts."""
    if isinstance(value, str):
        return value.lower().split("x")
    return value


def _integer(value: object) -> object:
    """Read integers in any base Python accepts, such as 0xAB01."""
    if isinstance(value, str):
        return int(value, 0)
    return value


FloatList = Annotated[tuple[float, ...], BeforeValidator(_split), Field(min_length=1)]
DeltaList = Annotated[tuple[NonNegativeFloat, ...], BeforeValidator(_split), Field(min_length=1)]
Point = Annotated[tuple[NonNegativeFloat, float], BeforeValidator(_split)]
GridCount = Annotated[int, Field(ge=1, le=MAX_LAB_GRID)]
GridShape = Annotated[tuple[GridCount, GridCount], BeforeValidator(_grid_shape)]
IndexList = Annotated[
    tuple[NonNegativeInt, ...], BeforeValidator(_index_range), Field(min_length=1)
]
DyadicIndex = Annotated[int, Field(ge=1, le=MAX_DYADIC_INDEX)]
DyadicRange = Annotated[
    tuple[DyadicIndex, ...], BeforeValidator(_index_range), Field(min_length=2)
]


class RunConfig(BaseModel):
    """Settings shared by every command.

    Attributes:
        out (Path | None): Destination of the records; standard output when None.
        summary (Path | None): Destination of the JSON summary.
        seed (int): Seed of every random draw.
        tol (float): Kernel tolerance of eval and converge.
        threads (int): Worker bound of the library calls.
    """

    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)

    out: Path | None = None
    summary: Path | None = None
    seed: Annotated[NonNegativeInt, BeforeValidator(_integer)] = DEFAULT_SEED
    tol: PositiveFloat = DEFAULT_TOL
    threads: Annotated[int, Field(ge=1)] = THREADS


class EvalConfig(RunConfig):
    """Settings of `eval`; for the spectral kernel `lam` is the spectral parameter rho."""

    kernel: Literal["br", "spectral", "resolvent"] = "br"
    method: Literal["closed", "series", "both"] = "both"
    alpha: float = 0.5
    delta: NonNegativeFloat = 0.0
    lam: PositiveFloat = 1.0
    sign: int = 1
    x: Point = (1.0, 0.5)
    y: Point = (0.7, 2.0)
    potential: FilePath | None = None

    @field_validator("sign")
    @classmethod
    def check_sign(cls, sign: int) -> int:
        """Accept the outgoing and incoming signs only."""
        if sign not in {1, -1}:
            error_message = f"sign must be 1 or -1, got {sign}"
            raise ValueError(error_message)
        return sign


class VerifyConfig(RunConfig):
    """Settings of `verify`."""

    suite: Literal["b-integral", "d-bound", "ij-bound", "ft-h", "det", "derivs", "all"] = "all"
    j_range: IndexList = D_BOUND_J_WINDOW
    alpha_list: FloatList = (0.5,)
    delta_list: DeltaList = (0.25,)
    samples: Annotated[int, Field(ge=1)] = 100


class ConvergeConfig(RunConfig):
    """Settings of `converge`."""

    p: Annotated[float, Field(ge=1.0)] = 2.0
    delta: NonNegativeFloat = 0.0
    function: Literal["disk", "annulus", "gaussian", "packet"] = "gaussian"
    lambda_list: Annotated[
        tuple[PositiveFloat, ...], BeforeValidator(_split), Field(min_length=1)
    ] = (2.0, 3.0, 4.0)
    grid: GridShape = (16, 96)
    radius: PositiveFloat = 0.8
    scale: PositiveFloat = 0.5
    alpha: float = 0.5
    method: Literal["closed", "series"] = "series"
    compare_delta: NonNegativeFloat | None = None

    @model_validator(mode="after")
    def check_comparison(self) -> "ConvergeConfig":
        """Reject a second order equal to the first."""
        if self.compare_delta == self.delta:
            error_message = f"compare_delta must differ from delta, both are {self.delta}"
            raise ValueError(error_message)
        return self


class ScalingConfig(RunConfig):
    """Settings of `scaling`."""

    piece: Literal["G", "D1", "D2", "D3"] = "G"
    p: float = 2.0
    delta: NonNegativeFloat = 0.5
    j_range: DyadicRange = (4, 5, 6, 7)
    trials: NonNegativeInt = 2
    alpha: float = 0.5

    @field_validator("p")
    @classmethod
    def check_exponent(cls, p: float) -> float:
        """Accept the exponents the norm estimates cover."""
        if not (p == 2.0 or p > 4.0):  # noqa: PLR2004
            error_message = f"p must be 2 or above 4, got {p}"
            raise ValueError(error_message)
        return p


ConfigT = TypeVar("ConfigT", bound=RunConfig)


class _IniSection(RepositoryIni):
    """INI file whose settings live in the ab-riesz section."""

    SECTION = CONFIG_SECTION


def _describe(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in item['loc']) or 'config'}: {item['msg']}"
        for item in error.errors()
    )


def load_config(model: type[ConfigT], args: argparse.Namespace) -> ConfigT:
    """Merge the INI file and the flags, then validate them.

    Args:
        model (type[ConfigT]): Configuration model of the command.
        args (argparse.Namespace): Parsed flags; None means not given.

    Returns:
        ConfigT: The validated configuration.

    Raises:
        ConfigurationError: If the file cannot be read or a value is invalid.
    """
    values: dict[str, object] = {}
    if args.config is not None:
        try:
            repository = _IniSection(str(args.config))
        except (OSError, configparser.Error) as error:
            error_message = f"Cannot read configuration file {args.config}: {error}"
            raise ConfigurationError(error_message) from error
        if repository.parser.has_section(repository.SECTION):
            values.update(repository.parser.items(repository.SECTION, raw=True))
    values.update(
        (name, value)
        for name, value in vars(args).items()
        if name in model.model_fields and value is not None
    )
    try:
        return model.model_validate(values)
    except ValidationError as error:
        error_message = f"Invalid {args.command} configuration: {_describe(error)}"
        raise ConfigurationError(error_message) from error


def _complex_fields(name: str, value: complex) -> Record:
    return {f"{name}_re": value.real, f"{name}_im": value.imag}


def cmd_eval(config: EvalConfig) -> Outcome:
    """Evaluate one kernel value and compare the closed form with the series.

    Args:
        config (EvalConfig): Kernel, method, parameters and points.

    Returns:
        Outcome: One record, the summary and the exit code.
    """
    x, y = PolarPoint(*config.x), PolarPoint(*config.y)
    if config.potential is None:
        potential = AngularPotential.pure_ab(config.alpha)
    else:
        potential = load_potential(config.potential)
        logger.info("Loaded a potential of flux %g from %s", potential.alpha, config.potential)
    flux = FluxParameter.from_total(potential.alpha)
    record: Record = {
        "kernel": config.kernel,
        "method": config.method,
        "alpha": flux.alpha_total,
        "delta": config.delta,
        "lambda": config.lam,
        "x_r": x.r,
        "x_theta": x.theta,
        "y_r": y.r,
        "y_theta": y.theta,
    }
    closed = config.method != "series"
    series = config.method != "closed"
    closed_value: complex | None = None
    series_result: tuple[complex, SeriesDiagnostics] | None = None
    if config.kernel == "br":
        params = BRParams.with_potential(config.lam, config.delta, potential, config.tol)
        if closed:
            decomposition = br_kernel_closed(x, y, params)
            record |= _complex_fields("geometric", decomposition.geometric)
            record |= _complex_fields("diffractive", decomposition.diffractive)
            closed_value = decomposition.total
        if series:
            series_result = br_kernel_series(x, y, params)
    elif config.kernel == "spectral":
        if closed:
            closed_value = spectral_measure_kernel(config.lam, x, y, flux, potential, config.tol)
        if series:
            series_result = spectral_measure_series(
                config.lam, x, y, flux, potential, config.tol
            )
    else:
        record["sign"] = config.sign
        if closed:
            closed_value = resolvent_kernel(
                config.lam, config.sign, x, y, flux, potential, config.tol
            )
        if series:
            series_result = resolvent_kernel_series(
                config.lam, config.sign, x, y, flux, potential, config.tol
            )
    if closed_value is not None:
        record |= _complex_fields("total", closed_value)
    if series_result is not None:
        series_value, diagnostics = series_result
        record |= _complex_fields("series", series_value)
        record["k_max_used"] = diagnostics.k_max_used
        if closed_value is not None:
            record["difference"] = abs(closed_value - series_value)
            logger.info("Closed form and series differ by %.3g", record["difference"])
    return [record], {"command": "eval", **record}, 0


def _angles(count: int) -> np.ndarray:
    """Uniform angle differences on [-pi, pi) plus one just short of the shadow line."""
    return np.append(TWO_PI * np.arange(count) / count - math.pi, NEAR_SHADOW)


def _b_integral_suite(config: VerifyConfig) -> list[BoundReport]:
    reports: list[BoundReport] = []
    for alpha in config.alpha_list:
        flux = FluxParameter.from_total(alpha)
        fine = b_integral_check(_angles(B_FINE_ANGLES), flux)
        coarse = b_integral_check(_angles(B_COARSE_ANGLES), flux)
        change = abs(fine - coarse) / fine if fine > 0 else 0.0
        reports.append(
            BoundReport(
                suite="B",
                j=-1,
                ell=0,
                alpha=flux.alpha_total,
                delta=0.0,
                sup_ratio=fine,
                argmax_point=(),
                grid_spec=f"{B_FINE_ANGLES} angles on [-pi, pi) and pi - 1e-3",
                ceiling=B_INTEGRAL_CEILING,
            )
        )
        reports.append(
            BoundReport(
                suite="B-refine",
                j=-1,
                ell=0,
                alpha=flux.alpha_total,
                delta=0.0,
                sup_ratio=change,
                argmax_point=(),
                grid_spec=f"{B_COARSE_ANGLES} against {B_FINE_ANGLES} angles",
                ceiling=B_INTEGRAL_REFINEMENT,
                details={"coarse": coarse, "fine": fine},
            )
        )
    return reports


def _d_bound_suite(config: VerifyConfig) -> list[BoundReport]:
    reports: list[BoundReport] = []
    for alpha, delta in product(config.alpha_list, config.delta_list):
        flux = FluxParameter.from_total(alpha)
        for ell in (1, 2):
            scan, _ = d_bound_scan(ell, delta, flux, js=config.j_range, threads=config.threads)
            reports.extend(scan)
            ratios = [report.sup_ratio for report in scan]
            # Passes when the largest supremum is at most twice the smallest.
            reports.append(
                BoundReport(
                    suite="D-stability",
                    j=-1,
                    ell=ell,
                    alpha=flux.alpha_total,
                    delta=delta,
                    sup_ratio=max(ratios),
                    argmax_point=(),
                    grid_spec=f"j={list(config.j_range)}",
                    ceiling=STABILITY_FACTOR * min(ratios),
                    details={"min_ratio": min(ratios)},
                )
            )
    return reports


def _ij_bound_suite(config: VerifyConfig) -> list[BoundReport]:
    reports = [verify_ij_bound(j, threads=config.threads) for j in config.j_range]
    for alpha, delta in product(config.alpha_list, config.delta_list):
        flux = FluxParameter.from_total(alpha)
        reports.extend(verify_h_scaling(j, delta, flux) for j in config.j_range)
    return reports


def _fourier_suite(config: VerifyConfig) -> list[BoundReport]:
    return [
        fourier_bound_H(
            j,
            FOURIER_RADIUS,
            FOURIER_RADIUS,
            FOURIER_ZETAS,
            delta,
            FluxParameter.from_total(alpha),
            threads=config.threads,
        )
        for alpha, delta in product(config.alpha_list, config.delta_list)
        for j in config.j_range
    ]


def _run_suite(suite: str, config: VerifyConfig) -> list[BoundReport]:
    if suite == "b-integral":
        return _b_integral_suite(config)
    if suite == "d-bound":
        return _d_bound_suite(config)
    if suite == "ij-bound":
        return _ij_bound_suite(config)
    if suite == "ft-h":
        return _fourier_suite(config)
    if suite == "det":
        return [verify_det_lemma(config.samples, config.seed)]
    return [verify_derivatives(config.samples, config.seed)]


def cmd_verify(config: VerifyConfig) -> Outcome:
    """Run the selected bound suites.

    Args:
        config (VerifyConfig): Suite selection and parameter lists.

    Returns:
        Outcome: One record per report, the summary and exit code 1 if any report failed.
    """
    suites = SUITES if config.suite == "all" else (config.suite,)
    reports: list[BoundReport] = []
    for suite in suites:
        logger.info("Running the %s suite", suite)
        reports.extend(_run_suite(suite, config))
    failed = [report for report in reports if not report.passed]
    for report in failed:
        logger.error(
            "%s (j=%d, ell=%d, alpha=%g, delta=%g): sup ratio %.4g above %.4g",
            report.suite,
            report.j,
            report.ell,
            report.alpha,
            report.delta,
            report.sup_ratio,
            report.ceiling,
        )
    summary: dict[str, object] = {
        "command": "verify",
        "suites": list(suites),
        "reports": len(reports),
        "failed": len(failed),
        "passed": not failed,
    }
    return [to_record(report) for report in reports], summary, 1 if failed else 0


def cmd_converge(config: ConvergeConfig) -> Outcome:
    """Track the convergence of S_lambda f to f on a polar grid.

    With compare_delta the experiment also runs at that order and the summary carries
    the gap of the final errors. The gap is reported, never judged.

    Args:
        config (ConvergeConfig): Exponent, order, test function, cutoffs and grid.

    Returns:
        Outcome: One record per resolved cutoff and order, the summary and exit code 0.
    """
    grid = PolarGrid(config.grid[0], config.grid[1], config.radius)
    f = sample_function(config.function, grid, scale=config.scale)
    comparison: ComparisonReport | None = None
    if config.compare_delta is None:
        report = convergence_experiment(
            f,
            config.p,
            config.delta,
            config.lambda_list,
            config.method,
            alpha=config.alpha,
            name=config.function,
            threads=config.threads,
        )
        records = report.records()
    else:
        comparison = comparative_experiment(
            f,
            config.p,
            (config.delta, config.compare_delta),
            config.lambda_list,
            config.method,
            alpha=config.alpha,
            name=config.function,
            threads=config.threads,
        )
        report = comparison.lower if comparison.lower.delta == config.delta else comparison.upper
        records = comparison.records()
    logger.info(
        "%s, p = %g, delta = %g: slope %.4f, %s",
        config.function,
        config.p,
        config.delta,
        report.slope,
        report.status,
    )
    summary: dict[str, object] = {
        "command": "converge",
        "function": config.function,
        "p": config.p,
        "delta": config.delta,
        "alpha": config.alpha,
        "critical_index": critical_index(config.p),
        "slope": report.slope,
        "status": report.status,
        "required_grid": report.required_grid,
    }
    if comparison is not None:
        summary["comparison"] = {
            "lower_delta": comparison.lower.delta,
            "upper_delta": comparison.upper.delta,
            "lambda": comparison.lam,
            "lower_error": comparison.lower_error,
            "upper_error": comparison.upper_error,
            "gap": comparison.gap,
            "ordered": comparison.ordered,
        }
    return records, summary, 0


def cmd_scaling(config: ScalingConfig) -> Outcome:
    """Measure the norms of a dyadic piece family and fit their slope.

    Args:
        config (ScalingConfig): Piece, exponent, order and dyadic indices.

    Returns:
        Outcome: One record per index, the summary and exit code 0 iff the slope passes.
    """
    report = dyadic_norm_scaling(
        config.piece,
        config.p,
        config.j_range,
        config.delta,
        FluxParameter.from_total(config.alpha),
        trials=config.trials,
        seed=config.seed,
        threads=config.threads,
    )
    summary: dict[str, object] = {
        "command": "scaling",
        "piece": config.piece,
        "p": config.p,
        "delta": config.delta,
        "alpha": config.alpha,
        "slope": report.slope if math.isfinite(report.slope) else None,
        "bound_slope": report.bound_slope,
        "passed": report.passed,
    }
    return report.records(), summary, 0 if report.passed else 1


def _non_finite(records: Sequence[Record]) -> list[str]:
    return [
        f"row {index} {key}"
        for index, record in enumerate(records)
        for key, value in record.items()
        if isinstance(value, float) and not math.isfinite(value)
    ]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help=f"INI file with a [{CONFIG_SECTION}] section")
    common.add_argument("--out", help="CSV destination of the records (default: stdout)")
    common.add_argument("--summary", help="JSON destination of the run summary")
    common.add_argument("--seed", help=f"random seed (default: {DEFAULT_SEED:#x})")
    common.add_argument("--tol", help="kernel tolerance")
    common.add_argument("--threads", help="worker bound (default: AB_RIESZ_THREADS)")
    common.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")

    parser = argparse.ArgumentParser(
        prog="ab-riesz", description="Bochner-Riesz kernels of the Aharonov-Bohm operator."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    evaluate = commands.add_parser("eval", parents=[common], help="evaluate one kernel value")
    evaluate.add_argument("--kernel", choices=("br", "spectral", "resolvent"))
    evaluate.add_argument("--method", choices=("closed", "series", "both"))
    evaluate.add_argument("--alpha", help="total flux")
    evaluate.add_argument("--delta", help="Riesz order")
    evaluate.add_argument("--lambda", dest="lam", help="cutoff, or rho for the spectral kernel")
    evaluate.add_argument("--sign", help="1 outgoing or -1 incoming resolvent")
    evaluate.add_argument("--x", help='first point as "r,theta"')
    evaluate.add_argument("--y", help='second point as "r,theta"')
    evaluate.add_argument("--potential", help="two-column angular potential file")

    verify = commands.add_parser("verify", parents=[common], help="run the bound suites")
    verify.add_argument("--suite", choices=(*SUITES, "all"))
    verify.add_argument("--j-range", help='dyadic indices as "low-high" or a comma list')
    verify.add_argument("--alpha-list", help="comma-separated fluxes")
    verify.add_argument("--delta-list", help="comma-separated Riesz orders")
    verify.add_argument("--samples", help="random configurations of det and derivs")

    converge = commands.add_parser("converge", parents=[common], help="convergence experiment")
    converge.add_argument("--p", help="Lebesgue exponent")
    converge.add_argument("--delta", help="Riesz order")
    converge.add_argument("--function", choices=CATALOG)
    converge.add_argument("--lambda-list", help="comma-separated cutoffs")
    converge.add_argument("--grid", help='polar grid as "NxM" radial by angular nodes')
    converge.add_argument("--radius", help="outer radius of the grid")
    converge.add_argument("--scale", help="support radius of the test function")
    converge.add_argument("--alpha", help="total flux")
    converge.add_argument("--method", choices=("closed", "series"))
    converge.add_argument("--compare-delta", help="second Riesz order run on the same grid")

    scaling = commands.add_parser("scaling", parents=[common], help="dyadic norm scaling")
    scaling.add_argument("--piece", choices=PIECES)
    scaling.add_argument("--p", help="Lebesgue exponent, 2 or above 4")
    scaling.add_argument("--delta", help="Riesz order")
    scaling.add_argument("--j-range", help='dyadic indices as "low-high" or a comma list')
    scaling.add_argument("--trials", help="random input fields per index")
    scaling.add_argument("--alpha", help="total flux")
    return parser


def configure_logging(*, verbose: bool) -> None:
    """Route every log record through coloredlogs."""
    for handler in list(logging.root.handlers):
        logging.root.removeHandler(handler)
    coloredlogs.install(level=logging.DEBUG if verbose else LOG_LEVEL)


def _dispatch(args: argparse.Namespace) -> tuple[RunConfig, Outcome]:
    match args.command:
        case "eval":
            eval_config = load_config(EvalConfig, args)
            return eval_config, cmd_eval(eval_config)
        case "verify":
            verify_config = load_config(VerifyConfig, args)
            return verify_config, cmd_verify(verify_config)
        case "converge":
            converge_config = load_config(ConvergeConfig, args)
            return converge_config, cmd_converge(converge_config)
        case _:
            scaling_config = load_config(ScalingConfig, args)
            return scaling_config, cmd_scaling(scaling_config)


def main(argv: Sequence[str] | None = None) -> int:
    """Run the ab-riesz command line.

    Args:
        argv (Sequence[str] | None): Arguments without the program name; sys.argv when None.

    Returns:
        int: Exit code.
    """
    args = build_parser().parse_args(argv)
    configure_logging(verbose=args.verbose)
    try:
        config, (records, summary, exit_code) = _dispatch(args)
    except ConfigurationError as error:
        logger.error("%s", error)  # noqa: TRY400
        return error.exit_code
    except AbRieszError as error:
        logger.exception("%s failed", args.command)
        return error.exit_code
    try:
        write_records(records, config.out)
        if config.summary is not None:
            save_summary({**summary, "exit_code": exit_code}, config.summary)
    except OSError:
        return ConfigurationError.exit_code
    non_finite = _non_finite(records)
    if non_finite:
        logger.error("Non-finite values in %s", ", ".join(non_finite))
        return AbRieszError.exit_code
    return exit_code
