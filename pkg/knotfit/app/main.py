"""
Command line entry point.

    python -m app.main fit --curve spiral --method both --iterations 10,25,50 ...
    python -m app.main generate --curve epitrochoid --out epitrochoid.csv
"""

import argparse
import sys
from typing import List, Optional

from app.core.config import settings
from app.core.errors import DomainError, InputFormatError, KnotFitError
from app.core.logger import configure_logging, get_logger
from app.harness.curves import load_points
from app.harness.experiment import emit_run, run_experiment
from app.harness.io import write_points, write_points_csv
from app.models import (
    AnchorMode,
    CurveKind,
    CurveSpec,
    ExperimentConfig,
    OptimizerMethod,
    OutputPaths,
    ParameterizationMethod,
)

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_INPUT_FORMAT = 3
EXIT_ALL_INFEASIBLE = 4


def _iteration_list(text: str) -> List[int]:
    try:
        values = [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("at least one iteration count is required")
    return values


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _add_curve_arguments(parser: argparse.ArgumentParser, kinds: List[str]) -> None:
    parser.add_argument("--curve", choices=kinds, required=True, help="point source")
    parser.add_argument("--a", type=float, default=None, help="curve parameter a")
    parser.add_argument("--b", type=float, default=None, help="curve parameter b (epitrochoid)")
    parser.add_argument("--h", type=float, default=None, help="curve parameter h (epitrochoid)")
    parser.add_argument("--t-min", type=float, default=None, help="start of the t range")
    parser.add_argument("--t-max", type=float, default=None, help="end of the t range")
    parser.add_argument("--samples", type=int, default=None, help="number of sampled points")
    parser.add_argument("--noise", type=float, default=None,
                        help="std. dev. of Gaussian noise added to generated points (0 for exact samples)")
    parser.add_argument("--noise-seed", type=_seed, default=0, help="seed of the noise draw")
    units = parser.add_mutually_exclusive_group()
    units.add_argument("--degrees", dest="degrees", action="store_true", default=None,
                       help="read the t range in degrees")
    units.add_argument("--radians", dest="degrees", action="store_false",
                       help="read the t range in radians")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="knotfit",
        description="Fit cubic B-spline curves by optimizing knot selection with dolphin echolocation or a GA.",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="log optimizer progress")
    verbosity.add_argument("--quiet", action="store_true", help="log warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    fit = commands.add_parser("fit", help="run an iteration sweep and write tables and plots")
    _add_curve_arguments(fit, [kind.value for kind in CurveKind])
    fit.add_argument("--csv", type=str, default=None, help="point file for --curve csv")
    fit.add_argument("--method", choices=[m.value for m in OptimizerMethod], default=OptimizerMethod.BOTH.value)
    fit.add_argument("--iterations", type=_iteration_list, required=True, help="comma-separated loop counts")
    fit.add_argument("--locations", type=int, default=settings.DEA_LOCATIONS,
                     help="DEA locations; also the GA population unless --population is given")
    fit.add_argument("--population", type=int, default=None, help="GA population size")
    fit.add_argument("--seed", type=_seed, default=settings.SEED, help="master seed")
    fit.add_argument("--pp1", type=float, default=settings.DEA_PP_FIRST, help="DEA first-loop PP")
    fit.add_argument("--power", type=float, default=settings.DEA_POWER, help="DEA convergence curve power")
    fit.add_argument("--re", type=int, default=settings.DEA_EFFECTIVE_RADIUS, help="DEA effective radius")
    fit.add_argument("--anchor", choices=[a.value for a in AnchorMode], default=settings.DEA_ANCHOR,
                     help="location receiving PP: best of the loop or best ever")
    fit.add_argument("--crossover", type=float, default=settings.GA_CROSSOVER_RATE, help="GA crossover rate")
    fit.add_argument("--mutation", type=float, default=settings.GA_MUTATION_RATE,
                     help="GA per-bit mutation rate (default 1/N)")
    fit.add_argument("--param", choices=[m.value for m in ParameterizationMethod],
                     default=settings.PARAMETERIZATION, help="data parameterization")
    fit.add_argument("--degree", type=int, default=settings.DEGREE, help="spline degree")
    fit.add_argument("--repeats", type=int, default=1, help="runs per (iterations, method) cell")
    fit.add_argument("--workers", type=int, default=settings.WORKERS, help="threads for sweep rows")
    fit.add_argument("--out-table", type=str, default=None, help="results table (CSV; JSON alongside)")
    fit.add_argument("--out-svg", type=str, default=None, help="overlay plot")
    fit.add_argument("--out-curve", type=str, default=None, help="best fitted curve as JSON")
    fit.add_argument("--out-trace", type=str, default=None, help="per-loop convergence traces as JSON")

    generate = commands.add_parser("generate", help="write a benchmark curve as CSV without fitting")
    _add_curve_arguments(generate, [kind.value for kind in CurveKind if kind is not CurveKind.CSV])
    generate.add_argument("--out", type=str, default="-", help="output CSV path ('-' for stdout)")
    return parser


def curve_spec_from_args(args: argparse.Namespace) -> CurveSpec:
    parameters = {name: getattr(args, name) for name in ("a", "b", "h") if getattr(args, name) is not None}
    return CurveSpec(
        kind=CurveKind(args.curve),
        parameters=parameters,
        t_min=args.t_min,
        t_max=args.t_max,
        degrees=args.degrees,
        sample_count=args.samples,
        noise_sigma=args.noise,
        noise_seed=args.noise_seed,
        csv_path=getattr(args, "csv", None),
    )


def experiment_config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    dea_config = settings.dea_defaults(
        locations_count=args.locations,
        pp_first=args.pp1,
        power=args.power,
        effective_radius=args.re,
        anchor=args.anchor,
        seed=args.seed,
    )
    ga_config = settings.ga_defaults(
        population_size=args.population or args.locations,
        crossover_rate=args.crossover,
        mutation_rate=args.mutation,
        tournament_size=min(settings.GA_TOURNAMENT_SIZE, args.population or args.locations),
        seed=args.seed,
    )
    return ExperimentConfig(
        curve=curve_spec_from_args(args),
        method=OptimizerMethod(args.method),
        iteration_sweep=args.iterations,
        dea=dea_config,
        ga=ga_config,
        parameterization=ParameterizationMethod(args.param),
        degree=args.degree,
        repeats=args.repeats,
        seed=args.seed,
        workers=args.workers,
        outputs=OutputPaths(
            table=args.out_table,
            svg=args.out_svg,
            curve=args.out_curve,
            trace=args.out_trace,
        ),
    )


def run_fit(args: argparse.Namespace) -> int:
    config = experiment_config_from_args(args)
    run = run_experiment(config)
    emit_run(run)
    if run.all_infeasible:
        logger.error("every_row_infeasible", rows=len(run.outcomes))
        return EXIT_ALL_INFEASIBLE
    best = run.best()
    logger.info(
        "fit_finished",
        method=best.row.method.value,
        iterations=best.row.iterations,
        distance=best.row.euclidean_distance,
        control_points=best.row.control_points,
        cost=best.row.cost,
    )
    return EXIT_OK


def run_generate(args: argparse.Namespace) -> int:
    points = load_points(curve_spec_from_args(args))
    if args.out == "-":
        write_points(sys.stdout, points)
    else:
        write_points_csv(args.out, points)
        logger.info("curve_generated", curve=args.curve, points=len(points), path=args.out)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the command and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    if args.verbose:
        configure_logging("DEBUG")
    elif args.quiet:
        configure_logging("WARNING")

    try:
        if args.command == "fit":
            return run_fit(args)
        return run_generate(args)
    except InputFormatError as exc:
        logger.error("input_format_error", error=str(exc))
        return EXIT_INPUT_FORMAT
    except DomainError as exc:
        logger.error("usage_error", error=str(exc))
        return EXIT_USAGE
    except KnotFitError as exc:
        logger.error("knotfit_error", error=str(exc))
        return EXIT_UNEXPECTED
    except Exception as exc:
        logger.exception("unhandled_exception", error=str(exc))
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
