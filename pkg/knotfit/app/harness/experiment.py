"""
Experiment sweeps: fit one point source with DEA and/or GA for every
iteration count, collect a results table, and write it with the fitted
curves and convergence traces.
"""

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel

from app.core.config import settings
from app.core.logger import get_logger
from app.geometry.bspline import BSplineCurve
from app.geometry.fitting import ParameterAssignment, parameterize
from app.harness.curves import load_points
from app.harness.io import write_curve_json, write_rows_csv, write_text
from app.harness.plots import render_svg
from app.models import DeaConfig, ExperimentConfig, GaConfig, OptimizerMethod, OutputPaths
from app.optim import dea
from app.optim.ga import ga_run
from app.optim.knot_genome import EvaluationRecord, KnotGenome, KnotObjective

logger = get_logger(__name__)

TABLE_COLUMNS = [
    "iterations",
    "method",
    "rmse",
    "euclidean_distance",
    "control_points",
    "cost",
    "fitness",
    "seed",
    "wall_time_ms",
]

METHOD_LABELS = {
    OptimizerMethod.GA: "genetic algorithm",
    OptimizerMethod.DEA: "dolphin echolocation",
}


class ResultRow(BaseModel):
    iterations: int
    method: OptimizerMethod
    repeat: int = 0
    rmse: float
    euclidean_distance: float
    control_points: int
    cost: float
    fitness: float
    seed: int
    wall_time_ms: float
    feasible: bool = True


class CellSummary(BaseModel):
    """Aggregate of the repeats of one (iterations, method) cell."""
    iterations: int
    method: OptimizerMethod
    runs: int
    feasible_runs: int
    mean_distance: Optional[float] = None
    min_distance: Optional[float] = None
    mean_control_points: Optional[float] = None
    min_control_points: Optional[int] = None
    mean_cost: Optional[float] = None
    min_cost: Optional[float] = None


class ResultsTable(BaseModel):
    rows: List[ResultRow] = []

    def summarize(self) -> List[CellSummary]:
        cells: Dict[tuple, List[ResultRow]] = {}
        for row in self.rows:
            cells.setdefault((row.iterations, row.method), []).append(row)
        summaries = []
        for (iterations, method), rows in cells.items():
            good = [row for row in rows if row.feasible]
            summary = CellSummary(iterations=iterations, method=method, runs=len(rows), feasible_runs=len(good))
            if good:
                summary = summary.model_copy(update={
                    "mean_distance": float(np.mean([r.euclidean_distance for r in good])),
                    "min_distance": min(r.euclidean_distance for r in good),
                    "mean_control_points": float(np.mean([r.control_points for r in good])),
                    "min_control_points": min(r.control_points for r in good),
                    "mean_cost": float(np.mean([r.cost for r in good])),
                    "min_cost": min(r.cost for r in good),
                })
            summaries.append(summary)
        return summaries

    def to_json(self) -> str:
        payload = {
            "rows": [row.model_dump(mode="json") for row in self.rows],
            "summary": [cell.model_dump(mode="json") for cell in self.summarize()],
        }
        return json.dumps(payload, indent=2)


@dataclass
class RowOutcome:
    row: ResultRow
    record: EvaluationRecord
    trace: List[float] = field(default_factory=list)
    pp_schedule: List[float] = field(default_factory=list)


@dataclass
class ExperimentRun:
    """Everything one sweep produced."""
    config: ExperimentConfig
    points: np.ndarray
    assignment: ParameterAssignment
    outcomes: List[RowOutcome]

    @property
    def table(self) -> ResultsTable:
        return ResultsTable(rows=[outcome.row for outcome in self.outcomes])

    @property
    def all_infeasible(self) -> bool:
        return not any(outcome.record.feasible for outcome in self.outcomes)

    def best(self, method: Optional[OptimizerMethod] = None) -> Optional[RowOutcome]:
        """Lowest-cost feasible outcome, optionally for one method."""
        candidates = [
            outcome for outcome in self.outcomes
            if outcome.record.feasible and (method is None or outcome.row.method is method)
        ]
        return min(candidates, key=lambda outcome: outcome.record.cost, default=None)

    def best_fits(self) -> Dict[str, BSplineCurve]:
        fits = {}
        for method in self.config.method.expand():
            outcome = self.best(method)
            if outcome is not None:
                fits[METHOD_LABELS[method]] = outcome.record.report.curve
        return fits


def derive_seed(master_seed: int, row_index: int) -> int:
    """Independent 64-bit seed for one sweep row."""
    state = np.random.SeedSequence([master_seed, row_index]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def run_row(
    objective: KnotObjective,
    method: OptimizerMethod,
    iterations: int,
    seed: int,
    config: ExperimentConfig,
    repeat: int = 0,
) -> RowOutcome:
    """Run one optimizer with `iterations` loops/generations and score its best genome."""
    started = time.perf_counter()
    pp_schedule: List[float] = []
    if method is OptimizerMethod.DEA:
        dea_config = DeaConfig(**{**config.dea.model_dump(), "loops_number": iterations, "seed": seed})
        model = dea.AlternativesModel.binary(objective.free_bits)
        result = dea.run(model, objective.fitness_of_free_bits, dea_config)
        genome = KnotGenome.from_free_bits(np.rint(result.best_values))
        trace, pp_schedule = result.trace, result.pp_schedule
    else:
        ga_config = GaConfig(**{**config.ga.model_dump(), "generations": iterations, "seed": seed})
        result = ga_run(objective.fitness, objective.genome_length, ga_config)
        genome = KnotGenome(result.best_genome)
        trace = result.trace
    elapsed_ms = (time.perf_counter() - started) * 1000.0

    record = objective.record(genome)
    if record.feasible:
        report = record.report
        row = ResultRow(
            iterations=iterations,
            method=method,
            repeat=repeat,
            rmse=report.rmse,
            euclidean_distance=report.euclidean_distance,
            control_points=report.control_point_count,
            cost=report.cost,
            fitness=report.fitness,
            seed=seed,
            wall_time_ms=elapsed_ms,
        )
    else:
        logger.warning("experiment_row_infeasible", method=method.value, iterations=iterations, seed=seed)
        row = ResultRow(
            iterations=iterations,
            method=method,
            repeat=repeat,
            rmse=math.inf,
            euclidean_distance=math.inf,
            control_points=record.control_point_count(objective.degree),
            cost=math.inf,
            fitness=0.0,
            seed=seed,
            wall_time_ms=elapsed_ms,
            feasible=False,
        )
    logger.info(
        "experiment_row_done",
        method=method.value,
        iterations=iterations,
        repeat=repeat,
        distance=row.euclidean_distance,
        control_points=row.control_points,
        cost=row.cost,
    )
    return RowOutcome(row=row, record=record, trace=list(trace), pp_schedule=list(pp_schedule))


def run_experiment(config: ExperimentConfig, points: Optional[np.ndarray] = None) -> ExperimentRun:
    """
    Fit the configured point source for every iteration count and method.
    Rows are deterministic given the master seed; with `workers > 1` rows run
    concurrently but are returned in sweep order.
    """
    if points is None:
        points = load_points(config.curve)
    assignment = parameterize(points, config.parameterization)
    objective = KnotObjective(
        points, assignment, config.degree, floor=settings.FIT_FLOOR, cache_size=settings.EVAL_CACHE_SIZE
    )

    tasks = []
    for iterations in config.iteration_sweep:
        for method in config.method.expand():
            for repeat in range(config.repeats):
                tasks.append((method, iterations, derive_seed(config.seed, len(tasks)), repeat))

    logger.info(
        "experiment_started",
        curve=config.curve.kind.value,
        points=len(points),
        rows=len(tasks),
        parameterization=config.parameterization.value,
    )
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(run_row, objective, m, n, s, config, r) for m, n, s, r in tasks]
            outcomes = [future.result() for future in futures]
    else:
        outcomes = [run_row(objective, m, n, s, config, r) for m, n, s, r in tasks]

    logger.info(
        "experiment_finished",
        rows=len(outcomes),
        unique_evaluations=objective.evaluations,
        cache_hits=objective.cache_hits,
        cached_scores=objective.cached_scores,
    )
    return ExperimentRun(config=config, points=np.asarray(points), assignment=assignment, outcomes=outcomes)


def _table_paths(path) -> tuple:
    if path.suffix.lower() == ".json":
        return path.with_suffix(".csv"), path
    return path, path.with_suffix(".json")


def emit_outputs(
    table: ResultsTable,
    fits: Dict[str, BSplineCurve],
    original: np.ndarray,
    paths: OutputPaths,
    best: Optional[RowOutcome] = None,
    traces: Optional[List[RowOutcome]] = None,
) -> None:
    """
    Write the results table (CSV and JSON), the best fitted curve (JSON), an
    SVG of the original points against every fit, and convergence traces.
    Paths left unset are skipped.
    """
    if paths.table is not None:
        csv_path, json_path = _table_paths(paths.table)
        write_rows_csv(csv_path, TABLE_COLUMNS, [
            {**row.model_dump(), "method": row.method.value}
            for row in table.rows
        ])
        write_text(json_path, table.to_json())
        logger.info("table_written", csv=str(csv_path), json=str(json_path), rows=len(table.rows))

    if paths.curve is not None and best is not None:
        write_curve_json(
            paths.curve,
            best.record.report.curve,
            method=best.row.method.value,
            iterations=best.row.iterations,
            seed=best.row.seed,
        )
        logger.info("curve_written", path=str(paths.curve))

    if paths.svg is not None and fits:
        write_text(paths.svg, render_svg(original, fits))
        logger.info("svg_written", path=str(paths.svg), curves=len(fits))

    if paths.trace is not None and traces:
        payload = [
            {
                "iterations": outcome.row.iterations,
                "method": outcome.row.method.value,
                "repeat": outcome.row.repeat,
                "seed": outcome.row.seed,
                "best_fitness": outcome.trace,
                "pp": outcome.pp_schedule,
            }
            for outcome in traces
        ]
        write_text(paths.trace, json.dumps(payload))
        logger.info("trace_written", path=str(paths.trace), rows=len(payload))


def emit_run(run: ExperimentRun, paths: Optional[OutputPaths] = None) -> None:
    """emit_outputs for a finished sweep, using its configured paths by default."""
    emit_outputs(
        run.table,
        run.best_fits(),
        run.points,
        paths or run.config.outputs,
        best=run.best(),
        traces=run.outcomes,
    )
