"""
Bitstring encoding of knot selections and the fitness f = 1 / (N_cp * D).

Bit i of a genome promotes the parameter of data point i to an interior
knot. The two endpoint bits must stay 0: their parameters are already the
clamped end knots.
"""

import functools
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from app.core.errors import DomainError, InfeasibleFitError
from app.geometry.bspline import ArrayLike, KnotVector, as_points, build_clamped_knot_vector
from app.geometry.fitting import (
    DEFAULT_FIT_FLOOR,
    FitReport,
    ParameterAssignment,
    cost_of,
    fit_report,
)

DEFAULT_CACHE_SIZE = 65536

__all__ = [
    "KnotGenome",
    "EvaluationRecord",
    "KnotObjective",
    "decode",
    "check_feasible",
    "evaluate",
    "cost_of",
]


@dataclass(frozen=True, eq=False)
class KnotGenome:
    """Fixed-length 0/1 selection mask, one bit per data point."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.array(self.bits, dtype=np.int64)
        if bits.ndim != 1 or len(bits) < 2:
            raise DomainError("a genome needs at least two bits")
        if np.any((bits != 0) & (bits != 1)):
            raise DomainError("genome bits must be 0 or 1")
        bits = bits.astype(np.uint8)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_free_bits(cls, free_bits: Sequence[int]) -> "KnotGenome":
        """Wrap the interior bits with the two forced-zero endpoint bits."""
        free = np.asarray(free_bits, dtype=np.int64).ravel()
        return cls(np.concatenate([[0], free, [0]]))

    @classmethod
    def empty(cls, length: int) -> "KnotGenome":
        return cls(np.zeros(length, dtype=np.uint8))

    def __len__(self) -> int:
        return len(self.bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnotGenome):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @property
    def key(self) -> bytes:
        return self.bits.tobytes()

    @property
    def free_bits(self) -> np.ndarray:
        return self.bits[1:-1]

    @property
    def selected(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    @property
    def popcount(self) -> int:
        return int(self.bits.sum())

    def __repr__(self) -> str:
        return f"KnotGenome({''.join(map(str, self.bits.tolist()))})"


@dataclass(frozen=True)
class EvaluationRecord:
    """Outcome of scoring one genome; infeasible genomes get fitness 0, cost inf."""

    genome: KnotGenome
    feasible: bool
    report: Optional[FitReport]
    fitness: float
    cost: float

    @classmethod
    def infeasible(cls, genome: KnotGenome) -> "EvaluationRecord":
        return cls(genome=genome, feasible=False, report=None, fitness=0.0, cost=math.inf)

    def control_point_count(self, degree: int) -> int:
        if self.report is not None:
            return self.report.control_point_count
        return self.genome.popcount + degree + 1


def decode(genome: KnotGenome, assignment: ParameterAssignment, p: int) -> KnotVector:
    """Clamped knot vector whose interior knots are the selected parameters."""
    if len(genome) != len(assignment):
        raise DomainError(f"genome has {len(genome)} bits for {len(assignment)} points")
    if genome.bits[0] or genome.bits[-1]:
        raise DomainError("endpoint bits cannot be selected")
    return build_clamped_knot_vector(assignment.params[genome.selected], p)


def check_feasible(knot_vector: KnotVector, assignment: ParameterAssignment) -> bool:
    """
    True iff no interior knot repeats more than p times and every basis
    support [t_i, t_{i+p+1}) holds at least one data parameter. Supports
    ending at the domain end are closed there.

    Vectors from `decode` always pass: each support starts at a knot that is
    itself a data parameter, so rejections there come from the rank check in
    the least-squares fit. Hand-built vectors can fail either test.
    """
    p = knot_vector.degree
    knots = knot_vector.knots
    interior = knot_vector.interior
    if len(interior):
        _, multiplicity = np.unique(interior, return_counts=True)
        if multiplicity.max() > p:
            return False

    params = assignment.params
    n = knot_vector.control_point_count
    lower = knots[:n]
    upper = knots[p + 1:p + 1 + n]
    first = np.searchsorted(params, lower, side="left")
    past = np.where(
        upper == knots[-1],
        np.searchsorted(params, upper, side="right"),
        np.searchsorted(params, upper, side="left"),
    )
    return bool(np.all(past > first))


def evaluate(
    genome: KnotGenome,
    points: ArrayLike,
    assignment: ParameterAssignment,
    p: int,
    floor: float = DEFAULT_FIT_FLOOR,
) -> EvaluationRecord:
    """Decode, check, fit and score a genome; every failure yields the infeasible record."""
    try:
        knot_vector = decode(genome, assignment, p)
        if not check_feasible(knot_vector, assignment):
            return EvaluationRecord.infeasible(genome)
        report = fit_report(points, assignment, knot_vector, floor)
    except (DomainError, InfeasibleFitError):
        return EvaluationRecord.infeasible(genome)
    return EvaluationRecord(
        genome=genome,
        feasible=True,
        report=report,
        fitness=report.fitness,
        cost=report.cost,
    )


class KnotObjective:
    """
    The knot-selection problem for one dataset.

    Scores (fitness, cost) are memoized per genome in a bounded LRU cache;
    full records with the fitted curve are rebuilt on request. Safe to call
    from several threads: evaluation is pure and the cache locks internally.
    """

    def __init__(
        self,
        points: ArrayLike,
        assignment: ParameterAssignment,
        degree: int = 3,
        floor: float = DEFAULT_FIT_FLOOR,
        cache_size: int = DEFAULT_CACHE_SIZE,
    ):
        self.points = as_points(points)
        if len(self.points) != len(assignment):
            raise DomainError(f"{len(self.points)} points but {len(assignment)} parameters")
        if len(self.points) < 3:
            raise DomainError("knot selection needs at least three points")
        if cache_size < 1:
            raise DomainError("cache_size must be positive")
        self.assignment = assignment
        self.degree = degree
        self.floor = floor
        self._scores = functools.lru_cache(maxsize=cache_size)(self._score_key)

    @property
    def genome_length(self) -> int:
        return len(self.points)

    @property
    def free_bits(self) -> int:
        return self.genome_length - 2

    @property
    def evaluations(self) -> int:
        return self._scores.cache_info().misses

    @property
    def cache_hits(self) -> int:
        return self._scores.cache_info().hits

    @property
    def cached_scores(self) -> int:
        return self._scores.cache_info().currsize

    def _score_key(self, key: bytes) -> Tuple[float, float]:
        genome = KnotGenome(np.frombuffer(key, dtype=np.uint8))
        record = evaluate(genome, self.points, self.assignment, self.degree, self.floor)
        return record.fitness, record.cost

    def record(self, genome: Union[KnotGenome, ArrayLike]) -> EvaluationRecord:
        """Full evaluation, fitted curve included; not cached."""
        if not isinstance(genome, KnotGenome):
            genome = KnotGenome(genome)
        return evaluate(genome, self.points, self.assignment, self.degree, self.floor)

    def score(self, genome: Union[KnotGenome, ArrayLike]) -> Tuple[float, float]:
        if not isinstance(genome, KnotGenome):
            genome = KnotGenome(genome)
        return self._scores(genome.key)

    def fitness(self, genome: Union[KnotGenome, ArrayLike]) -> float:
        """Fitness of a full-length genome (GA callback)."""
        return self.score(genome)[0]

    def cost(self, genome: Union[KnotGenome, ArrayLike]) -> float:
        return self.score(genome)[1]

    def fitness_of_free_bits(self, values: Sequence[float]) -> float:
        """Fitness of the interior bits only (DEA callback over binary alternatives)."""
        return self.fitness(KnotGenome.from_free_bits(np.rint(values)))
