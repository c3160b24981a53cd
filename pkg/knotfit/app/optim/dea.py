"""
Discrete dolphin echolocation over per-variable sorted alternative lists.

A location is a vector of alternative indices, one per variable. Each loop
the engine scores every location, spreads the scores as cumulative fitness
(AF) over neighbouring alternatives within the effective radius, reserves
the convergence probability PP for the anchor location's alternatives and
shares the rest by AF, then draws the next locations.

All state transitions and random draws happen on the calling thread; only
fitness evaluation may be handed to a thread pool.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from app.core.errors import ConfigError, DomainError
from app.core.logger import get_logger
from app.models import AnchorMode, DeaConfig

logger = get_logger(__name__)

FitnessCallback = Callable[[Tuple[float, ...]], float]
LoopObserver = Callable[[int, "DeaState", np.ndarray], None]


@dataclass(frozen=True)
class AlternativesModel:
    """Sorted, distinct alternatives A_j for every variable j."""

    alternatives: Tuple[Tuple[float, ...], ...]

    def __post_init__(self):
        if not self.alternatives:
            raise DomainError("at least one variable is required")
        normalized = []
        for j, column in enumerate(self.alternatives):
            column = tuple(float(a) for a in column)
            if not column:
                raise DomainError(f"variable {j} has no alternatives")
            steps = np.diff(column)
            if len(steps) and not (np.all(steps > 0) or np.all(steps < 0)):
                raise DomainError(f"alternatives of variable {j} must be distinct and sorted")
            normalized.append(column)
        object.__setattr__(self, "alternatives", tuple(normalized))

    @classmethod
    def binary(cls, variables_count: int) -> "AlternativesModel":
        """[0, 1] for every variable: the knot-selection search space."""
        return cls(tuple((0.0, 1.0) for _ in range(variables_count)))

    @property
    def variables_count(self) -> int:
        return len(self.alternatives)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([len(column) for column in self.alternatives], dtype=np.int64)

    def values(self, location: Sequence[int]) -> Tuple[float, ...]:
        """Alternative values selected by an index vector."""
        return tuple(column[int(index)] for column, index in zip(self.alternatives, location))


@dataclass(frozen=True, eq=False)
class DeaState:
    """Locations, cumulative fitness and best-location bookkeeping of one loop."""

    locations: np.ndarray  # (N_L, N_V) alternative indices
    lengths: np.ndarray  # LA_j
    accumulated_fitness: np.ndarray  # (N_V, max LA_j), zero beyond LA_j
    loop_index: int = 0
    loop_best_location: Optional[np.ndarray] = None
    loop_best_fitness: float = 0.0
    best_location: Optional[np.ndarray] = None
    best_fitness: float = -np.inf

    @classmethod
    def initial(cls, model: AlternativesModel, locations: np.ndarray) -> "DeaState":
        lengths = model.lengths
        return cls(
            locations=locations,
            lengths=lengths,
            accumulated_fitness=np.zeros((len(lengths), int(lengths.max()))),
        )

    def anchor(self, mode: AnchorMode) -> np.ndarray:
        """Location whose alternatives receive PP this loop."""
        if mode is AnchorMode.GLOBAL and self.best_location is not None:
            return self.best_location
        return self.loop_best_location


@dataclass
class DeaResult:
    best_location: np.ndarray
    best_values: Tuple[float, ...]
    best_fitness: float
    trace: List[float] = field(default_factory=list)
    pp_schedule: List[float] = field(default_factory=list)
    evaluations: int = 0


def convergence_pp(loop_index: int, config: DeaConfig) -> float:
    """PP(loop) = PP_1 + (1 - PP_1) (loop^Power - 1) / (LoopsNumber^Power - 1)."""
    loops = config.loops_number
    if not 1 <= loop_index <= loops:
        raise DomainError(f"loop index {loop_index} outside [1, {loops}]")
    if loops == 1:
        return 1.0
    if loop_index == loops:
        return 1.0
    ratio = (loop_index ** config.power - 1.0) / (loops ** config.power - 1.0)
    return config.pp_first + (1.0 - config.pp_first) * ratio


def reflect_indices(indices: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Mirror out-of-range indices at the array edges: -m -> m-1, LA-1+m -> LA-m."""
    period = 2 * lengths
    folded = np.mod(indices, period)
    return np.where(folded >= lengths, period - 1 - folded, folded)


def accumulate_fitness(state: DeaState, location_fitnesses: Sequence[float], config: DeaConfig) -> DeaState:
    """
    Reset AF and spread each location's fitness over alternatives A+k,
    k in [-Re, Re], with triangular weights (Re + 1 - |k|) / (Re + 1).
    Also records the loop's best location and the best-ever location.
    """
    fitness = np.asarray(location_fitnesses, dtype=float)
    locations = state.locations
    if fitness.shape != (len(locations),):
        raise DomainError(f"expected {len(locations)} fitness values, got {fitness.shape}")
    if np.any(~np.isfinite(fitness)) or np.any(fitness < 0):
        raise DomainError("location fitness must be finite and non-negative")

    radius = config.effective_radius
    accumulated = np.zeros_like(state.accumulated_fitness)
    variables = np.broadcast_to(np.arange(locations.shape[1]), locations.shape)
    for k in range(-radius, radius + 1):
        weight = (radius + 1 - abs(k)) / (radius + 1)
        targets = reflect_indices(locations + k, state.lengths[None, :])
        np.add.at(accumulated, (variables, targets), weight * fitness[:, None])

    leader = int(np.argmax(fitness))
    loop_best = locations[leader].copy()
    best_location, best_fitness = state.best_location, state.best_fitness
    if best_location is None or fitness[leader] > best_fitness:
        best_location, best_fitness = loop_best, float(fitness[leader])

    return replace(
        state,
        accumulated_fitness=accumulated,
        loop_best_location=loop_best,
        loop_best_fitness=float(fitness[leader]),
        best_location=best_location,
        best_fitness=best_fitness,
    )


def _epsilon(state: DeaState, config: DeaConfig) -> float:
    if config.epsilon is not None:
        return config.epsilon
    if state.loop_best_fitness > 0:
        return config.epsilon_scale * state.loop_best_fitness
    # all-zero AF: any positive value yields the same uniform share
    return 1.0


def finalize_probabilities(state: DeaState, pp: float, config: DeaConfig) -> np.ndarray:
    """
    Per-variable probabilities (N_V, max LA_j): add epsilon to AF, zero the
    anchor alternatives, give them PP and share 1 - PP by AF among the rest.
    """
    if not 0.0 <= pp <= 1.0:
        raise DomainError(f"PP must lie in [0, 1], got {pp}")
    anchor = state.anchor(config.anchor)
    if anchor is None:
        raise DomainError("accumulate_fitness must run before finalize_probabilities")

    n_variables, width = state.accumulated_fitness.shape
    valid = np.arange(width)[None, :] < state.lengths[:, None]
    rows = np.arange(n_variables)

    weights = np.where(valid, state.accumulated_fitness + _epsilon(state, config), 0.0)
    weights[rows, anchor] = 0.0
    totals = weights.sum(axis=1)

    probabilities = np.zeros_like(weights)
    shared = totals > 0
    probabilities[shared] = (1.0 - pp) * weights[shared] / totals[shared, None]
    probabilities[rows, anchor] = np.where(shared, pp, 1.0)
    return probabilities


def sample_locations(probabilities: np.ndarray, config: DeaConfig, rng: np.random.Generator) -> np.ndarray:
    """
    Draw N_L locations from the per-variable categorical distributions.
    Uniforms are consumed location-major, variable-minor.
    """
    probabilities = np.asarray(probabilities, dtype=float)
    cdf = np.cumsum(probabilities, axis=1)
    draws = rng.random((config.locations_count, probabilities.shape[0]))
    picks = (draws[:, :, None] >= cdf[None, :, :]).sum(axis=2)
    # rounding can leave the last cdf entry just under 1
    last_positive = probabilities.shape[1] - 1 - np.argmax(probabilities[:, ::-1] > 0, axis=1)
    return np.minimum(picks, last_positive[None, :])


def _uniform_probabilities(lengths: np.ndarray) -> np.ndarray:
    width = int(lengths.max())
    valid = np.arange(width)[None, :] < lengths[:, None]
    return valid / lengths[:, None].astype(float)


def _score(model: AlternativesModel, fitness: FitnessCallback, locations: np.ndarray, pool) -> np.ndarray:
    candidates = [model.values(location) for location in locations]
    scores = pool.map(fitness, candidates) if pool is not None else map(fitness, candidates)
    return np.fromiter(scores, dtype=float, count=len(candidates))


def run(
    model: AlternativesModel,
    fitness: FitnessCallback,
    config: DeaConfig,
    observer: Optional[LoopObserver] = None,
) -> DeaResult:
    """
    Maximize `fitness` over the alternatives model.

    Returns the best-ever location with a per-loop trace of the best-ever
    fitness. `observer(loop, state, probabilities)` is called after each
    probability update, for inspection only.
    """
    lengths = model.lengths
    if config.effective_radius > int(lengths.max()) // 4:
        raise ConfigError(
            f"effective radius {config.effective_radius} exceeds a quarter of the largest "
            f"alternative list ({int(lengths.max())})"
        )

    rng = np.random.default_rng(config.seed)
    locations = sample_locations(_uniform_probabilities(lengths), config, rng)
    state = DeaState.initial(model, locations)
    result_trace: List[float] = []
    pp_schedule: List[float] = []

    logger.debug(
        "dea_started",
        variables=model.variables_count,
        locations=config.locations_count,
        loops=config.loops_number,
    )
    pool = ThreadPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        for loop in range(1, config.loops_number + 1):
            pp = convergence_pp(loop, config)
            scores = _score(model, fitness, locations, pool)
            state = accumulate_fitness(replace(state, locations=locations, loop_index=loop), scores, config)
            result_trace.append(state.best_fitness)
            pp_schedule.append(pp)

            probabilities = finalize_probabilities(state, pp, config)
            if observer is not None:
                observer(loop, state, probabilities)
            if loop % 100 == 0:
                logger.debug("dea_loop", loop=loop, pp=round(pp, 4), best_fitness=state.best_fitness)
            if loop < config.loops_number:
                locations = sample_locations(probabilities, config, rng)
    finally:
        if pool is not None:
            pool.shutdown()

    return DeaResult(
        best_location=state.best_location,
        best_values=model.values(state.best_location),
        best_fitness=state.best_fitness,
        trace=result_trace,
        pp_schedule=pp_schedule,
        evaluations=config.loops_number * config.locations_count,
    )
