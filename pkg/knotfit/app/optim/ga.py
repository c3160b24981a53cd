"""
Genetic-algorithm baseline over knot genomes: tournament selection,
one-point crossover, per-bit flip mutation of the free bits, elitism.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from app.core.errors import DomainError
from app.core.logger import get_logger
from app.models import GaConfig

logger = get_logger(__name__)

GenomeFitness = Callable[[np.ndarray], float]
GenerationObserver = Callable[[int, np.ndarray, np.ndarray], None]


@dataclass
class GaResult:
    best_genome: np.ndarray
    best_fitness: float
    trace: List[float] = field(default_factory=list)
    evaluations: int = 0


def _tournament(scores: np.ndarray, size: int, rng: np.random.Generator) -> int:
    contestants = rng.integers(0, len(scores), size=size)
    return int(contestants[np.argmax(scores[contestants])])


def _crossover(first: np.ndarray, second: np.ndarray, rate: float, rng: np.random.Generator):
    child_a, child_b = first.copy(), second.copy()
    if rng.random() < rate:
        point = int(rng.integers(1, len(first)))
        child_a[point:], child_b[point:] = second[point:], first[point:]
    return child_a, child_b


def _mutate(child: np.ndarray, rate: float, rng: np.random.Generator) -> np.ndarray:
    flips = rng.random(len(child) - 2) < rate
    child[1:-1] ^= flips.astype(np.uint8)
    return child


def _next_generation(
    population: np.ndarray,
    scores: np.ndarray,
    config: GaConfig,
    mutation_rate: float,
    rng: np.random.Generator,
) -> np.ndarray:
    size = len(population)
    order = np.argsort(-scores, kind="stable")
    offspring = [population[i].copy() for i in order[:config.elitism_count]]
    while len(offspring) < size:
        first = population[_tournament(scores, config.tournament_size, rng)]
        second = population[_tournament(scores, config.tournament_size, rng)]
        for child in _crossover(first, second, config.crossover_rate, rng):
            if len(offspring) < size:
                offspring.append(_mutate(child, mutation_rate, rng))
    return np.array(offspring, dtype=np.uint8)


def ga_run(
    fitness: GenomeFitness,
    genome_length: int,
    config: GaConfig,
    observer: Optional[GenerationObserver] = None,
) -> GaResult:
    """
    Maximize `fitness` over bitstrings whose first and last bits stay 0.
    Returns the best-ever genome and the per-generation best-ever trace.
    """
    if genome_length < 3:
        raise DomainError("genomes need at least one free bit between the endpoints")

    rng = np.random.default_rng(config.seed)
    mutation_rate = config.mutation_rate_for(genome_length)
    population = np.zeros((config.population_size, genome_length), dtype=np.uint8)
    population[:, 1:-1] = rng.integers(0, 2, size=(config.population_size, genome_length - 2))

    best_genome, best_fitness = None, -np.inf
    trace: List[float] = []
    pool = ThreadPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        for generation in range(1, config.generations + 1):
            genomes = list(population)
            scored = pool.map(fitness, genomes) if pool is not None else map(fitness, genomes)
            scores = np.fromiter(scored, dtype=float, count=len(genomes))
            if np.any(~np.isfinite(scores)) or np.any(scores < 0):
                raise DomainError("genome fitness must be finite and non-negative")

            leader = int(np.argmax(scores))
            if best_genome is None or scores[leader] > best_fitness:
                best_genome, best_fitness = population[leader].copy(), float(scores[leader])
            trace.append(best_fitness)

            if observer is not None:
                observer(generation, population, scores)
            if generation % 100 == 0:
                logger.debug("ga_generation", generation=generation, best_fitness=best_fitness)
            if generation < config.generations:
                population = _next_generation(population, scores, config, mutation_rate, rng)
    finally:
        if pool is not None:
            pool.shutdown()

    return GaResult(
        best_genome=best_genome,
        best_fitness=best_fitness,
        trace=trace,
        evaluations=config.generations * config.population_size,
    )
