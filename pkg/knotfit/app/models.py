from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.core.errors import ConfigError

MAX_SEED = 2 ** 64


class ParameterizationMethod(str, Enum):
    """Ways of assigning curve parameters to data points."""
    UNIFORM = "uniform"
    CHORD_LENGTH = "chord"
    CENTRIPETAL = "centripetal"


class CurveKind(str, Enum):
    """Point sources the harness can fit."""
    EPITROCHOID = "epitrochoid"
    ARCHIMEDEAN_SPIRAL = "spiral"
    VIVALDI = "vivaldi"
    CSV = "csv"


class OptimizerMethod(str, Enum):
    """Which knot optimizer(s) a sweep runs."""
    DEA = "dea"
    GA = "ga"
    BOTH = "both"

    def expand(self) -> List["OptimizerMethod"]:
        """Concrete methods in table order (baseline first)."""
        if self is OptimizerMethod.BOTH:
            return [OptimizerMethod.GA, OptimizerMethod.DEA]
        return [self]


class AnchorMode(str, Enum):
    """Which location receives the PP probability each loop."""
    LOOP = "loop"
    GLOBAL = "global"


class ConfigModel(BaseModel):
    """Frozen pydantic model whose validation failures surface as ConfigError."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    def __init__(self, **data):
        try:
            super().__init__(**data)
        except ValidationError as exc:
            raise ConfigError(f"invalid {type(self).__name__}: {exc}") from exc


class DeaConfig(ConfigModel):
    """Dolphin echolocation parameters."""
    locations_count: int = Field(20, ge=1)
    loops_number: int = Field(100, ge=1)
    pp_first: float = Field(0.1, gt=0.0, lt=1.0)
    power: float = Field(1.0, gt=0.0)
    effective_radius: int = Field(0, ge=0)
    epsilon: Optional[float] = Field(None, gt=0.0)
    epsilon_scale: float = Field(1e-9, gt=0.0)
    anchor: AnchorMode = AnchorMode.LOOP
    seed: int = Field(0, ge=0, lt=MAX_SEED)
    workers: int = Field(1, ge=1)


class GaConfig(ConfigModel):
    """Genetic algorithm parameters."""
    population_size: int = Field(40, ge=1)
    generations: int = Field(100, ge=1)
    crossover_rate: float = Field(0.9, ge=0.0, le=1.0)
    mutation_rate: Optional[float] = Field(None, ge=0.0, le=1.0)
    tournament_size: int = Field(3, ge=1)
    elitism_count: int = Field(1, ge=0)
    seed: int = Field(0, ge=0, lt=MAX_SEED)
    workers: int = Field(1, ge=1)

    @model_validator(mode="after")
    def check_population_bounds(self) -> "GaConfig":
        if self.elitism_count > self.population_size:
            raise ValueError("elitism_count must not exceed population_size")
        if self.tournament_size > self.population_size:
            raise ValueError("tournament_size must not exceed population_size")
        return self

    def mutation_rate_for(self, genome_length: int) -> float:
        """Per-bit mutation rate, defaulting to 1/genome_length."""
        if self.mutation_rate is not None:
            return self.mutation_rate
        return 1.0 / genome_length


class CurveSpec(ConfigModel):
    """A benchmark curve or a CSV point file to fit."""
    kind: CurveKind
    parameters: Dict[str, float] = Field(default_factory=dict)
    t_min: Optional[float] = None
    t_max: Optional[float] = None
    degrees: Optional[bool] = None  # None: the kind's own unit
    sample_count: Optional[int] = Field(None, ge=2)
    noise_sigma: Optional[float] = Field(None, ge=0.0)  # None: the kind's default
    noise_seed: int = Field(0, ge=0, lt=MAX_SEED)
    csv_path: Optional[Path] = None

    @model_validator(mode="after")
    def check_source(self) -> "CurveSpec":
        if self.t_min is not None and self.t_max is not None and not self.t_min < self.t_max:
            raise ValueError("t_min must be below t_max")
        if self.kind is CurveKind.CSV and self.csv_path is None:
            raise ValueError("csv curves need csv_path")
        if self.kind is CurveKind.CSV and self.noise_sigma:
            raise ValueError("noise applies to generated curves only")
        return self


class OutputPaths(ConfigModel):
    """Where a sweep writes its artifacts; unset paths are skipped."""
    table: Optional[Path] = None
    svg: Optional[Path] = None
    curve: Optional[Path] = None
    trace: Optional[Path] = None


class ExperimentConfig(ConfigModel):
    """One sweep over iteration counts for one point source."""
    curve: CurveSpec
    method: OptimizerMethod = OptimizerMethod.BOTH
    iteration_sweep: List[int] = Field(min_length=1)
    dea: DeaConfig = Field(default_factory=DeaConfig)
    ga: GaConfig = Field(default_factory=GaConfig)
    parameterization: ParameterizationMethod = ParameterizationMethod.CENTRIPETAL
    degree: int = Field(3, ge=1)
    repeats: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, lt=MAX_SEED)
    workers: int = Field(1, ge=1)
    outputs: OutputPaths = Field(default_factory=OutputPaths)

    @model_validator(mode="after")
    def check_sweep(self) -> "ExperimentConfig":
        if any(n < 1 for n in self.iteration_sweep):
            raise ValueError("iteration counts must be positive")
        if any(b <= a for a, b in zip(self.iteration_sweep, self.iteration_sweep[1:])):
            raise ValueError("iteration_sweep must be ascending")
        return self
