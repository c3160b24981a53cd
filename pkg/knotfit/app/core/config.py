from typing import Optional
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables."""

    # Environment
    ENV: str = "development"
    LOG_LEVEL: str = "INFO"

    # Geometry
    DEGREE: int = 3
    PARAMETERIZATION: str = "centripetal"
    FIT_FLOOR: float = 1e-12
    EVAL_CACHE_SIZE: int = 65536

    # Dolphin echolocation
    DEA_LOCATIONS: int = 20
    DEA_PP_FIRST: float = 0.1
    DEA_POWER: float = 1.0
    DEA_EFFECTIVE_RADIUS: int = 0
    DEA_EPSILON_SCALE: float = 1e-9
    DEA_ANCHOR: str = "loop"

    # Genetic algorithm
    GA_POPULATION: int = 40
    GA_CROSSOVER_RATE: float = 0.9
    GA_MUTATION_RATE: Optional[float] = None
    GA_TOURNAMENT_SIZE: int = 3
    GA_ELITISM: int = 1

    # Experiments
    SEED: int = 0
    WORKERS: int = 1

    # Plots
    SVG_SAMPLES: int = 500
    SVG_PANEL_SIZE: int = 480

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="KNOTFIT_",
        case_sensitive=True
    )

    def dea_defaults(self, **overrides):
        """Return a DeaConfig seeded from settings, with overrides applied."""
        from app.models import DeaConfig

        values = {
            "locations_count": self.DEA_LOCATIONS,
            "loops_number": 100,
            "pp_first": self.DEA_PP_FIRST,
            "power": self.DEA_POWER,
            "effective_radius": self.DEA_EFFECTIVE_RADIUS,
            "epsilon_scale": self.DEA_EPSILON_SCALE,
            "anchor": self.DEA_ANCHOR,
            "seed": self.SEED,
            "workers": self.WORKERS,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return DeaConfig(**values)

    def ga_defaults(self, **overrides):
        """Return a GaConfig seeded from settings, with overrides applied."""
        from app.models import GaConfig

        values = {
            "population_size": self.GA_POPULATION,
            "generations": 100,
            "crossover_rate": self.GA_CROSSOVER_RATE,
            "mutation_rate": self.GA_MUTATION_RATE,
            "tournament_size": self.GA_TOURNAMENT_SIZE,
            "elitism_count": self.GA_ELITISM,
            "seed": self.SEED,
            "workers": self.WORKERS,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return GaConfig(**values)


# Global settings instance
settings = Settings()
