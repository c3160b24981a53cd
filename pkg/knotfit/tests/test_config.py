import pytest

from app.core.config import Settings
from app.core.errors import ConfigError
from app.models import AnchorMode


def test_defaults():
    """Built-in settings match the documented defaults."""
    settings = Settings(_env_file=None)
    assert settings.DEGREE == 3
    assert settings.PARAMETERIZATION == "centripetal"
    assert settings.DEA_LOCATIONS == 20
    assert settings.DEA_PP_FIRST == 0.1
    assert settings.DEA_EFFECTIVE_RADIUS == 0


def test_environment_override(monkeypatch):
    """KNOTFIT_ prefixed variables override settings."""
    monkeypatch.setenv("KNOTFIT_DEA_LOCATIONS", "7")
    monkeypatch.setenv("KNOTFIT_DEA_ANCHOR", "global")
    settings = Settings(_env_file=None)
    assert settings.DEA_LOCATIONS == 7
    config = settings.dea_defaults(loops_number=12)
    assert config.locations_count == 7
    assert config.loops_number == 12
    assert config.anchor is AnchorMode.GLOBAL


def test_defaults_ignore_none_overrides():
    """None overrides keep the configured value."""
    config = Settings(_env_file=None).ga_defaults(mutation_rate=None, population_size=None, generations=9)
    assert config.population_size == 40
    assert config.mutation_rate is None
    assert config.generations == 9


def test_invalid_override_raises_config_error():
    """Out-of-range values surface as ConfigError."""
    with pytest.raises(ConfigError):
        Settings(_env_file=None).dea_defaults(locations_count=0)
