"""
Settings loader for the estimation toolkit.

Reads config/estimation.yaml, expands ${VAR:-default} references against the
environment (a .env file is honoured), and validates the result into a
Settings model. CLI flags override these values; nothing here is random.
"""

import logging
import os
import re
from functools import lru_cache
from pathlib import Path
from typing import Any, FrozenSet, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).resolve().parents[2] / "config"
DEFAULT_SETTINGS_PATH = CONFIG_DIR / "estimation.yaml"
COUNTRIES_PATH = CONFIG_DIR / "countries.yaml"
REGIONS_DIR = CONFIG_DIR / "regions"

_ENV_PATTERN = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)(?::-([^}]*))?\}")


class FilterSettings(BaseModel):
    ratio_cap: float = Field(default=0.3, gt=0.0, le=1.0)


class SurveySettings(BaseModel):
    a_min: int = Field(default=300, ge=1)
    a_min_country: int = Field(default=30, ge=1)
    z: float = Field(default=1.96, ge=0.0)


class CcfrSettings(BaseModel):
    delay_mean: float = Field(default=13.0, gt=0.0)
    delay_sd: float = Field(default=12.7, gt=0.0)
    delay_horizon: int = Field(default=120, ge=1)
    baseline_deaths: int = Field(default=1023, ge=1)
    baseline_cases: int = Field(default=74130, ge=1)


class SerologySettings(BaseModel):
    raw_prevalence: float = 0.05
    sensitivity: float = 0.79
    specificity: float = 1.0
    population: int = 46_934_628
    cum_deaths_at_lag: int = 26_744
    symptomatic_fraction: float = 0.6627
    scaling_fraction: float = 0.66


class OutputSettings(BaseModel):
    significant_digits: int = Field(default=6, ge=1)


class Settings(BaseModel):
    """Validated view of config/estimation.yaml."""

    filter: FilterSettings = FilterSettings()
    survey: SurveySettings = SurveySettings()
    ccfr: CcfrSettings = CcfrSettings()
    serology: SerologySettings = SerologySettings()
    output: OutputSettings = OutputSettings()


def expand_env(value: Any) -> Any:
    """Recursively substitute ${VAR} and ${VAR:-default} in strings."""
    if isinstance(value, dict):
        return {key: expand_env(item) for key, item in value.items()}
    if isinstance(value, list):
        return [expand_env(item) for item in value]
    if not isinstance(value, str):
        return value

    def _replace(match: re.Match) -> str:
        name, default = match.group(1), match.group(2)
        resolved = os.getenv(name)
        if resolved is None:
            if default is None:
                raise ValueError(f"Environment variable {name} is not set and has no default")
            return default
        return resolved

    return _ENV_PATTERN.sub(_replace, value)


def read_yaml(path: Path) -> dict:
    """Load a YAML mapping with environment interpolation."""
    with open(path, "r", encoding="utf-8") as handle:
        raw = yaml.safe_load(handle) or {}
    if not isinstance(raw, dict):
        raise ValueError(f"Config file {path} must contain a mapping")
    return expand_env(raw)


@lru_cache(maxsize=8)
def load_settings(path: Optional[str] = None) -> Settings:
    """
    Load and validate the estimation settings.

    Args:
        path: Optional config path; defaults to config/estimation.yaml

    Returns:
        Settings model (cached per path)
    """
    load_dotenv()
    config_path = Path(path) if path else DEFAULT_SETTINGS_PATH
    if not config_path.exists():
        logger.warning(f"Config file {config_path} not found, using built-in defaults")
        return Settings()
    settings = Settings.model_validate(read_yaml(config_path))
    logger.debug(f"Loaded settings from {config_path}")
    return settings


@lru_cache(maxsize=1)
def known_countries() -> FrozenSet[str]:
    """ISO-3166 alpha-2 codes accepted by response validation."""
    with open(COUNTRIES_PATH, "r", encoding="utf-8") as handle:
        data = yaml.safe_load(handle)
    return frozenset(str(code).upper() for code in data["countries"])


def shipped_region_table(country: str) -> Path:
    """Path of the bundled region table for a country, if one ships."""
    path = REGIONS_DIR / f"{country.upper()}.csv"
    if not path.exists():
        raise ValueError(f"No bundled region table for {country}; pass --regions")
    return path
