"""
Scenario files for the simulator.

A scenario is a YAML mapping (with ${VAR:-default} interpolation, like every
other config file) naming the country, its regions with population,
prevalence and optional sampling bias, the reach model, overlap and seed.
"""

import logging
from datetime import date
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, ValidationError

from src.models.domain import CountryInfo, RegionInfo
from src.simulation.world import RespondentModel, SyntheticWorld
from src.utils.settings import read_yaml

logger = logging.getLogger(__name__)


class ScenarioRegion(BaseModel):
    region: str
    population: int = Field(ge=1)
    prevalence: float = Field(ge=0.0, le=1.0)
    bias: Optional[float] = Field(default=None, ge=0.0)


class ReachConfig(BaseModel):
    mean: float = Field(default=100.0, gt=0.0)
    sigma: float = Field(default=0.3, ge=0.0)


class Scenario(BaseModel):
    """Validated scenario file."""

    country: str
    population: Optional[int] = Field(default=None, ge=1)
    regions: List[ScenarioRegion]
    reach: ReachConfig = ReachConfig()
    overlap_factor: float = Field(default=0.0, ge=0.0, lt=1.0)
    pool_size: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)
    n_responses: int = Field(default=300, ge=1)
    survey_date: date = date(2020, 4, 15)

    def country_info(self) -> CountryInfo:
        code = self.country.upper()
        regions = tuple(RegionInfo(region=r.region, country=code, population=r.population) for r in self.regions)
        population = self.population or sum(r.population for r in self.regions)
        return CountryInfo(country=code, population=population, regions=regions)

    def world(self, seed: Optional[int] = None) -> SyntheticWorld:
        return SyntheticWorld(
            country=self.country_info(),
            true_prevalence={r.region: r.prevalence for r in self.regions},
            rng_seed=self.seed if seed is None else seed,
        )

    def respondent_model(self) -> RespondentModel:
        """Population-proportional sampling unless any region sets a bias weight."""
        bias = None
        if any(r.bias is not None for r in self.regions):
            bias = {r.region: r.population * (1.0 if r.bias is None else r.bias) for r in self.regions}
        return RespondentModel(
            reach_mean=self.reach.mean,
            reach_sigma=self.reach.sigma,
            region_bias=bias,
            overlap_factor=self.overlap_factor,
            pool_size=self.pool_size,
        )

    def unbiased_model(self) -> RespondentModel:
        return self.respondent_model().model_copy(update={"region_bias": None})


def load_scenario(path: str) -> Scenario:
    """
    Load and validate a scenario file.

    Raises:
        ValueError: unreadable file or invalid scenario
    """
    scenario_path = Path(path)
    if not scenario_path.exists():
        raise ValueError(f"Scenario file not found: {path}")
    try:
        scenario = Scenario.model_validate(read_yaml(scenario_path))
    except ValidationError as e:
        raise ValueError(f"Invalid scenario {path}: {e.errors()[0]['loc']} {e.errors()[0]['msg']}")
    logger.info(f"Loaded scenario {path}: {scenario.country}, {len(scenario.regions)} regions, seed {scenario.seed}")
    return scenario
