"""
Synthetic worlds and indirect-survey respondents.

A SyntheticWorld fixes per-region true prevalence and a seed; a
RespondentModel decides where respondents report from, how many people they
know, and how much their contacts overlap. All randomness comes from numpy
Generators derived from the world seed, so identical inputs give identical
responses.
"""

import logging
import math
from datetime import date
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.domain import CountryInfo, SurveyResponse

logger = logging.getLogger(__name__)


class SyntheticWorld(BaseModel):
    """Ground truth: a country, per-region prevalence and the seed."""

    model_config = ConfigDict(frozen=True)

    country: CountryInfo
    true_prevalence: Dict[str, float]
    rng_seed: int = Field(ge=0, lt=2 ** 64)

    @model_validator(mode="after")
    def _check_prevalence(self) -> "SyntheticWorld":
        for region, value in self.true_prevalence.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"prevalence of {region} outside [0, 1]")
            if not self.country.has_region(region):
                raise ValueError(f"prevalence given for unknown region {region}")
        missing = [info.region for info in self.country.regions if info.region not in self.true_prevalence]
        if missing:
            raise ValueError(f"no prevalence for regions {missing}")
        return self

    def weighted_truth(self) -> float:
        """Population-weighted prevalence over the region table."""
        total = sum(info.population for info in self.country.regions)
        return math.fsum(info.population * self.true_prevalence[info.region] for info in self.country.regions) / total


class RespondentModel(BaseModel):
    """
    How respondents are sampled.

    region_bias None means sampling proportional to region population (an
    unbiased survey). Reach is lognormal with the given mean, truncated at 1.
    With overlap_factor > 0 each contact comes, with that probability, from a
    finite per-region pool shared by every respondent.
    """

    model_config = ConfigDict(frozen=True)

    reach_mean: float = Field(default=100.0, gt=0.0)
    reach_sigma: float = Field(default=0.3, ge=0.0)
    region_bias: Optional[Dict[str, float]] = None
    overlap_factor: float = Field(default=0.0, ge=0.0, lt=1.0)
    pool_size: int = Field(default=1000, ge=1)

    @model_validator(mode="after")
    def _check_bias(self) -> "RespondentModel":
        if self.region_bias is not None:
            if any(weight < 0 for weight in self.region_bias.values()):
                raise ValueError("region_bias weights must be non-negative")
            if not any(weight > 0 for weight in self.region_bias.values()):
                raise ValueError("region_bias weights are all zero")
        return self

    def region_weights(self, country: CountryInfo) -> np.ndarray:
        if self.region_bias is None:
            weights = np.array([info.population for info in country.regions], dtype=float)
        else:
            weights = np.array([self.region_bias.get(info.region, 0.0) for info in country.regions], dtype=float)
        if weights.sum() <= 0:
            raise ValueError("region_bias gives zero weight to every region of the country")
        return weights / weights.sum()


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial; depends only on (seed, trial), not on run order."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def _draw_reach(model: RespondentModel, rng: np.random.Generator, n: int) -> np.ndarray:
    mu = math.log(model.reach_mean) - model.reach_sigma ** 2 / 2.0
    reach = np.rint(rng.lognormal(mean=mu, sigma=model.reach_sigma, size=n)).astype(np.int64)
    return np.maximum(reach, 1)


def simulate_responses(
    world: SyntheticWorld,
    model: RespondentModel,
    n: int,
    on_date: date,
    rng: Optional[np.random.Generator] = None,
) -> List[SurveyResponse]:
    """
    Draw n synthetic responses.

    Args:
        world: Ground truth and seed
        model: Respondent behaviour
        n: Number of responses
        on_date: Date stamped on every response
        rng: Generator to use instead of one seeded from world.rng_seed
    """
    if n < 1:
        raise ValueError(f"simulate_responses needs n >= 1, got {n}")
    rng = rng if rng is not None else np.random.default_rng(world.rng_seed)
    regions = [info.region for info in world.country.regions]
    prevalence = np.array([world.true_prevalence[region] for region in regions])

    region_index = rng.choice(len(regions), size=n, p=model.region_weights(world.country))
    reach = _draw_reach(model, rng, n)

    if model.overlap_factor == 0.0:
        counts = rng.binomial(reach, prevalence[region_index])
    else:
        # shared contact pools: one infection status per pool member
        pools = [rng.random(model.pool_size) < p for p in prevalence]
        counts = np.empty(n, dtype=np.int64)
        for j in range(n):
            pool = pools[region_index[j]]
            shared = min(int(rng.binomial(reach[j], model.overlap_factor)), model.pool_size)
            members = rng.choice(model.pool_size, size=shared, replace=False)
            fresh = rng.binomial(reach[j] - shared, prevalence[region_index[j]])
            counts[j] = int(pool[members].sum()) + fresh

    context = {"countries": frozenset({world.country.country})}
    return [
        SurveyResponse.model_validate(
            {
                "date": on_date,
                "country": world.country.country,
                "region": regions[region_index[j]],
                "reach": int(reach[j]),
                "count": int(counts[j]),
            },
            context=context,
        )
        for j in range(n)
    ]
