"""
Concrete survey estimators registered with the EstimatorFactory.
"""

import logging
from typing import Dict, List, Sequence

from src.estimators.base import BaseEstimator, EstimatorFactory
from src.estimators.survey import (
    DEFAULT_A_MIN,
    DEFAULT_A_MIN_COUNTRY,
    Z_95,
    rolling_country_series,
    rolling_region_series,
)
from src.models.domain import CountryInfo, EstimateResult, SurveyResponse

logger = logging.getLogger(__name__)


class RegionStratifiedEstimator(BaseEstimator):
    """Rolling post-stratified estimator; needs the country's region table."""

    name = "region"

    def __init__(self, country: CountryInfo, a_min: int = DEFAULT_A_MIN, z: float = Z_95):
        if country is None:
            raise ValueError("region estimation needs a region table")
        self.country = country
        self.a_min = a_min
        self.z = z

    def estimate_series(self, responses: Sequence[SurveyResponse]) -> List[EstimateResult]:
        return rolling_region_series(responses, self.country, a_min=self.a_min, z=self.z)

    @property
    def parameters(self) -> Dict[str, object]:
        return {"method": self.name, "a_min": self.a_min, "z": self.z, "country": self.country.country}


class CountryPooledEstimator(BaseEstimator):
    """Pooled ratio-of-sums over disjoint forward blocks."""

    name = "country"

    def __init__(self, a_min: int = DEFAULT_A_MIN_COUNTRY, z: float = Z_95, country: CountryInfo = None):
        self.a_min = a_min
        self.z = z

    def estimate_series(self, responses: Sequence[SurveyResponse]) -> List[EstimateResult]:
        return rolling_country_series(responses, a_min=self.a_min, z=self.z)

    @property
    def parameters(self) -> Dict[str, object]:
        return {"method": self.name, "a_min_country": self.a_min, "z": self.z}


EstimatorFactory.register("region", RegionStratifiedEstimator)
EstimatorFactory.register("country", CountryPooledEstimator)
