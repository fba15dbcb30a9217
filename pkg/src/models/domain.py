"""
Domain types shared by every module of the toolkit.

Survey inputs and official series are pydantic value objects (validated on
construction, frozen afterwards). Estimator outputs are frozen dataclasses,
mirroring the result structures used by the rest of the package.
No I/O and no statistics live here.
"""

import logging
import math
from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum
from typing import Any, Dict, FrozenSet, Optional, Tuple, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    ValidationError,
    ValidationInfo,
    computed_field,
    field_validator,
    model_validator,
)

logger = logging.getLogger(__name__)

DATE_FORMAT = "%Y-%m-%d"


def parse_iso_date(value: Any) -> date:
    """Parse a YYYY-MM-DD string (or pass a date through)."""
    if isinstance(value, datetime):
        return value.date()
    if isinstance(value, date):
        return value
    try:
        return datetime.strptime(str(value).strip(), DATE_FORMAT).date()
    except ValueError:
        raise ValueError("unparseable date")


def _parse_count(value: Any, name: str) -> int:
    if isinstance(value, bool):
        raise ValueError(f"non-integer {name}")
    if isinstance(value, int):
        parsed = value
    elif isinstance(value, float) and value.is_integer():
        parsed = int(value)
    else:
        try:
            parsed = int(str(value).strip())
        except ValueError:
            raise ValueError(f"non-integer {name}")
    if parsed < 0:
        raise ValueError(f"negative {name}")
    return parsed


class EstimationMethod(str, Enum):
    """Provenance tag carried by every EstimateResult."""

    REGION_STRATIFIED = "region-stratified"
    COUNTRY_POOLED = "country-pooled"
    CCFR = "ccfr"


class SurveyResponse(BaseModel):
    """One participant's indirect report about a geographic area."""

    model_config = ConfigDict(frozen=True)

    date: date
    country: str
    region: Optional[str] = None
    reach: int
    count: int

    @field_validator("date", mode="before")
    @classmethod
    def _check_date(cls, value: Any) -> date:
        return parse_iso_date(value)

    @field_validator("country", mode="before")
    @classmethod
    def _check_country(cls, value: Any, info: ValidationInfo) -> str:
        code = str(value).strip().upper()
        countries = (info.context or {}).get("countries")
        if countries is None:
            from src.utils.settings import known_countries

            countries = known_countries()
        if code not in countries:
            raise ValueError("unknown country code")
        return code

    @field_validator("region", mode="before")
    @classmethod
    def _blank_region(cls, value: Any) -> Optional[str]:
        if value is None:
            return None
        text = str(value).strip()
        return text or None

    @field_validator("reach", mode="before")
    @classmethod
    def _check_reach(cls, value: Any) -> int:
        reach = _parse_count(value, "reach")
        if reach == 0:
            raise ValueError("zero reach")
        return reach

    @field_validator("count", mode="before")
    @classmethod
    def _check_count(cls, value: Any) -> int:
        return _parse_count(value, "count")

    @model_validator(mode="after")
    def _count_within_reach(self) -> "SurveyResponse":
        if self.count > self.reach:
            raise ValueError("count exceeds reach")
        return self

    @property
    def ratio(self) -> float:
        return self.count / self.reach

    @property
    def is_country_wide(self) -> bool:
        return self.region is None


@dataclass(frozen=True)
class Rejection:
    """Structured reason a candidate record did not become a SurveyResponse."""

    reason: str
    field: Optional[str] = None


def validate_response(
    raw: Dict[str, Any],
    countries: Optional[FrozenSet[str]] = None,
) -> Union[SurveyResponse, Rejection]:
    """
    Validate a candidate response record.

    Args:
        raw: Mapping with date, country, region, reach, count
        countries: Accepted country codes; defaults to the ISO registry

    Returns:
        SurveyResponse, or Rejection naming the first violated invariant
    """
    context = {"countries": countries} if countries is not None else None
    try:
        return SurveyResponse.model_validate(raw, context=context)
    except ValidationError as e:
        error = e.errors()[0]
        ctx_error = (error.get("ctx") or {}).get("error")
        reason = str(ctx_error) if ctx_error is not None else error["msg"]
        location = error.get("loc") or ()
        return Rejection(reason=reason, field=str(location[0]) if location else None)


class RegionInfo(BaseModel):
    """A region (stratum) and its population N_i."""

    model_config = ConfigDict(frozen=True)

    region: str
    country: str
    population: int

    @field_validator("population")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("region population must be positive")
        return value


class CountryInfo(BaseModel):
    """A country's national population N and its region table."""

    model_config = ConfigDict(frozen=True)

    country: str
    population: int
    regions: Tuple[RegionInfo, ...] = ()

    @field_validator("population")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("national population must be positive")
        return value

    @model_validator(mode="after")
    def _consistent_regions(self) -> "CountryInfo":
        codes = [info.region for info in self.regions]
        if len(codes) != len(set(codes)):
            raise ValueError(f"duplicate region codes in {self.country}")
        if any(info.country != self.country for info in self.regions):
            raise ValueError(f"region table mixes countries with {self.country}")
        if sum(info.population for info in self.regions) > self.population:
            raise ValueError(f"region populations exceed the national population of {self.country}")
        return self

    def population_of(self, region: str) -> int:
        for info in self.regions:
            if info.region == region:
                return info.population
        raise KeyError(region)

    def has_region(self, region: Optional[str]) -> bool:
        return region is not None and any(info.region == region for info in self.regions)


class OfficialSeriesPoint(BaseModel):
    """Official daily new cases and deaths for one country."""

    model_config = ConfigDict(frozen=True)

    date: date
    new_cases: int
    new_deaths: int

    @field_validator("date", mode="before")
    @classmethod
    def _check_date(cls, value: Any) -> date:
        return parse_iso_date(value)

    @field_validator("new_cases", mode="before")
    @classmethod
    def _check_cases(cls, value: Any) -> int:
        return _parse_count(value, "new_cases")

    @field_validator("new_deaths", mode="before")
    @classmethod
    def _check_deaths(cls, value: Any) -> int:
        return _parse_count(value, "new_deaths")


class Baseline(BaseModel):
    """Reference deaths/cases pair defining the baseline cCFR."""

    model_config = ConfigDict(frozen=True)

    deaths_b: int = 1023
    cases_b: int = 74130

    @model_validator(mode="after")
    def _positive(self) -> "Baseline":
        if self.deaths_b < 1 or self.cases_b < 1:
            raise ValueError("baseline deaths and cases must be positive")
        return self

    @computed_field
    @property
    def cfr_b(self) -> float:
        return self.deaths_b / self.cases_b


@dataclass(frozen=True)
class EstimateResult:
    """
    A point estimate with its 95% CI and provenance.

    Survey estimators store fractions of the population; callers convert to
    absolute counts by multiplying with the population.
    """

    date: date
    point: float
    ci_low: float
    ci_high: float
    n_responses: int
    total_reach: int
    method: EstimationMethod

    def __post_init__(self):
        if self.ci_low < 0:
            raise ValueError(f"ci_low must be clamped at 0, got {self.ci_low}")
        # 1e-12 absorbs rounding in clamped bounds
        if not (self.ci_low - 1e-12 <= self.point <= self.ci_high + 1e-12):
            raise ValueError(
                f"CI ordering violated: {self.ci_low} <= {self.point} <= {self.ci_high}"
            )


@dataclass(frozen=True)
class DelayModel:
    """Discretized confirmation-to-death delay distribution."""

    mean_days: float
    sd_days: float
    max_horizon: int
    pmf: Tuple[float, ...] = field(repr=False)

    def __post_init__(self):
        if self.mean_days <= 0 or self.sd_days <= 0 or self.max_horizon < 1:
            raise ValueError("delay parameters must be positive")
        if any(p < 0 for p in self.pmf):
            raise ValueError("delay pmf has negative entries")
        if not math.isclose(math.fsum(self.pmf), 1.0, abs_tol=1e-9):
            raise ValueError("delay pmf does not sum to 1")

