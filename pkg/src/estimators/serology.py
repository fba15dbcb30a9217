"""
Serology calibration arithmetic.

Corrects raw IgG prevalence for test sensitivity, converts prevalence to
infections, infers IFR and symptomatic CFR, and rescales symptomatic
estimates to total infections so survey, cCFR and serology numbers are
comparable.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Tuple

from pydantic import BaseModel, ConfigDict, Field

from src.models.domain import CountryInfo, EstimateResult

logger = logging.getLogger(__name__)

# symptomatic share used when comparing estimates; the CFR derivation uses 0.6627
COMPARISON_SYMPTOMATIC_FRACTION = 0.66
STUDY_SYMPTOMATIC_FRACTION = 0.6627


class SerologyInputs(BaseModel):
    """Published serology-study figures driving the calibration."""

    model_config = ConfigDict(frozen=True)

    raw_prevalence: float = Field(ge=0.0, le=1.0)
    sensitivity: float = Field(gt=0.0, le=1.0)
    specificity: float = Field(default=1.0, gt=0.0, le=1.0)
    population: int = Field(ge=1)
    cum_deaths_at_lag: int = Field(ge=0)
    symptomatic_fraction: float = Field(default=STUDY_SYMPTOMATIC_FRACTION, gt=0.0, le=1.0)


@dataclass(frozen=True)
class SerologyCalibration:
    corrected_prevalence: float
    infections: float
    ifr: float
    symptomatic_cases: float
    symptomatic_cfr: float


@dataclass(frozen=True)
class ReachErrorRow:
    region: str
    relative_reach: float
    relative_error: float


def correct_prevalence(raw: float, sensitivity: float, specificity: float = 1.0) -> float:
    """
    raw / sensitivity.

    Specificity is accepted but unused: the reference test reports 100%
    specificity, so no false-positive correction applies.
    """
    if sensitivity <= 0:
        raise ValueError(f"sensitivity must be positive, got {sensitivity}")
    if specificity < 1.0:
        logger.debug(f"Specificity {specificity} ignored; only sensitivity is corrected")
    corrected = raw / sensitivity
    if corrected > 1.0:
        raise ValueError(f"corrected prevalence {corrected:.4f} exceeds 1")
    return corrected


def prevalence_to_cases(prevalence: float, population: int) -> float:
    if not 0.0 <= prevalence <= 1.0:
        raise ValueError(f"prevalence must lie in [0, 1], got {prevalence}")
    return prevalence * population


def infer_ifr(cum_deaths: int, total_infections: float) -> float:
    if total_infections <= 0:
        raise ValueError("total infections must be positive")
    return cum_deaths / total_infections


def infer_symptomatic_cfr(
    total_infections: float,
    symptomatic_fraction: float,
    cum_deaths: int,
) -> Tuple[float, float]:
    """(symptomatic cases, deaths / symptomatic cases)."""
    if not 0.0 < symptomatic_fraction <= 1.0:
        raise ValueError(f"symptomatic fraction must lie in (0, 1], got {symptomatic_fraction}")
    symptomatic = total_infections * symptomatic_fraction
    if symptomatic <= 0:
        raise ValueError("no symptomatic cases to divide by")
    return symptomatic, cum_deaths / symptomatic


def calibrate(inputs: SerologyInputs) -> SerologyCalibration:
    """Run the whole chain: prevalence -> infections -> IFR -> symptomatic CFR."""
    prevalence = correct_prevalence(inputs.raw_prevalence, inputs.sensitivity, inputs.specificity)
    infections = prevalence_to_cases(prevalence, inputs.population)
    symptomatic, cfr = infer_symptomatic_cfr(infections, inputs.symptomatic_fraction, inputs.cum_deaths_at_lag)
    return SerologyCalibration(
        corrected_prevalence=prevalence,
        infections=infections,
        ifr=infer_ifr(inputs.cum_deaths_at_lag, infections),
        symptomatic_cases=symptomatic,
        symptomatic_cfr=cfr,
    )


def scale_symptomatic_to_total(
    estimate: EstimateResult,
    symptomatic_fraction: float = COMPARISON_SYMPTOMATIC_FRACTION,
) -> EstimateResult:
    """Divide point and CI by the symptomatic fraction; values are capped at 1."""
    if not 0.0 < symptomatic_fraction <= 1.0:
        raise ValueError(f"symptomatic fraction must lie in (0, 1], got {symptomatic_fraction}")
    return replace(
        estimate,
        point=min(1.0, estimate.point / symptomatic_fraction),
        ci_low=min(1.0, estimate.ci_low / symptomatic_fraction),
        ci_high=min(1.0, estimate.ci_high / symptomatic_fraction),
    )


def reach_error_table(
    per_region_estimates: Iterable[Tuple[str, float, int]],
    serology_truth: Iterable[Tuple[str, float]],
    region_table: CountryInfo,
) -> List[ReachErrorRow]:
    """
    Relative error against serology as a function of relative reach.

    Regions without a truth value (or without a population) are reported and
    skipped.
    """
    truth: Dict[str, float] = dict(serology_truth)
    rows = []
    for region, estimate, reach_sum in per_region_estimates:
        if region not in truth:
            logger.warning(f"Region {region} has no serology value; skipped")
            continue
        if not region_table.has_region(region):
            logger.warning(f"Region {region} is not in the {region_table.country} table; skipped")
            continue
        if truth[region] <= 0:
            logger.warning(f"Region {region} has zero serology prevalence; relative error undefined")
            continue
        rows.append(ReachErrorRow(
            region=region,
            relative_reach=reach_sum / region_table.population_of(region),
            relative_error=abs(estimate - truth[region]) / truth[region],
        ))
    return rows
