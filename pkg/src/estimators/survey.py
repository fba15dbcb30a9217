"""
Incidence estimators over indirect survey responses.

Region-stratified: per-region ratio of sums p_i = sum(c)/sum(r), combined with
population weights and a post-stratified variance. Country-pooled: one ratio
of sums over every response with a binomial normal-approximation CI. Both come
with rolling aggregation over days (backward windows for regions, disjoint
forward blocks for the pooled estimator).
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, replace
from datetime import date
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from src.models.domain import CountryInfo, EstimateResult, EstimationMethod, SurveyResponse

logger = logging.getLogger(__name__)

Z_95 = 1.96
DEFAULT_A_MIN = 300
DEFAULT_A_MIN_COUNTRY = 30


@dataclass(frozen=True)
class RegionAggregate:
    """Per-region sums, ratio and within-stratum variance."""

    region: str
    n_i: int
    reach_sum: int
    count_sum: int
    p_hat_i: float
    s_sq_i: float
    omega_i: Optional[float] = None


@dataclass(frozen=True)
class RollingWindow:
    """Responses backing one emitted estimate."""

    anchor_date: date
    min_responses: int
    responses_used: tuple
    span_days: int


def _clamp_interval(point: float, half_width: float) -> tuple:
    low = max(0.0, point - half_width)
    high = min(1.0, point + half_width)
    return low, high


def region_ratio(responses: Sequence[SurveyResponse]) -> RegionAggregate:
    """
    Ratio-of-sums estimate for a single region.

    S_i^2 is the sample variance of the individual ratios c/r; it is 0 for a
    singleton region, whose (n_i - 1) denominator would otherwise vanish.
    """
    if not responses:
        raise ValueError("region_ratio needs at least one response")
    regions = {r.region for r in responses}
    if len(regions) > 1:
        raise ValueError(f"region_ratio got mixed regions: {sorted(map(str, regions))}")

    reach = np.array([r.reach for r in responses], dtype=float)
    count = np.array([r.count for r in responses], dtype=float)
    reach_sum = int(reach.sum())
    if reach_sum <= 0:
        raise ValueError("region_ratio needs a positive total reach")
    count_sum = int(count.sum())
    p_hat = count_sum / reach_sum

    n_i = len(responses)
    if n_i > 1:
        ratios = count / reach
        s_sq = float(np.sum((ratios - p_hat) ** 2) / (n_i - 1))
    else:
        s_sq = 0.0

    return RegionAggregate(
        region=responses[0].region,
        n_i=n_i,
        reach_sum=reach_sum,
        count_sum=count_sum,
        p_hat_i=p_hat,
        s_sq_i=s_sq,
    )


def region_breakdown(
    by_region: Mapping[str, Sequence[SurveyResponse]],
    country: CountryInfo,
) -> List[RegionAggregate]:
    """RegionAggregates with weights N_i / sum(N_k) over the represented regions."""
    represented = {region: rows for region, rows in by_region.items() if rows}
    unknown = [region for region in represented if not country.has_region(region)]
    if unknown:
        raise ValueError(f"regions not in the {country.country} table: {sorted(unknown)}")

    aggregates = [region_ratio(represented[region]) for region in sorted(represented)]
    represented_population = sum(country.population_of(a.region) for a in aggregates)
    return [
        replace(a, omega_i=country.population_of(a.region) / represented_population)
        for a in aggregates
    ]


def stratified_variance(aggregates: Sequence[RegionAggregate], n: int, population: int) -> float:
    """
    Post-stratified variance of the weighted proportion:
    (1-f)/n * sum(w S^2) + (1-f)/n^2 * sum((1-w) S^2), with f = n/N.
    """
    f = n / population
    first = sum(a.omega_i * a.s_sq_i for a in aggregates)
    second = sum((1.0 - a.omega_i) * a.s_sq_i for a in aggregates)
    return (1.0 - f) / n * first + (1.0 - f) / n ** 2 * second


def stratified_estimate(
    by_region: Mapping[str, Sequence[SurveyResponse]],
    country: CountryInfo,
    total_n: Optional[int] = None,
    z: float = Z_95,
    on_date: Optional[date] = None,
) -> EstimateResult:
    """
    Region-stratified estimate for one window.

    Args:
        by_region: Regional responses grouped by region code (no country-wide ones)
        country: Region table supplying N_i and N
        total_n: n used in f = n/N and the variance; defaults to the number of responses
        z: Normal quantile for the CI
        on_date: Date stamped on the result; defaults to the latest response date

    Raises:
        ValueError: No region with at least two responses, or zero total reach
    """
    aggregates = region_breakdown(by_region, country)
    if not any(a.n_i >= 2 for a in aggregates):
        raise ValueError("no region has the two responses needed for a variance")
    total_reach = sum(a.reach_sum for a in aggregates)
    if total_reach == 0:
        raise ValueError("zero total reach")

    n = total_n if total_n is not None else sum(a.n_i for a in aggregates)
    point = math.fsum(a.omega_i * a.p_hat_i for a in aggregates)
    variance = stratified_variance(aggregates, n, country.population)
    low, high = _clamp_interval(point, z * math.sqrt(max(variance, 0.0)))

    if on_date is None:
        on_date = max(r.date for rows in by_region.values() for r in rows)
    return EstimateResult(
        date=on_date,
        point=point,
        ci_low=low,
        ci_high=high,
        n_responses=sum(a.n_i for a in aggregates),
        total_reach=total_reach,
        method=EstimationMethod.REGION_STRATIFIED,
    )


def pooled_estimate(
    responses: Sequence[SurveyResponse],
    z: float = Z_95,
    on_date: Optional[date] = None,
) -> EstimateResult:
    """Ratio of sums over all responses with a binomial CI on total reach."""
    if not responses:
        raise ValueError("pooled_estimate needs at least one response")
    reach = sum(r.reach for r in responses)
    if reach <= 0:
        raise ValueError("pooled_estimate needs a positive total reach")
    point = sum(r.count for r in responses) / reach
    low, high = _clamp_interval(point, z * math.sqrt(point * (1.0 - point) / reach))
    return EstimateResult(
        date=on_date or max(r.date for r in responses),
        point=point,
        ci_low=low,
        ci_high=high,
        n_responses=len(responses),
        total_reach=reach,
        method=EstimationMethod.COUNTRY_POOLED,
    )


def _by_day(responses: Iterable[SurveyResponse]) -> Dict[date, List[SurveyResponse]]:
    days: Dict[date, List[SurveyResponse]] = defaultdict(list)
    for response in responses:
        days[response.date].append(response)
    return dict(sorted(days.items()))


def region_windows(responses: Sequence[SurveyResponse], a_min: int = DEFAULT_A_MIN) -> List[RollingWindow]:
    """
    Backward windows: for each day with data, whole days from that day
    backwards until at least a_min responses are collected. Days whose full
    history stays below a_min get no window.
    """
    days = _by_day(responses)
    ordered = list(days)
    windows = []
    for index, anchor in enumerate(ordered):
        used: List[SurveyResponse] = []
        start = index
        while start >= 0 and len(used) < a_min:
            used.extend(days[ordered[start]])
            start -= 1
        if len(used) < a_min:
            continue
        span = (anchor - ordered[start + 1]).days + 1
        windows.append(RollingWindow(anchor_date=anchor, min_responses=a_min, responses_used=tuple(used), span_days=span))
    return windows


def country_blocks(responses: Sequence[SurveyResponse], a_min: int = DEFAULT_A_MIN_COUNTRY) -> List[RollingWindow]:
    """
    Disjoint forward blocks: days accumulate until the block holds a_min
    responses; the block is dated at its last day. A trailing partial block
    is dropped.
    """
    windows = []
    block: List[SurveyResponse] = []
    first_day: Optional[date] = None
    for day, rows in _by_day(responses).items():
        if first_day is None:
            first_day = day
        block.extend(rows)
        if len(block) >= a_min:
            windows.append(RollingWindow(
                anchor_date=day,
                min_responses=a_min,
                responses_used=tuple(block),
                span_days=(day - first_day).days + 1,
            ))
            block, first_day = [], None
    if block:
        logger.debug(f"Dropped trailing block of {len(block)} responses (< {a_min})")
    return windows


def rolling_region_series(
    responses: Sequence[SurveyResponse],
    country: CountryInfo,
    a_min: int = DEFAULT_A_MIN,
    z: float = Z_95,
) -> List[EstimateResult]:
    """
    Daily region-stratified series for one country.

    Responses from regions missing in the table are dropped before windowing.
    Country-wide responses still count toward a_min but are left out of the
    stratified estimate.
    """
    unknown = {r.region for r in responses if r.region is not None and not country.has_region(r.region)}
    if unknown:
        logger.warning(f"Ignoring responses for regions not in the {country.country} table: {sorted(unknown)}")
    usable = [r for r in responses if r.region is None or country.has_region(r.region)]

    series = []
    for window in region_windows(usable, a_min):
        by_region: Dict[str, List[SurveyResponse]] = defaultdict(list)
        for response in window.responses_used:
            if country.has_region(response.region):
                by_region[response.region].append(response)
        try:
            series.append(stratified_estimate(by_region, country, z=z, on_date=window.anchor_date))
        except ValueError as e:
            logger.warning(f"No region estimate for {window.anchor_date}: {e}")
    logger.info(f"Region-stratified series: {len(series)} estimates (A_min={a_min})")
    return series


def rolling_country_series(
    responses: Sequence[SurveyResponse],
    a_min: int = DEFAULT_A_MIN_COUNTRY,
    z: float = Z_95,
) -> List[EstimateResult]:
    """Pooled estimates over disjoint forward blocks of at least a_min responses."""
    series = [
        pooled_estimate(window.responses_used, z=z, on_date=window.anchor_date)
        for window in country_blocks(responses, a_min)
    ]
    logger.info(f"Country-pooled series: {len(series)} estimates (a_min={a_min})")
    return series
