"""
Delay-corrected case fatality ratio and the under-reporting it implies.

Daily confirmed cases are convolved with a discretized lognormal
confirmation-to-death delay to obtain the cumulative number of cases whose
outcome is known. cCFR = cumulative deaths / known-outcome cases; dividing by
a baseline cCFR gives the under-reporting ratio, with a log-scale CI.
"""

import logging
import math
from dataclasses import dataclass
from datetime import date
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from src.models.domain import Baseline, DelayModel, EstimateResult, EstimationMethod, OfficialSeriesPoint

logger = logging.getLogger(__name__)

DEFAULT_DELAY_MEAN = 13.0
DEFAULT_DELAY_SD = 12.7
DEFAULT_DELAY_HORIZON = 120


@dataclass(frozen=True)
class CcfrState:
    """cCFR bookkeeping for one day."""

    date: date
    cum_cases: int
    cum_deaths: int
    known_outcome_cases: float
    ccfr: float
    ratio: float
    sigma_hat: Optional[float] = None


@dataclass(frozen=True)
class CcfrReportRow:
    """
    One output row of the cCFR pipeline; CI fields are None when undefined.

    Rows read back from a written report carry no cumulative counts.
    """

    date: date
    ccfr: float
    ratio: float
    ratio_low: Optional[float]
    ratio_high: Optional[float]
    true_cases: float
    true_cases_low: Optional[float]
    true_cases_high: Optional[float]
    cum_cases: Optional[int] = None
    cum_deaths: Optional[int] = None
    naive_cfr: Optional[float] = None


def lognormal_parameters(mean: float, sd: float) -> Tuple[float, float]:
    """(mu, sigma) of the underlying normal for a lognormal with this mean and sd."""
    sigma_sq = math.log(1.0 + sd ** 2 / mean ** 2)
    mu = math.log(mean ** 2 / math.sqrt(mean ** 2 + sd ** 2))
    return mu, math.sqrt(sigma_sq)


def discretize_delay(
    mean: float = DEFAULT_DELAY_MEAN,
    sd: float = DEFAULT_DELAY_SD,
    horizon: int = DEFAULT_DELAY_HORIZON,
) -> DelayModel:
    """
    Interval masses F(j+1) - F(j) for j = 0..horizon-1, renormalized after
    truncation at the horizon.
    """
    if mean <= 0 or sd <= 0:
        raise ValueError(f"delay mean and sd must be positive, got {mean}, {sd}")
    if horizon < 1:
        raise ValueError(f"delay horizon must be at least 1, got {horizon}")

    mu, sigma = lognormal_parameters(mean, sd)
    distribution = stats.lognorm(s=sigma, scale=math.exp(mu))
    edges = np.arange(horizon + 1, dtype=float)
    masses = np.diff(distribution.cdf(edges))
    total = masses.sum()
    if total <= 0:
        # all mass beyond the horizon
        masses = np.zeros(horizon)
        masses[-1] = 1.0
        total = 1.0
    pmf = masses / total
    logger.debug(f"Delay pmf: mean={mean}, sd={sd}, horizon={horizon}, truncated mass={1 - total:.2e}")
    return DelayModel(mean_days=mean, sd_days=sd, max_horizon=horizon, pmf=tuple(float(p) for p in pmf))


def known_outcome_cases(series: Sequence[OfficialSeriesPoint], delay: DelayModel) -> np.ndarray:
    """
    known(t) = sum over tau <= t of new_cases(tau) * CDF(t - tau).

    Computed as the cumulative sum of daily cases convolved with the delay pmf.
    """
    if not series:
        raise ValueError("known_outcome_cases needs a non-empty series")
    cases = np.array([p.new_cases for p in series], dtype=float)
    resolved_daily = np.convolve(cases, np.asarray(delay.pmf))[: len(cases)]
    return np.cumsum(resolved_daily)


def ccfr_series(
    series: Sequence[OfficialSeriesPoint],
    delay: DelayModel,
    baseline: Optional[Baseline] = None,
) -> List[CcfrState]:
    """
    Daily cCFR states.

    Days with no known-outcome cases, or with more cumulative deaths than
    known-outcome cases, are skipped.
    """
    if not series:
        return []
    baseline = baseline or Baseline()
    known = known_outcome_cases(series, delay)
    cum_cases = np.cumsum([p.new_cases for p in series])
    cum_deaths = np.cumsum([p.new_deaths for p in series])

    states = []
    skipped = 0
    for point, c, d, k in zip(series, cum_cases, cum_deaths, known):
        if k <= 0 or d > k:
            skipped += 1
            continue
        d, k = int(d), float(k)
        sigma = None
        if d >= 1 and k > d:
            sigma = math.sqrt(ln_method_variance(d, k, baseline))
        ccfr = d / k
        states.append(CcfrState(
            date=point.date,
            cum_cases=int(c),
            cum_deaths=d,
            known_outcome_cases=k,
            ccfr=ccfr,
            ratio=ccfr / baseline.cfr_b,
            sigma_hat=sigma,
        ))
    if skipped:
        logger.debug(f"cCFR undefined on {skipped} day(s)")
    return states


def underreporting_ratio(state: CcfrState, baseline: Baseline) -> float:
    """cCFR / cCFR_b: how many true cases stand behind each reported one."""
    if state.ccfr is None or math.isnan(state.ccfr):
        raise ValueError(f"cCFR undefined on {state.date}")
    return state.ccfr / baseline.cfr_b


def true_cases_estimate(reported_cum_cases: int, ratio: float) -> float:
    if ratio < 0:
        raise ValueError(f"under-reporting ratio must be non-negative, got {ratio}")
    return reported_cum_cases * ratio


def ln_method_variance(d: int, c: float, baseline: Baseline) -> float:
    """sigma^2 = 1/d - 1/c + 1/d_b - 1/c_b; raises when negative."""
    variance = 1.0 / d - 1.0 / c + 1.0 / baseline.deaths_b - 1.0 / baseline.cases_b
    if variance < 0:
        raise ValueError(f"negative log-ratio variance {variance}")
    return variance


def ln_method_ci(d: int, c: float, baseline: Baseline, z: float = 1.96) -> Tuple[float, float]:
    """
    Log-scale CI for r = (d/c) / (d_b/c_b): (r * exp(-z*sigma), r * exp(z*sigma)).

    Raises:
        ValueError: d < 1, c <= d, or negative variance
    """
    if d < 1:
        raise ValueError(f"ln_method_ci needs at least one death, got {d}")
    if c <= d:
        raise ValueError(f"ln_method_ci needs c > d, got c={c}, d={d}")
    r = (d / c) / baseline.cfr_b
    sigma = math.sqrt(ln_method_variance(d, c, baseline))
    return r * math.exp(-z * sigma), r * math.exp(z * sigma)


def ccfr_report(
    series: Sequence[OfficialSeriesPoint],
    delay: DelayModel,
    baseline: Optional[Baseline] = None,
    z: float = 1.96,
) -> List[CcfrReportRow]:
    """Full pipeline: cCFR, ratio, ratio CI and implied true cases for every defined day."""
    baseline = baseline or Baseline()
    rows = []
    for state in ccfr_series(series, delay, baseline):
        ratio = underreporting_ratio(state, baseline)
        low = high = None
        if state.sigma_hat is not None:
            low, high = ln_method_ci(state.cum_deaths, state.known_outcome_cases, baseline, z)
        rows.append(CcfrReportRow(
            date=state.date,
            cum_cases=state.cum_cases,
            cum_deaths=state.cum_deaths,
            naive_cfr=state.cum_deaths / state.cum_cases,
            ccfr=state.ccfr,
            ratio=ratio,
            ratio_low=low,
            ratio_high=high,
            true_cases=true_cases_estimate(state.cum_cases, ratio),
            true_cases_low=None if low is None else true_cases_estimate(state.cum_cases, low),
            true_cases_high=None if high is None else true_cases_estimate(state.cum_cases, high),
        ))
    logger.info(f"cCFR report: {len(rows)} day(s) with a defined cCFR")
    return rows


def report_row_to_estimate(row: CcfrReportRow, population: int) -> EstimateResult:
    """Express a cCFR row's true-case estimate as a population fraction."""
    low = row.true_cases if row.true_cases_low is None else row.true_cases_low
    high = row.true_cases if row.true_cases_high is None else row.true_cases_high
    return EstimateResult(
        date=row.date,
        point=row.true_cases / population,
        ci_low=low / population,
        ci_high=high / population,
        n_responses=0,
        total_reach=0,
        method=EstimationMethod.CCFR,
    )
