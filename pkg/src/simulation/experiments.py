"""
Monte-Carlo experiments over synthetic worlds.

Each trial draws from its own generator derived from (seed, trial index), so
results do not depend on execution order.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from datetime import date
from typing import Dict, List, Sequence

import numpy as np

from src.estimators.survey import Z_95, pooled_estimate, stratified_estimate
from src.models.domain import EstimateResult, SurveyResponse
from src.simulation.world import RespondentModel, SyntheticWorld, simulate_responses, trial_rng

logger = logging.getLogger(__name__)

TRIAL_DATE = date(2020, 4, 15)
MIN_COVERAGE_TRIALS = 100


@dataclass(frozen=True)
class CoverageReport:
    coverage: float
    trials: int
    failed_trials: int
    estimator: str


@dataclass(frozen=True)
class BiasReport:
    biased_error: float
    unbiased_error: float
    biased_stratified_error: float
    unbiased_stratified_error: float
    trials: int


def _group(responses: Sequence[SurveyResponse]) -> Dict[str, List[SurveyResponse]]:
    grouped: Dict[str, List[SurveyResponse]] = defaultdict(list)
    for response in responses:
        grouped[response.region].append(response)
    return grouped


def _stratified(world: SyntheticWorld, responses: Sequence[SurveyResponse], z: float) -> EstimateResult:
    return stratified_estimate(_group(responses), world.country, z=z, on_date=TRIAL_DATE)


def coverage_experiment(
    world: SyntheticWorld,
    model: RespondentModel,
    n_per_trial: int,
    trials: int,
    estimator: str = "stratified",
    z: float = Z_95,
) -> CoverageReport:
    """
    Fraction of trials whose CI contains the population-weighted truth.

    Small samples can push coverage well below nominal; the report states
    it and leaves judgement to the caller. Trials where the estimator is
    undefined (e.g. no region with two responses) count as misses.
    """
    if trials < MIN_COVERAGE_TRIALS:
        raise ValueError(f"coverage_experiment needs at least {MIN_COVERAGE_TRIALS} trials")
    truth = world.weighted_truth()
    covered = failed = 0
    for trial in range(trials):
        responses = simulate_responses(world, model, n_per_trial, TRIAL_DATE, rng=trial_rng(world.rng_seed, trial))
        try:
            if estimator == "stratified":
                result = _stratified(world, responses, z)
            else:
                result = pooled_estimate(responses, z=z, on_date=TRIAL_DATE)
        except ValueError:
            failed += 1
            continue
        if result.ci_low <= truth <= result.ci_high:
            covered += 1
    coverage = covered / trials
    logger.info(f"Coverage ({estimator}, n={n_per_trial}, {trials} trials): {coverage:.3f}")
    return CoverageReport(coverage=coverage, trials=trials, failed_trials=failed, estimator=estimator)


def bias_experiment(
    world: SyntheticWorld,
    biased_model: RespondentModel,
    unbiased_model: RespondentModel,
    n: int,
    trials: int,
) -> BiasReport:
    """
    Mean absolute error against the population-weighted truth for the pooled
    estimator under each model, plus the stratified estimator's errors.
    """
    truth = world.weighted_truth()
    errors = {key: [] for key in ("biased", "unbiased", "biased_stratified", "unbiased_stratified")}
    for trial in range(trials):
        for label, model in (("biased", biased_model), ("unbiased", unbiased_model)):
            # same trial index for both models keeps the comparison paired
            responses = simulate_responses(world, model, n, TRIAL_DATE, rng=trial_rng(world.rng_seed, trial))
            errors[label].append(abs(pooled_estimate(responses).point - truth))
            try:
                errors[f"{label}_stratified"].append(abs(_stratified(world, responses, Z_95).point - truth))
            except ValueError:
                logger.debug(f"Trial {trial}: no stratified estimate under the {label} model")

    def _mae(values: List[float]) -> float:
        return float(np.mean(values)) if values else float("nan")

    report = BiasReport(
        biased_error=_mae(errors["biased"]),
        unbiased_error=_mae(errors["unbiased"]),
        biased_stratified_error=_mae(errors["biased_stratified"]),
        unbiased_stratified_error=_mae(errors["unbiased_stratified"]),
        trials=trials,
    )
    logger.info(
        f"Bias experiment ({trials} trials): pooled MAE biased={report.biased_error:.5f} "
        f"unbiased={report.unbiased_error:.5f}; stratified MAE biased={report.biased_stratified_error:.5f}"
    )
    return report
