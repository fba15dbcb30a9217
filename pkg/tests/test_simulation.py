"""
Tests for the synthetic-world simulator and the Monte-Carlo experiments.

Experiments over hundreds of trials are marked `slow`; deselect them with
`pytest -m "not slow"`.
"""

from datetime import date
from pathlib import Path

import numpy as np
import pytest

from src.estimators.survey import pooled_estimate, stratified_estimate
from src.models.domain import CountryInfo, RegionInfo
from src.simulation.experiments import bias_experiment, coverage_experiment
from src.simulation.scenario import load_scenario
from src.simulation.world import RespondentModel, SyntheticWorld, simulate_responses, trial_rng
from src.tools.csv_output import write_responses

SCENARIO = Path(__file__).resolve().parents[1] / "config" / "scenarios" / "four_regions.yaml"
DAY = date(2020, 4, 15)


@pytest.fixture
def scenario():
    return load_scenario(str(SCENARIO))


def _world(country, prevalence, seed=1):
    return SyntheticWorld(country=country, true_prevalence=prevalence, rng_seed=seed)


class TestSimulateResponses:
    def test_zero_prevalence_gives_zero_counts(self, two_region_country):
        rows = simulate_responses(_world(two_region_country, {"A": 0.0, "B": 0.0}), RespondentModel(), 200, DAY)
        assert all(r.count == 0 for r in rows)

    def test_full_prevalence_gives_count_equal_reach(self, two_region_country):
        rows = simulate_responses(_world(two_region_country, {"A": 1.0, "B": 1.0}), RespondentModel(), 200, DAY)
        assert all(r.count == r.reach for r in rows)
        assert all(r.reach >= 1 for r in rows)

    def test_same_seed_same_responses(self, two_region_country):
        world = _world(two_region_country, {"A": 0.05, "B": 0.02}, seed=42)
        model = RespondentModel(overlap_factor=0.5, pool_size=200)
        assert simulate_responses(world, model, 100, DAY) == simulate_responses(world, model, 100, DAY)

    def test_trial_generators_are_independent_of_order(self):
        first = trial_rng(42, 7).random(3)
        trial_rng(42, 3).random(10)
        assert np.array_equal(first, trial_rng(42, 7).random(3))
        assert not np.array_equal(first, trial_rng(42, 8).random(3))

    def test_bias_concentrates_responses(self, two_region_country):
        world = _world(two_region_country, {"A": 0.05, "B": 0.02})
        model = RespondentModel(region_bias={"A": 10.0, "B": 1.0})
        rows = simulate_responses(world, model, 1000, DAY)
        share = sum(r.region == "A" for r in rows) / len(rows)
        assert share == pytest.approx(10 / 11, abs=0.04)

    def test_reach_mean_near_configured(self, two_region_country):
        rows = simulate_responses(_world(two_region_country, {"A": 0.0, "B": 0.0}), RespondentModel(), 5000, DAY)
        assert np.mean([r.reach for r in rows]) == pytest.approx(100, rel=0.03)

    def test_overlap_keeps_counts_within_reach(self, two_region_country):
        model = RespondentModel(overlap_factor=0.9, pool_size=50)
        rows = simulate_responses(_world(two_region_country, {"A": 0.3, "B": 0.1}), model, 300, DAY)
        assert all(0 <= r.count <= r.reach for r in rows)

    def test_invalid_inputs(self, two_region_country):
        with pytest.raises(ValueError):
            simulate_responses(_world(two_region_country, {"A": 0.1, "B": 0.1}), RespondentModel(), 0, DAY)
        with pytest.raises(ValueError):
            _world(two_region_country, {"A": 0.1})
        with pytest.raises(ValueError):
            RespondentModel(region_bias={"A": 0.0, "B": 0.0})


class TestScenario:
    def test_load(self, scenario):
        assert scenario.country == "ES"
        assert scenario.survey_date == DAY
        assert [r.region for r in scenario.regions] == ["MD", "CT", "AN", "GA"]
        assert scenario.world().weighted_truth() == pytest.approx(0.054)

    def test_bias_weights(self, scenario):
        weights = scenario.respondent_model().region_weights(scenario.country_info())
        assert weights[0] == pytest.approx(40 / 46)
        assert scenario.unbiased_model().region_bias is None

    def test_serialized_responses_are_reproducible(self, scenario, tmp_path):
        texts = []
        for name in ("a.csv", "b.csv"):
            path = tmp_path / name
            with open(path, "w", encoding="utf-8", newline="") as handle:
                write_responses(simulate_responses(scenario.world(), scenario.respondent_model(), 300, DAY), handle)
            texts.append(path.read_bytes())
        assert texts[0] == texts[1]

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValueError, match="not found"):
            load_scenario(str(tmp_path / "missing.yaml"))


class TestExperiments:
    def test_coverage_needs_enough_trials(self, scenario):
        with pytest.raises(ValueError, match="at least 100"):
            coverage_experiment(scenario.world(), scenario.unbiased_model(), 300, 10)

    def test_zero_prevalence_is_always_covered(self, two_region_country):
        world = _world(two_region_country, {"A": 0.0, "B": 0.0})
        report = coverage_experiment(world, RespondentModel(), 50, 100)
        assert report.coverage == 1.0

    def test_single_region_stratified_equals_pooled(self):
        country = CountryInfo(
            country="ES", population=1_000_000,
            regions=(RegionInfo(region="A", country="ES", population=1_000_000),),
        )
        rows = simulate_responses(_world(country, {"A": 0.04}), RespondentModel(), 300, DAY)
        assert stratified_estimate({"A": rows}, country).point == pytest.approx(pooled_estimate(rows).point)

    @pytest.mark.slow
    def test_coverage_near_nominal(self, scenario):
        report = coverage_experiment(scenario.world(seed=42), scenario.unbiased_model(), 300, 1000)
        assert 0.92 <= report.coverage <= 0.98

    @pytest.mark.slow
    def test_stratification_reduces_bias(self, scenario):
        report = bias_experiment(
            scenario.world(seed=42), scenario.respondent_model(), scenario.unbiased_model(), 300, 500
        )
        assert report.biased_stratified_error < report.biased_error
        assert report.unbiased_error < report.biased_error

    @pytest.mark.slow
    def test_pooled_mean_unbiased_without_overlap(self, scenario):
        world = scenario.world(seed=7)
        model = scenario.unbiased_model()
        points = [
            pooled_estimate(simulate_responses(world, model, 300, DAY, rng=trial_rng(7, t))).point
            for t in range(400)
        ]
        standard_error = np.std(points, ddof=1) / np.sqrt(len(points))
        assert abs(np.mean(points) - world.weighted_truth()) < 3 * standard_error

    @pytest.mark.slow
    def test_overlap_inflates_variance_but_not_mean(self, two_region_country):
        world = _world(two_region_country, {"A": 0.05, "B": 0.05}, seed=11)
        trials = 200
        spreads = {}
        for overlap in (0.0, 0.95):
            model = RespondentModel(overlap_factor=overlap, pool_size=20)
            points = np.array([
                pooled_estimate(simulate_responses(world, model, 100, DAY, rng=trial_rng(11, t))).point
                for t in range(trials)
            ])
            standard_error = np.std(points, ddof=1) / np.sqrt(trials)
            assert abs(points.mean() - world.weighted_truth()) < 3 * standard_error
            spreads[overlap] = np.var(points, ddof=1)
        assert spreads[0.95] > spreads[0.0]
