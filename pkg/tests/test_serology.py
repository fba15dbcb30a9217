"""
Tests for the serology calibration chain and symptomatic scaling.
"""

from datetime import date

import pytest

from src.estimators.serology import (
    SerologyInputs,
    calibrate,
    correct_prevalence,
    infer_ifr,
    infer_symptomatic_cfr,
    prevalence_to_cases,
    reach_error_table,
    scale_symptomatic_to_total,
)
from src.models.domain import EstimateResult, EstimationMethod

SPAIN = dict(
    raw_prevalence=0.05,
    sensitivity=0.79,
    population=46_934_628,
    cum_deaths_at_lag=26_744,
    symptomatic_fraction=0.6627,
)


class TestCalibrationChain:
    def test_step_by_step(self):
        prevalence = correct_prevalence(0.05, 0.79)
        assert prevalence == pytest.approx(0.0632911, abs=1e-6)
        infections = prevalence_to_cases(prevalence, 46_934_628)
        assert infections == pytest.approx(2_970_546, abs=1)
        assert infer_ifr(26_744, infections) == pytest.approx(0.00900, abs=1e-5)
        symptomatic, cfr = infer_symptomatic_cfr(infections, 0.6627, 26_744)
        assert symptomatic == pytest.approx(1_968_550, abs=100)
        assert cfr == pytest.approx(0.01359, abs=1e-4)

    def test_calibrate_matches_steps(self):
        result = calibrate(SerologyInputs(**SPAIN))
        assert result.corrected_prevalence == pytest.approx(0.0632911, abs=1e-6)
        assert result.infections == pytest.approx(2_970_546, abs=1)
        assert result.symptomatic_cfr == pytest.approx(0.01359, abs=1e-4)

    def test_perfect_sensitivity_is_identity(self):
        assert correct_prevalence(0.05, 1.0) == 0.05

    def test_zero_deaths_gives_zero_ifr(self):
        assert infer_ifr(0, 1000.0) == 0.0

    @pytest.mark.parametrize("raw, sensitivity", [(0.9, 0.5), (0.1, 0.0)])
    def test_invalid_correction(self, raw, sensitivity):
        with pytest.raises(ValueError):
            correct_prevalence(raw, sensitivity)

    @pytest.mark.parametrize(
        "deaths, raw, sensitivity, population",
        [(26_744, 0.05, 0.79, 46_934_628), (150, 0.12, 0.9, 1_000_000), (1, 0.001, 0.5, 10_000)],
    )
    def test_chain_composes_to_closed_form(self, deaths, raw, sensitivity, population):
        ifr = infer_ifr(deaths, prevalence_to_cases(correct_prevalence(raw, sensitivity), population))
        assert ifr == pytest.approx(deaths * sensitivity / (raw * population), abs=1e-12)

    def test_no_infections(self):
        with pytest.raises(ValueError):
            infer_ifr(10, 0.0)


class TestScaling:
    def _estimate(self, point, low, high):
        return EstimateResult(
            date=date(2020, 4, 27), point=point, ci_low=low, ci_high=high,
            n_responses=300, total_reach=30000, method=EstimationMethod.REGION_STRATIFIED,
        )

    def test_scales_point_and_interval(self):
        scaled = scale_symptomatic_to_total(self._estimate(0.0409, 0.03, 0.05), 0.66)
        assert scaled.point == pytest.approx(0.0620, abs=1e-4)
        assert scaled.ci_low == pytest.approx(0.03 / 0.66)
        assert scaled.method is EstimationMethod.REGION_STRATIFIED

    def test_interval_width_scales_with_inverse_fraction(self):
        estimate = self._estimate(0.04, 0.03, 0.05)
        scaled = scale_symptomatic_to_total(estimate, 0.66)
        assert scaled.ci_high - scaled.ci_low == pytest.approx((0.05 - 0.03) / 0.66, rel=1e-12)

    def test_fraction_one_is_identity(self):
        estimate = self._estimate(0.04, 0.03, 0.05)
        assert scale_symptomatic_to_total(estimate, 1.0) == estimate

    def test_capped_at_one(self):
        scaled = scale_symptomatic_to_total(self._estimate(0.5, 0.4, 0.8), 0.5)
        assert scaled.ci_high == 1.0 and scaled.point == 1.0

    def test_invalid_fraction(self):
        with pytest.raises(ValueError):
            scale_symptomatic_to_total(self._estimate(0.04, 0.03, 0.05), 0.0)


def test_reach_error_table(two_region_country):
    rows = reach_error_table(
        [("A", 0.06, 50_000), ("B", 0.02, 10_000), ("C", 0.01, 1_000)],
        [("A", 0.05), ("B", 0.04)],
        two_region_country,
    )
    assert [r.region for r in rows] == ["A", "B"]
    assert rows[0].relative_reach == pytest.approx(0.05)
    assert rows[0].relative_error == pytest.approx(0.2)
    assert rows[1].relative_error == pytest.approx(0.5)
