"""
__init__.py for the simulation module.
"""

from src.simulation.experiments import BiasReport, CoverageReport, bias_experiment, coverage_experiment
from src.simulation.scenario import Scenario, load_scenario
from src.simulation.world import RespondentModel, SyntheticWorld, simulate_responses, trial_rng

__all__ = [
    "BiasReport",
    "CoverageReport",
    "RespondentModel",
    "Scenario",
    "SyntheticWorld",
    "bias_experiment",
    "coverage_experiment",
    "load_scenario",
    "simulate_responses",
    "trial_rng",
]
