"""
Main package initialization.
"""

__version__ = "0.1.0"
__author__ = "Incidence Estimation Team"

from src.graph import create_pipeline, initial_state
from src.models import EstimateResult, SurveyResponse
from src.utils import load_settings

__all__ = [
    "EstimateResult",
    "SurveyResponse",
    "create_pipeline",
    "initial_state",
    "load_settings",
]
