"""
__init__.py for the models module.

Exports the shared domain types.
"""

from src.models.domain import (
    Baseline,
    CountryInfo,
    DelayModel,
    EstimateResult,
    EstimationMethod,
    OfficialSeriesPoint,
    RegionInfo,
    Rejection,
    SurveyResponse,
    validate_response,
)

__all__ = [
    "Baseline",
    "CountryInfo",
    "DelayModel",
    "EstimateResult",
    "EstimationMethod",
    "OfficialSeriesPoint",
    "RegionInfo",
    "Rejection",
    "SurveyResponse",
    "validate_response",
]
