"""
State for the survey estimation pipeline.

EstimationState is passed between the nodes of the LangGraph workflow. Each
node returns a partial update; `log` accumulates one line per step.
"""

import operator
from typing import Annotated, Dict, List, Optional, Tuple, TypedDict

from src.estimators.filters import FilterReport
from src.models.domain import CountryInfo, EstimateResult, SurveyResponse


class EstimationState(TypedDict):
    """
    Unified state for one `estimate` run.

    Inputs are set by the caller; the remaining fields are filled in by the
    nodes as the run progresses.
    """

    # Inputs
    source: str  # path of the responses CSV
    strict: bool
    method: str  # "region" | "country"
    country_code: Optional[str]  # which country to estimate when the file holds several
    country: Optional[CountryInfo]  # region table, required for method="region"
    ratio_cap: float
    a_min: int
    a_min_country: int
    z: float
    scale_symptomatic: Optional[float]

    # Produced by nodes
    responses: Optional[List[SurveyResponse]]
    rejects: Optional[List[Tuple[int, str]]]
    filter_report: Optional[FilterReport]
    estimates: Optional[List[EstimateResult]]
    estimator_parameters: Optional[Dict[str, object]]  # recorded in the run manifest

    # Routing and diagnostics
    next_step: str  # "region_estimator" | "country_estimator" | "FINISH"
    error_message: Optional[str]
    log: Annotated[List[str], operator.add]
