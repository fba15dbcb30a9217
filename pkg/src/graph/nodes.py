"""
Pipeline nodes for survey estimation.

Each node takes the current EstimationState and returns a partial update.
Nodes never raise: failures are logged and reported through error_message,
which the workflow routers send straight to the end of the graph.
"""

import logging
from typing import Any, Dict

from src.estimators import EstimatorFactory
from src.estimators.filters import apply_filters
from src.estimators.serology import scale_symptomatic_to_total
from src.graph.state import EstimationState
from src.tools.csv_ingest import parse_responses

logger = logging.getLogger(__name__)


def _failure(step: str, message: str) -> Dict[str, Any]:
    logger.error(f"{step} failed: {message}")
    return {"next_step": "FINISH", "error_message": message, "log": [f"[{step.upper()}_ERROR] {message}"]}


def ingest_node(state: EstimationState) -> Dict[str, Any]:
    """Parse the responses CSV and keep one country's responses."""
    source = state["source"]
    try:
        with open(source, "r", encoding="utf-8", newline="") as handle:
            parsed = parse_responses(handle, strict=state.get("strict", False), source=source)
    except (OSError, ValueError) as e:
        # IngestError and UnicodeDecodeError are both ValueErrors
        return _failure("ingest", str(e))

    wanted = (state.get("country_code") or "").strip().upper() or None
    country = state.get("country")
    if country is not None:
        if wanted and wanted != country.country:
            return _failure("ingest", f"--country {wanted} does not match the region table ({country.country})")
        wanted = country.country
    if not wanted:
        present = sorted({r.country for r in parsed.rows})
        if len(present) > 1:
            return _failure("ingest", f"responses cover several countries {present}; pass --country")
        wanted = present[0] if present else None

    responses = sorted((r for r in parsed.rows if r.country == wanted), key=lambda r: r.date)
    return {
        "responses": responses,
        "rejects": parsed.rejects,
        "log": [f"[INGEST] {len(responses)} responses for {wanted}, {len(parsed.rejects)} rejected"],
    }


def filter_node(state: EstimationState) -> Dict[str, Any]:
    """Apply the outlier rules once over the country batch and pick the estimator."""
    method = state.get("method", "country")
    next_step = f"{method}_estimator"
    responses = state.get("responses") or []
    if not responses:
        logger.warning("No responses to estimate from")
        return {"estimates": [], "next_step": "FINISH", "log": ["[FILTER] empty batch"]}
    try:
        report = apply_filters(responses, ratio_cap=state["ratio_cap"])
    except ValueError as e:
        return _failure("filter", str(e))
    return {
        "filter_report": report,
        "next_step": next_step,
        "log": [f"[FILTER] kept {len(report.kept)} of {len(responses)} (fence {report.reach_fence:.1f})"],
    }


def _estimate(state: EstimationState, method: str, a_min: int) -> Dict[str, Any]:
    try:
        estimator = EstimatorFactory.create(method, country=state.get("country"), a_min=a_min, z=state["z"])
        estimates = estimator.estimate_series(state["filter_report"].kept)
    except ValueError as e:
        return _failure(f"{method}_estimator", str(e))
    return {
        "estimates": estimates,
        "estimator_parameters": estimator.parameters,
        "next_step": "FINISH",
        "log": [f"[{method.upper()}_ESTIMATOR] {len(estimates)} estimates"],
    }


def region_estimator_node(state: EstimationState) -> Dict[str, Any]:
    return _estimate(state, "region", state["a_min"])


def country_estimator_node(state: EstimationState) -> Dict[str, Any]:
    return _estimate(state, "country", state["a_min_country"])


def finalize_node(state: EstimationState) -> Dict[str, Any]:
    """Optional symptomatic-to-total scaling and date ordering."""
    estimates = sorted(state.get("estimates") or [], key=lambda e: e.date)
    fraction = state.get("scale_symptomatic")
    if fraction is not None:
        try:
            estimates = [scale_symptomatic_to_total(e, fraction) for e in estimates]
        except ValueError as e:
            return _failure("finalize", str(e))
    return {"estimates": estimates, "log": [f"[FINALIZE] {len(estimates)} rows"]}
