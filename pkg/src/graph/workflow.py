"""
Workflow Graph - the survey estimation pipeline.

Assembles the estimation run as a LangGraph StateGraph:

    ingest -> filter -> region_estimator | country_estimator -> finalize -> END

Any node that sets error_message is routed straight to END.
"""

import logging
from typing import Any, Dict, Optional

from langgraph.graph import END, StateGraph

from src.graph.nodes import (
    country_estimator_node,
    filter_node,
    finalize_node,
    ingest_node,
    region_estimator_node,
)
from src.graph.state import EstimationState
from src.models.domain import CountryInfo

logger = logging.getLogger(__name__)


class WorkflowBuilder:
    """
    Builder class for the estimation workflow.

    Uses the Builder pattern so tests can compile the graph once and invoke
    it with different states.
    """

    def __init__(self):
        self.graph = None
        self._compiled_app = None

    def build_workflow(self):
        """
        Build and compile the estimation graph.

        Returns:
            Compiled LangGraph application ready to invoke
        """
        workflow = StateGraph(EstimationState)

        workflow.add_node("ingest", ingest_node)
        workflow.add_node("filter", filter_node)
        workflow.add_node("region_estimator", region_estimator_node)
        workflow.add_node("country_estimator", country_estimator_node)
        workflow.add_node("finalize", finalize_node)

        workflow.set_entry_point("ingest")

        def ingest_router(state: EstimationState) -> str:
            return "end" if state.get("error_message") else "filter"

        workflow.add_conditional_edges("ingest", ingest_router, {"filter": "filter", "end": END})

        def filter_router(state: EstimationState) -> str:
            """Route on the method chosen by the filter node."""
            if state.get("error_message"):
                return "end"
            next_step = state.get("next_step", "FINISH")
            if next_step in ("region_estimator", "country_estimator"):
                return next_step
            if next_step != "FINISH":
                logger.warning(f"Unknown next_step: {next_step}, finishing")
            return "finalize"

        workflow.add_conditional_edges(
            "filter",
            filter_router,
            {
                "region_estimator": "region_estimator",
                "country_estimator": "country_estimator",
                "finalize": "finalize",
                "end": END,
            },
        )

        def estimator_router(state: EstimationState) -> str:
            return "end" if state.get("error_message") else "finalize"

        for name in ("region_estimator", "country_estimator"):
            workflow.add_conditional_edges(name, estimator_router, {"finalize": "finalize", "end": END})

        workflow.add_edge("finalize", END)

        self._compiled_app = workflow.compile()
        self.graph = workflow
        logger.debug("Estimation workflow compiled")
        return self._compiled_app

    def get_compiled_app(self):
        """Get the compiled LangGraph application."""
        if not self._compiled_app:
            self.build_workflow()
        return self._compiled_app


def initial_state(
    source: str,
    method: str,
    ratio_cap: float,
    a_min: int,
    a_min_country: int,
    z: float,
    strict: bool = False,
    country: Optional[CountryInfo] = None,
    country_code: Optional[str] = None,
    scale_symptomatic: Optional[float] = None,
) -> Dict[str, Any]:
    """Fully populated starting state for one estimation run."""
    if method not in ("region", "country"):
        raise ValueError(f"Unknown estimation method: {method}")
    if method == "region" and country is None:
        raise ValueError("method=region needs a region table")
    return {
        "source": source,
        "strict": strict,
        "method": method,
        "country_code": country_code,
        "country": country,
        "ratio_cap": ratio_cap,
        "a_min": a_min,
        "a_min_country": a_min_country,
        "z": z,
        "scale_symptomatic": scale_symptomatic,
        "responses": None,
        "rejects": None,
        "filter_report": None,
        "estimates": None,
        "estimator_parameters": None,
        "next_step": "ingest",
        "error_message": None,
        "log": [],
    }


def create_pipeline() -> WorkflowBuilder:
    """
    Factory function to create a compiled estimation pipeline.

    Returns:
        WorkflowBuilder with compiled workflow
    """
    builder = WorkflowBuilder()
    builder.build_workflow()
    return builder
