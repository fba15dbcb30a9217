"""
__init__.py for the graph module.

Exports the pipeline state and workflow builder.
"""

from src.graph.state import EstimationState
from src.graph.workflow import WorkflowBuilder, create_pipeline, initial_state

__all__ = [
    "EstimationState",
    "WorkflowBuilder",
    "create_pipeline",
    "initial_state",
]
