"""
__init__.py for the tools module.

Exports the CSV readers and writers.
"""

from src.tools.csv_ingest import (
    IngestError,
    ResponseFile,
    parse_ccfr_report,
    parse_estimates,
    parse_official_series,
    parse_region_table,
    parse_responses,
    parse_serology_truth,
)
from src.tools.csv_output import (
    RunManifest,
    format_value,
    write_estimates,
    write_responses,
    write_table,
)

__all__ = [
    "IngestError",
    "ResponseFile",
    "RunManifest",
    "format_value",
    "parse_ccfr_report",
    "parse_estimates",
    "parse_official_series",
    "parse_region_table",
    "parse_responses",
    "parse_serology_truth",
    "write_estimates",
    "write_responses",
    "write_table",
]
