"""
CSV and manifest writers.

All numeric output goes through one formatter (fixed significant digits,
'.' separator, empty cell for missing values) so reruns are byte-identical.
"""

import hashlib
import json
import logging
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import pandas as pd

from src.models.domain import EstimateResult, SurveyResponse

logger = logging.getLogger(__name__)

ESTIMATE_HEADER = ("date", "method", "point", "ci_low", "ci_high", "n_responses", "total_reach")
RESPONSE_HEADER = ("date", "country", "region", "reach", "count")


def format_value(value: Any, digits: int = 6) -> str:
    """Render one cell: floats to `digits` significant digits, None/NaN as empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return format(value, f".{digits}g")
    if hasattr(value, "isoformat"):
        return value.isoformat()
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def write_table(
    rows: Iterable[Sequence[Any]],
    header: Sequence[str],
    stream: TextIO,
    digits: int = 6,
) -> int:
    """
    Write a headered CSV table.

    Returns:
        Number of data rows written
    """
    frame = pd.DataFrame(
        [[format_value(cell, digits) for cell in row] for row in rows],
        columns=list(header),
        dtype=str,
    )
    frame.to_csv(stream, index=False, lineterminator="\n")
    return len(frame)


def estimate_rows(estimates: Iterable[EstimateResult]) -> List[Tuple[Any, ...]]:
    return [
        (e.date, e.method, e.point, e.ci_low, e.ci_high, e.n_responses, e.total_reach)
        for e in estimates
    ]


def write_estimates(estimates: Iterable[EstimateResult], stream: TextIO, digits: int = 6) -> int:
    return write_table(estimate_rows(estimates), ESTIMATE_HEADER, stream, digits)


def write_responses(responses: Iterable[SurveyResponse], stream: TextIO) -> int:
    rows = [(r.date, r.country, r.region or "", r.reach, r.count) for r in responses]
    return write_table(rows, RESPONSE_HEADER, stream)


def file_digest(path: str) -> str:
    """sha256 of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """Provenance record written next to every output file."""

    command: str
    inputs: List[Tuple[str, str]] = field(default_factory=list)
    parameters: Dict[str, Any] = field(default_factory=dict)
    tool_version: str = ""

    def add_input(self, path: Optional[str]) -> None:
        if path:
            self.inputs.append((str(path), file_digest(path)))

    def to_json(self) -> str:
        payload = asdict(self)
        payload["inputs"] = [{"path": path, "sha256": digest} for path, digest in self.inputs]
        payload["parameters"] = {key: format_value(value) for key, value in self.parameters.items()}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def atomic_write(path: str, content: str) -> None:
    """Write `content` to `path` via a temp file so failures leave no partial file."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(target.parent), prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(content)
        os.replace(tmp, target)
    except Exception:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def manifest_path(out_path: str) -> str:
    return f"{out_path}.manifest.json"
