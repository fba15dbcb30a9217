"""
Outlier removal applied to a batch of survey responses before estimation.

Two rules, in order:
1. reach above Q3 + 1.5 * IQR of the batch's reaches (quartiles by linear
   interpolation between order statistics),
2. count / reach above the ratio cap (default 0.3), applied to the survivors.

The fence is computed once over the full batch handed in.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from src.models.domain import SurveyResponse

logger = logging.getLogger(__name__)

DEFAULT_RATIO_CAP = 0.3


@dataclass
class FilterReport:
    """Partition of a batch into kept and removed responses."""

    kept: List[SurveyResponse] = field(default_factory=list)
    removed_reach: List[SurveyResponse] = field(default_factory=list)
    removed_ratio: List[SurveyResponse] = field(default_factory=list)
    reach_fence: float = float("nan")

    @property
    def removed_count(self) -> int:
        return len(self.removed_reach) + len(self.removed_ratio)


def reach_fence(reaches: Sequence[int]) -> float:
    """
    Upper outlier fence Q3 + 1.5 * (Q3 - Q1).

    Raises:
        ValueError: If reaches is empty
    """
    if len(reaches) == 0:
        raise ValueError("reach_fence needs at least one reach value")
    values = np.asarray(reaches, dtype=float)
    q1, q3 = np.quantile(values, [0.25, 0.75], method="linear")
    return float(q3 + 1.5 * (q3 - q1))


def apply_filters(responses: Sequence[SurveyResponse], ratio_cap: float = DEFAULT_RATIO_CAP) -> FilterReport:
    """
    Split responses into kept / removed-by-reach / removed-by-ratio.

    Args:
        responses: One estimation batch (typically one country)
        ratio_cap: Maximum accepted count/reach, in (0, 1]

    Returns:
        FilterReport whose three lists partition the input
    """
    if not responses:
        raise ValueError("apply_filters needs a non-empty batch")
    if not 0.0 < ratio_cap <= 1.0:
        raise ValueError(f"ratio_cap must lie in (0, 1], got {ratio_cap}")

    fence = reach_fence([r.reach for r in responses])
    report = FilterReport(reach_fence=fence)
    for response in responses:
        if response.reach > fence:
            report.removed_reach.append(response)
        elif response.count / response.reach > ratio_cap:
            report.removed_ratio.append(response)
        else:
            report.kept.append(response)

    logger.info(
        f"Filter: kept {len(report.kept)}, removed {len(report.removed_reach)} by reach "
        f"(fence {fence:.1f}), {len(report.removed_ratio)} by ratio > {ratio_cap}"
    )
    return report
