"""
Tests for reach-fence and ratio-cap filtering.
"""

import numpy as np
import pytest

from src.estimators.filters import apply_filters, reach_fence
from tests.conftest import response


def test_fence_uses_linear_quartiles():
    # Q1 = 75, Q3 = 550 -> 550 + 1.5 * 475
    assert reach_fence([50, 100, 1000]) == pytest.approx(1262.5)


@pytest.mark.parametrize(
    "reaches, fence",
    [([10, 20, 30, 40, 1000], 70.0), ([5, 5, 5, 5], 5.0), ([7], 7.0)],
)
def test_fence_values(reaches, fence):
    assert reach_fence(reaches) == pytest.approx(fence)


def test_fence_matches_numpy():
    reaches = [12, 40, 41, 55, 60, 75, 90, 120, 800]
    q1, q3 = np.quantile(reaches, [0.25, 0.75])
    assert reach_fence(reaches) == pytest.approx(q3 + 1.5 * (q3 - q1))


def test_small_batch_keeps_all():
    batch = [response(50, 1), response(100, 2), response(1000, 10)]
    report = apply_filters(batch)
    assert report.kept == batch
    assert report.removed_count == 0


def test_reach_outlier_removed():
    batch = [response(r, 1) for r in (90, 100, 100, 110, 100, 95, 105)] + [response(5000, 10)]
    report = apply_filters(batch)
    assert [r.reach for r in report.removed_reach] == [5000]
    assert len(report.kept) == 7


def test_ratio_cap():
    batch = [response(100, 31), response(100, 30), response(100, 2)]
    report = apply_filters(batch, ratio_cap=0.3)
    assert [r.count for r in report.removed_ratio] == [31]
    assert [r.count for r in report.kept] == [30, 2]


def test_partition_is_complete():
    rng = np.random.default_rng(7)
    batch = [response(int(r), int(min(r, c))) for r, c in zip(rng.integers(1, 500, 200), rng.integers(0, 120, 200))]
    report = apply_filters(batch)
    assert len(report.kept) + report.removed_count == len(batch)
    assert all(r.reach <= report.reach_fence and r.ratio <= 0.3 for r in report.kept)


def test_invalid_arguments():
    with pytest.raises(ValueError, match="non-empty"):
        apply_filters([])
    with pytest.raises(ValueError, match="ratio_cap"):
        apply_filters([response(10, 1)], ratio_cap=0.0)


def test_raising_ratio_cap_never_shrinks_kept():
    rng = np.random.default_rng(19)
    reaches = rng.integers(1, 300, 150)
    batch = [response(int(r), int(rng.integers(0, r + 1))) for r in reaches]
    previous = set()
    for cap in (0.05, 0.1, 0.2, 0.3, 0.5, 1.0):
        kept = {id(r) for r in apply_filters(batch, ratio_cap=cap).kept}
        assert previous <= kept
        previous = kept
