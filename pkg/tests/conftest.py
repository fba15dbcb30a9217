"""
Shared fixtures for the test suite.
"""

import io
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

import pytest

from src.models.domain import CountryInfo, OfficialSeriesPoint, RegionInfo, SurveyResponse

START = date(2020, 4, 1)
COUNTRIES = frozenset({"ES", "BR", "EC", "UA"})


def response(
    reach: int,
    count: int,
    region: Optional[str] = "A",
    day: date = START,
    country: str = "ES",
) -> SurveyResponse:
    return SurveyResponse.model_validate(
        {"date": day, "country": country, "region": region, "reach": reach, "count": count},
        context={"countries": COUNTRIES},
    )


def responses_for(region: Optional[str], pairs: Iterable[Tuple[int, int]], day: date = START) -> List[SurveyResponse]:
    return [response(reach, count, region=region, day=day) for reach, count in pairs]


def series(cases: List[int], deaths: List[int], start: date = START) -> List[OfficialSeriesPoint]:
    return [
        OfficialSeriesPoint(date=start + timedelta(days=i), new_cases=c, new_deaths=d)
        for i, (c, d) in enumerate(zip(cases, deaths))
    ]


@pytest.fixture
def two_region_country() -> CountryInfo:
    """Regions A and B with 1,000,000 people each."""
    return CountryInfo(
        country="ES",
        population=2_000_000,
        regions=(
            RegionInfo(region="A", country="ES", population=1_000_000),
            RegionInfo(region="B", country="ES", population=1_000_000),
        ),
    )


@pytest.fixture
def worked_example():
    """Region A [(100,2),(50,1)] and region B [(200,10),(100,5)]."""
    return {
        "A": responses_for("A", [(100, 2), (50, 1)]),
        "B": responses_for("B", [(200, 10), (100, 5)]),
    }


@pytest.fixture
def csv_stream():
    def _make(text: str) -> io.StringIO:
        return io.StringIO(text)

    return _make


@pytest.fixture
def write_file(tmp_path: Path):
    def _write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write
