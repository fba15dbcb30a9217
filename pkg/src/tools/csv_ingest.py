"""
CSV readers for survey responses, official case/death series and region tables.

Every reader takes a character stream and returns validated domain objects.
Survey responses are read line by line so each reject keeps its line number;
the tabular inputs go through pandas.
"""

import csv
import logging
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, TextIO, Tuple

import pandas as pd
from pydantic import ValidationError

from src.estimators.ccfr import CcfrReportRow
from src.models.domain import (
    CountryInfo,
    EstimateResult,
    EstimationMethod,
    OfficialSeriesPoint,
    RegionInfo,
    Rejection,
    SurveyResponse,
    parse_iso_date,
    validate_response,
)

logger = logging.getLogger(__name__)

RESPONSE_COLUMNS = ("date", "country", "region", "reach", "count")
SERIES_COLUMNS = ("date", "country", "new_cases", "new_deaths")
REGION_COLUMNS = ("country", "region", "population")
TRUTH_COLUMNS = ("region", "prevalence")
ESTIMATE_COLUMNS = ("date", "method", "point", "ci_low", "ci_high", "n_responses", "total_reach")
CCFR_COLUMNS = (
    "date", "ccfr", "ratio", "ratio_low", "ratio_high",
    "true_cases", "true_cases_low", "true_cases_high",
)


class IngestError(ValueError):
    """Raised when an input file cannot be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class ResponseFile:
    """Parsed survey responses plus the lines that were rejected."""

    source: str
    rows: List[SurveyResponse] = field(default_factory=list)
    rejects: List[Tuple[int, str]] = field(default_factory=list)

    @property
    def line_count(self) -> int:
        return len(self.rows) + len(self.rejects)


def _check_header(header: List[str], expected: Tuple[str, ...], what: str) -> List[str]:
    columns = [column.strip() for column in header]
    duplicates = sorted({column for column in columns if columns.count(column) > 1})
    if duplicates:
        raise IngestError(f"duplicate header columns in {what}: {', '.join(duplicates)}", line=1)
    missing = [column for column in expected if column not in columns]
    if missing:
        raise IngestError(f"{what} header is missing columns: {', '.join(missing)}", line=1)
    return columns


def _read_frame(stream: TextIO, expected: Tuple[str, ...], what: str) -> pd.DataFrame:
    header_line = stream.readline()
    if not header_line.strip():
        raise IngestError(f"missing header in {what}")
    header = next(csv.reader([header_line]))
    columns = _check_header(header, expected, what)
    try:
        frame = pd.read_csv(
            stream,
            header=None,
            names=columns,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
        )
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=columns, dtype=str)
    except pd.errors.ParserError as e:
        raise IngestError(f"malformed {what}: {e}")
    frame = frame.fillna("")
    # physical line numbers: header is line 1
    frame.index = frame.index + 2
    return frame


def parse_responses(
    stream: TextIO,
    strict: bool = False,
    source: str = "<stream>",
    countries: Optional[FrozenSet[str]] = None,
) -> ResponseFile:
    """
    Parse a survey-response CSV (`date,country,region,reach,count`).

    Args:
        stream: UTF-8 character stream
        strict: Abort on the first malformed row instead of collecting it
        source: Name used in logs and the result
        countries: Accepted country codes (defaults to the ISO registry)

    Returns:
        ResponseFile whose rows + rejects cover every data line

    Raises:
        IngestError: Missing/duplicate header, or any bad row in strict mode
    """
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError(f"missing header in {source}")
    columns = _check_header(header, RESPONSE_COLUMNS, "responses")

    result = ResponseFile(source=source)
    for fields in reader:
        line = reader.line_num
        if len(fields) != len(columns):
            if not fields:
                outcome = Rejection(reason="empty row")
            else:
                outcome = Rejection(reason=f"expected {len(columns)} fields, got {len(fields)}")
        else:
            outcome = validate_response(dict(zip(columns, fields)), countries=countries)

        if isinstance(outcome, Rejection):
            if strict:
                raise IngestError(outcome.reason, line=line)
            result.rejects.append((line, outcome.reason))
        else:
            result.rows.append(outcome)

    logger.info(f"Parsed {len(result.rows)} responses from {source} ({len(result.rejects)} rejected)")
    return result


def parse_official_series(stream: TextIO, source: str = "<stream>") -> List[OfficialSeriesPoint]:
    """
    Parse an official series CSV (`date,country,new_cases,new_deaths`) for one country.

    Points come back sorted by date on a dense daily grid; missing days are
    filled with zero cases and deaths. Negative counts are rejected rather
    than clamped.

    Raises:
        IngestError: bad header, bad value (with line), several countries, duplicate dates
    """
    frame = _read_frame(stream, SERIES_COLUMNS, "official series")
    if frame.empty:
        logger.warning(f"Official series {source} has no rows")
        return []

    countries = sorted(set(frame["country"].str.strip().str.upper()))
    if len(countries) > 1:
        raise IngestError(f"official series mixes countries: {', '.join(countries)}")

    points = []
    for line, row in frame.iterrows():
        try:
            points.append(OfficialSeriesPoint.model_validate(
                {"date": row["date"], "new_cases": row["new_cases"], "new_deaths": row["new_deaths"]}
            ))
        except ValidationError as e:
            error = e.errors()[0]
            ctx_error = (error.get("ctx") or {}).get("error")
            raise IngestError(str(ctx_error) if ctx_error is not None else error["msg"], line=int(line))

    by_date = pd.Series([p.date for p in points], index=frame.index)
    duplicated = by_date[by_date.duplicated()]
    if not duplicated.empty:
        line = int(duplicated.index[0])
        raise IngestError(f"duplicate date {duplicated.iloc[0].isoformat()}", line=line)

    daily = pd.DataFrame(
        {"new_cases": [p.new_cases for p in points], "new_deaths": [p.new_deaths for p in points]},
        index=pd.DatetimeIndex([p.date for p in points]),
    ).sort_index()
    grid = pd.date_range(daily.index.min(), daily.index.max(), freq="D")
    filled = daily.reindex(grid, fill_value=0)
    gaps = len(grid) - len(daily)
    if gaps:
        logger.info(f"Filled {gaps} missing day(s) with zeros in {source}")

    return [
        OfficialSeriesPoint(date=stamp.date(), new_cases=int(row.new_cases), new_deaths=int(row.new_deaths))
        for stamp, row in filled.iterrows()
    ]


def parse_region_table(stream: TextIO, source: str = "<stream>") -> CountryInfo:
    """
    Parse a region table (`country,region,population`).

    The row with an empty region carries the national population.

    Raises:
        IngestError: missing national row, duplicate region, non-positive population
    """
    frame = _read_frame(stream, REGION_COLUMNS, "region table")
    frame["country"] = frame["country"].str.strip().str.upper()
    frame["region"] = frame["region"].str.strip()

    countries = sorted(set(frame["country"]))
    if len(countries) != 1:
        raise IngestError(f"region table must describe exactly one country, found {countries}")
    country = countries[0]

    populations = pd.to_numeric(frame["population"], errors="coerce")
    for line, value in populations.items():
        if pd.isna(value) or value != int(value):
            raise IngestError("population is not an integer", line=int(line))
        if value < 1:
            raise IngestError("population must be positive", line=int(line))

    national = frame[frame["region"] == ""]
    if national.empty:
        raise IngestError(f"region table for {country} has no national row")
    if len(national) > 1:
        raise IngestError("several national rows", line=int(national.index[1]))

    regional = frame[frame["region"] != ""]
    duplicated = regional[regional["region"].duplicated()]
    if not duplicated.empty:
        raise IngestError(f"duplicate region {duplicated['region'].iloc[0]}", line=int(duplicated.index[0]))

    regions = tuple(
        RegionInfo(region=row.region, country=country, population=int(populations[line]))
        for line, row in regional.iterrows()
    )
    try:
        info = CountryInfo(country=country, population=int(populations[national.index[0]]), regions=regions)
    except ValidationError as e:
        raise IngestError(str(e.errors()[0]["msg"]))
    logger.info(f"Loaded {len(regions)} regions for {country} from {source}")
    return info


def parse_serology_truth(stream: TextIO) -> List[Tuple[str, float]]:
    """Parse a `region,prevalence` table of regional seroprevalence."""
    frame = _read_frame(stream, TRUTH_COLUMNS, "serology truth")
    truth = []
    for line, row in frame.iterrows():
        try:
            prevalence = float(row["prevalence"])
        except ValueError:
            raise IngestError("prevalence is not a number", line=int(line))
        if not 0.0 <= prevalence <= 1.0:
            raise IngestError("prevalence outside [0, 1]", line=int(line))
        truth.append((row["region"].strip(), prevalence))
    return truth


def parse_estimates(stream: TextIO) -> List[EstimateResult]:
    """Read back an estimate series written by the `estimate` command."""
    frame = _read_frame(stream, ESTIMATE_COLUMNS, "estimates")
    results = []
    for line, row in frame.iterrows():
        try:
            results.append(EstimateResult(
                date=parse_iso_date(row["date"]),
                point=float(row["point"]),
                ci_low=float(row["ci_low"]),
                ci_high=float(row["ci_high"]),
                n_responses=int(row["n_responses"]),
                total_reach=int(row["total_reach"]),
                method=EstimationMethod(row["method"]),
            ))
        except ValueError as e:
            raise IngestError(str(e), line=int(line))
    return results


def _optional_float(value: str) -> Optional[float]:
    value = value.strip()
    return float(value) if value else None


def parse_ccfr_report(stream: TextIO, source: str = "<stream>") -> List[CcfrReportRow]:
    """
    Read back a report written by the `ccfr` command.

    Empty interval cells stay None; the point columns are required.

    Raises:
        IngestError: bad header, or a non-numeric or missing value (with line)
    """
    frame = _read_frame(stream, CCFR_COLUMNS, "cCFR report")
    rows = []
    for line, row in frame.iterrows():
        try:
            rows.append(CcfrReportRow(
                date=parse_iso_date(row["date"]),
                ccfr=float(row["ccfr"]),
                ratio=float(row["ratio"]),
                ratio_low=_optional_float(row["ratio_low"]),
                ratio_high=_optional_float(row["ratio_high"]),
                true_cases=float(row["true_cases"]),
                true_cases_low=_optional_float(row["true_cases_low"]),
                true_cases_high=_optional_float(row["true_cases_high"]),
            ))
        except ValueError as e:
            raise IngestError(str(e), line=int(line))
    logger.info(f"Read {len(rows)} cCFR rows from {source}")
    return rows
