"""
Tests for the LangGraph estimation pipeline.
"""

from datetime import date, timedelta

import pytest

from src.estimators import EstimatorFactory
from src.graph.workflow import create_pipeline, initial_state
from src.models.domain import EstimationMethod

HEADER = "date,country,region,reach,count\n"


def _responses_csv(write_file, days=3, per_region=60, extra=""):
    lines = [HEADER]
    for offset in range(days):
        day = (date(2020, 4, 1) + timedelta(days=offset)).isoformat()
        for i in range(per_region):
            lines.append(f"{day},ES,A,100,{2 + i % 3}\n")
            lines.append(f"{day},ES,B,100,{5 + i % 2}\n")
    return write_file("responses.csv", "".join(lines) + extra)


@pytest.fixture(scope="module")
def app():
    return create_pipeline().get_compiled_app()


def _state(source, method="region", country=None, **overrides):
    params = dict(ratio_cap=0.3, a_min=120, a_min_country=30, z=1.96)
    params.update(overrides)
    return initial_state(source=source, method=method, country=country, **params)


def test_region_pipeline(app, write_file, two_region_country):
    result = app.invoke(_state(_responses_csv(write_file), country=two_region_country))
    assert result["error_message"] is None
    estimates = result["estimates"]
    assert [e.date for e in estimates] == [date(2020, 4, 1), date(2020, 4, 2), date(2020, 4, 3)]
    assert all(e.method is EstimationMethod.REGION_STRATIFIED for e in estimates)
    assert result["log"][0].startswith("[INGEST]")
    assert result["log"][-1] == "[FINALIZE] 3 rows"


def test_country_pipeline(app, write_file):
    result = app.invoke(_state(_responses_csv(write_file), method="country"))
    # whole days enter a block, so each 120-response day closes one
    assert len(result["estimates"]) == 3
    assert all(e.method is EstimationMethod.COUNTRY_POOLED for e in result["estimates"])


def test_scaling_applied_last(app, write_file, two_region_country):
    source = _responses_csv(write_file)
    plain = app.invoke(_state(source, country=two_region_country))["estimates"]
    scaled = app.invoke(_state(source, country=two_region_country, scale_symptomatic=0.66))["estimates"]
    assert scaled[0].point == pytest.approx(plain[0].point / 0.66)


def test_rejects_are_collected(app, write_file, two_region_country):
    source = _responses_csv(write_file, extra="2020-04-03,ES,A,0,0\n")
    result = app.invoke(_state(source, country=two_region_country))
    assert result["error_message"] is None
    assert len(result["rejects"]) == 1


def test_strict_failure_ends_graph(app, write_file, two_region_country):
    source = _responses_csv(write_file, extra="2020-04-03,ES,A,0,0\n")
    result = app.invoke(_state(source, country=two_region_country, strict=True))
    assert "zero reach" in result["error_message"]
    assert result["estimates"] is None


def test_empty_batch_gives_no_estimates(app, write_file, two_region_country):
    result = app.invoke(_state(write_file("empty.csv", HEADER), country=two_region_country))
    assert result["error_message"] is None
    assert result["estimates"] == []


def test_country_mismatch(app, write_file, two_region_country):
    state = initial_state(
        source=_responses_csv(write_file), method="region", country=two_region_country, country_code="BR",
        ratio_cap=0.3, a_min=120, a_min_country=30, z=1.96,
    )
    assert "does not match" in app.invoke(state)["error_message"]


def test_missing_file(app, tmp_path):
    result = app.invoke(_state(str(tmp_path / "nope.csv"), method="country"))
    assert result["error_message"]


def test_initial_state_validation(two_region_country):
    with pytest.raises(ValueError, match="region table"):
        _state("x.csv", method="region")
    with pytest.raises(ValueError, match="Unknown estimation method"):
        _state("x.csv", method="bayes")


def test_registered_methods_match_graph():
    assert set(EstimatorFactory.available()) == {"region", "country"}


def test_lowercase_country_code_matches_responses(app, write_file):
    result = app.invoke(_state(_responses_csv(write_file), method="country", country_code=" es"))
    assert result["error_message"] is None
    assert len(result["estimates"]) == 3
    assert result["log"][0].startswith("[INGEST] 360 responses for ES")


def test_undecodable_file_sets_error(app, tmp_path):
    source = tmp_path / "latin1.csv"
    source.write_bytes(HEADER.encode("utf-8") + b"2020-04-01,ES,M\xff,100,3\n")
    result = app.invoke(_state(str(source), method="country"))
    assert result["error_message"]
    assert result["estimates"] is None


def test_estimator_parameters_recorded(app, write_file, two_region_country):
    result = app.invoke(_state(_responses_csv(write_file), country=two_region_country))
    assert result["estimator_parameters"] == {"method": "region", "a_min": 120, "z": 1.96, "country": "ES"}
