"""
Command implementations behind main.py.

Every command reads its inputs, computes, and writes one CSV table to --out
(atomically, with a manifest next to it) or to stdout. Commands raise on
failure; main() turns exceptions into a non-zero exit code.
"""

import io
import logging
import sys
from argparse import Namespace
from datetime import date
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

import src
from src.estimators.ccfr import ccfr_report, discretize_delay, report_row_to_estimate
from src.estimators.filters import apply_filters
from src.estimators.serology import (
    SerologyInputs,
    calibrate,
    reach_error_table,
    scale_symptomatic_to_total,
)
from src.estimators.survey import region_breakdown
from src.graph.workflow import create_pipeline, initial_state
from src.models.domain import Baseline, CountryInfo, parse_iso_date
from src.simulation.experiments import bias_experiment, coverage_experiment
from src.simulation.scenario import load_scenario
from src.simulation.world import simulate_responses
from src.tools.csv_ingest import (
    CCFR_COLUMNS,
    parse_ccfr_report,
    parse_estimates,
    parse_official_series,
    parse_region_table,
    parse_responses,
    parse_serology_truth,
)
from src.tools.csv_output import (
    RunManifest,
    atomic_write,
    manifest_path,
    write_estimates,
    write_responses,
    write_table,
)
from src.utils.settings import Settings, load_settings, shipped_region_table

logger = logging.getLogger(__name__)

CCFR_HEADER = CCFR_COLUMNS
COMPARE_HEADER = (
    "date", "survey_point", "survey_low", "survey_high",
    "ccfr_point", "ccfr_low", "ccfr_high", "official_cases", "serology_reference",
)
CALIBRATION_HEADER = ("corrected_prevalence", "infections", "ifr", "symptomatic_cases", "symptomatic_cfr")
REACH_ERROR_HEADER = ("region", "relative_reach", "relative_error")
TRUTH_HEADER = ("region", "population", "prevalence")
SUMMARY_HEADER = ("experiment", "metric", "value")


class CommandError(RuntimeError):
    """A command could not produce its output."""


def _settings(args: Namespace) -> Settings:
    return load_settings(getattr(args, "config", None))


def _pick(value: Any, default: Any) -> Any:
    return default if value is None else value


def _emit(args: Namespace, text: str, manifest: RunManifest) -> None:
    """Send a finished table to --out (plus manifest) or stdout."""
    out = getattr(args, "out", None)
    if out:
        atomic_write(out, text)
        atomic_write(manifest_path(out), manifest.to_json())
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _table(rows: Sequence[Sequence[Any]], header: Sequence[str], digits: int) -> str:
    buffer = io.StringIO()
    write_table(rows, header, buffer, digits)
    return buffer.getvalue()


def _manifest(command: str, parameters: Dict[str, Any], inputs: Sequence[Optional[str]]) -> RunManifest:
    manifest = RunManifest(command=command, parameters=dict(sorted(parameters.items())), tool_version=src.__version__)
    for path in inputs:
        manifest.add_input(path)
    return manifest


def _load_region_table(path: Optional[str], country: Optional[str]) -> Optional[CountryInfo]:
    if path is None and country is None:
        return None
    if path is None:
        path = str(shipped_region_table(country))
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return parse_region_table(handle, source=path)


def cmd_estimate(args: Namespace) -> int:
    """Survey estimate series (region-stratified or country-pooled)."""
    settings = _settings(args)
    region_table_path = args.regions
    country = None
    if args.method == "region":
        if region_table_path is None and args.country is None:
            raise CommandError("--method region needs --regions or --country")
        if region_table_path is None:
            region_table_path = str(shipped_region_table(args.country))
        country = _load_region_table(region_table_path, None)

    parameters = {
        "method": args.method,
        "ratio_cap": _pick(args.ratio_cap, settings.filter.ratio_cap),
        "a_min": _pick(args.a_min, settings.survey.a_min),
        "a_min_country": _pick(args.amin_country, settings.survey.a_min_country),
        "z": _pick(args.z, settings.survey.z),
        "strict": args.strict,
        "scale_symptomatic": args.scale_symptomatic,
    }
    state = initial_state(
        source=args.responses,
        country=country,
        country_code=args.country,
        **parameters,
    )
    result = create_pipeline().get_compiled_app().invoke(state)
    if result.get("error_message"):
        raise CommandError(result["error_message"])

    estimates = result.get("estimates") or []
    # an empty batch never reaches an estimator
    parameters.update(result.get("estimator_parameters") or {})
    buffer = io.StringIO()
    write_estimates(estimates, buffer, settings.output.significant_digits)
    text = buffer.getvalue()
    _emit(args, text, _manifest("estimate", parameters, [args.responses, region_table_path]))
    return 0


def cmd_ccfr(args: Namespace) -> int:
    """cCFR, under-reporting ratio with Ln-method CI, and implied true cases."""
    settings = _settings(args)
    parameters = {
        "baseline_deaths": _pick(args.baseline_deaths, settings.ccfr.baseline_deaths),
        "baseline_cases": _pick(args.baseline_cases, settings.ccfr.baseline_cases),
        "delay_mean": _pick(args.delay_mean, settings.ccfr.delay_mean),
        "delay_sd": _pick(args.delay_sd, settings.ccfr.delay_sd),
        "delay_horizon": _pick(args.delay_horizon, settings.ccfr.delay_horizon),
        "z": _pick(args.z, settings.survey.z),
    }
    with open(args.series, "r", encoding="utf-8", newline="") as handle:
        series = parse_official_series(handle, source=args.series)

    delay = discretize_delay(parameters["delay_mean"], parameters["delay_sd"], parameters["delay_horizon"])
    baseline = Baseline(deaths_b=parameters["baseline_deaths"], cases_b=parameters["baseline_cases"])
    rows = [
        (r.date, r.ccfr, r.ratio, r.ratio_low, r.ratio_high, r.true_cases, r.true_cases_low, r.true_cases_high)
        for r in ccfr_report(series, delay, baseline, z=parameters["z"])
    ]
    text = _table(rows, CCFR_HEADER, settings.output.significant_digits)
    _emit(args, text, _manifest("ccfr", parameters, [args.series]))
    return 0


def _population(args: Namespace) -> int:
    if args.population is not None:
        return args.population
    country = _load_region_table(args.regions, args.country)
    if country is None:
        raise CommandError("compare needs --population, --regions or --country")
    return country.population


def _in_period(day: date, start: Optional[date], end: Optional[date]) -> bool:
    return (start is None or day >= start) and (end is None or day <= end)


def cmd_compare(args: Namespace) -> int:
    """Date-aligned table of survey, cCFR and official series as population fractions."""
    settings = _settings(args)
    population = _population(args)
    fraction = args.scale_symptomatic
    start = parse_iso_date(args.date_from) if args.date_from else None
    end = parse_iso_date(args.date_to) if args.date_to else None

    with open(args.survey, "r", encoding="utf-8", newline="") as handle:
        survey = parse_estimates(handle)
    if fraction is not None:
        survey = [scale_symptomatic_to_total(e, fraction) for e in survey]
    survey_by_date = {e.date: e for e in survey}

    with open(args.ccfr, "r", encoding="utf-8", newline="") as handle:
        ccfr_rows = parse_ccfr_report(handle, source=args.ccfr)
    ccfr_by_date = {}
    for row in ccfr_rows:
        estimate = report_row_to_estimate(row, population)
        if fraction is not None:
            estimate = scale_symptomatic_to_total(estimate, fraction)
        # undefined intervals stay empty in the table
        defined = row.true_cases_low is not None and row.true_cases_high is not None
        ccfr_by_date[row.date] = [
            estimate.point,
            estimate.ci_low if defined else None,
            estimate.ci_high if defined else None,
        ]

    official_by_date = {}
    if args.official:
        with open(args.official, "r", encoding="utf-8", newline="") as handle:
            series = parse_official_series(handle, source=args.official)
        cumulative = np.cumsum([p.new_cases for p in series])
        official_by_date = {p.date: int(c) / population for p, c in zip(series, cumulative)}

    dates = sorted(d for d in set(survey_by_date) & set(ccfr_by_date) if _in_period(d, start, end))
    if not dates:
        logger.warning("Survey and cCFR series share no dates in the requested period")

    rows = []
    for day in dates:
        estimate = survey_by_date[day]
        rows.append((
            day, estimate.point, estimate.ci_low, estimate.ci_high,
            *ccfr_by_date[day],
            official_by_date.get(day),
            args.serology_reference,
        ))

    if rows:
        frame = pd.DataFrame(rows, columns=COMPARE_HEADER).drop(columns=["date"]).astype(float)
        for column, mean in frame.mean(skipna=True).items():
            if not np.isnan(mean):
                logger.info(f"Period mean {column}: {mean:.6g}")

    parameters = {
        "population": population,
        "scale_symptomatic": fraction,
        "serology_reference": args.serology_reference,
        "from": args.date_from,
        "to": args.date_to,
    }
    text = _table(rows, COMPARE_HEADER, settings.output.significant_digits)
    _emit(args, text, _manifest("compare", parameters, [args.survey, args.ccfr, args.official]))
    return 0


def cmd_simulate(args: Namespace) -> int:
    """Synthetic responses from a scenario, with optional coverage/bias experiments."""
    settings = _settings(args)
    scenario = load_scenario(args.scenario)
    seed = _pick(args.seed, scenario.seed)
    world = scenario.world(seed=seed)
    model = scenario.respondent_model()
    n = _pick(args.n, scenario.n_responses)

    responses = simulate_responses(world, model, n, scenario.survey_date)
    buffer = io.StringIO()
    write_responses(responses, buffer)

    if args.truth:
        truth_rows = [
            (info.region, info.population, world.true_prevalence[info.region]) for info in world.country.regions
        ]
        truth_rows.append(("", world.country.population, world.weighted_truth()))
        atomic_write(args.truth, _table(truth_rows, TRUTH_HEADER, settings.output.significant_digits))

    summary: List[tuple] = []
    if args.experiment == "coverage":
        trials = _pick(args.trials, 1000)
        report = coverage_experiment(world, scenario.unbiased_model(), n, trials)
        summary += [("coverage", "coverage", report.coverage), ("coverage", "failed_trials", report.failed_trials)]
    elif args.experiment == "bias":
        trials = _pick(args.trials, 500)
        report = bias_experiment(world, model, scenario.unbiased_model(), n, trials)
        summary += [
            ("bias", "biased_pooled_mae", report.biased_error),
            ("bias", "unbiased_pooled_mae", report.unbiased_error),
            ("bias", "biased_stratified_mae", report.biased_stratified_error),
            ("bias", "unbiased_stratified_mae", report.unbiased_stratified_error),
        ]
    if summary:
        summary_text = _table(summary, SUMMARY_HEADER, settings.output.significant_digits)
        if args.summary:
            atomic_write(args.summary, summary_text)
        else:
            for line in summary_text.splitlines()[1:]:
                logger.info(f"Experiment summary: {line}")

    parameters = {"seed": seed, "n": n, "experiment": args.experiment, "trials": args.trials}
    _emit(args, buffer.getvalue(), _manifest("simulate", parameters, [args.scenario]))
    return 0


def cmd_calibrate(args: Namespace) -> int:
    """Serology calibration chain, or the per-region reach-error table."""
    settings = _settings(args)
    digits = settings.output.significant_digits
    defaults = settings.serology

    if args.serology_truth:
        if not (args.responses and (args.regions or args.country)):
            raise CommandError("the reach-error table needs --responses and --regions/--country")
        country = _load_region_table(args.regions, args.country)
        with open(args.responses, "r", encoding="utf-8", newline="") as handle:
            parsed = parse_responses(handle, strict=args.strict, source=args.responses)
        regional = [r for r in parsed.rows if r.country == country.country and country.has_region(r.region)]
        if not regional:
            raise CommandError(f"no regional responses for {country.country}")
        kept = apply_filters(regional, ratio_cap=_pick(args.ratio_cap, settings.filter.ratio_cap)).kept
        by_region: Dict[str, list] = {}
        for response in kept:
            by_region.setdefault(response.region, []).append(response)
        fraction = _pick(args.scale_symptomatic, defaults.scaling_fraction)
        per_region = [(a.region, a.p_hat_i / fraction, a.reach_sum) for a in region_breakdown(by_region, country)]
        with open(args.serology_truth, "r", encoding="utf-8", newline="") as handle:
            truth = parse_serology_truth(handle)
        rows = [(r.region, r.relative_reach, r.relative_error) for r in reach_error_table(per_region, truth, country)]
        parameters = {"scale_symptomatic": fraction, "country": country.country}
        text = _table(rows, REACH_ERROR_HEADER, digits)
        _emit(args, text, _manifest("calibrate", parameters, [args.responses, args.serology_truth, args.regions]))
        return 0

    inputs = SerologyInputs(
        raw_prevalence=_pick(args.raw_prevalence, defaults.raw_prevalence),
        sensitivity=_pick(args.sensitivity, defaults.sensitivity),
        specificity=_pick(args.specificity, defaults.specificity),
        population=_pick(args.population, defaults.population),
        cum_deaths_at_lag=_pick(args.deaths, defaults.cum_deaths_at_lag),
        symptomatic_fraction=_pick(args.symptomatic_fraction, defaults.symptomatic_fraction),
    )
    result = calibrate(inputs)
    rows = [(
        result.corrected_prevalence, result.infections, result.ifr,
        result.symptomatic_cases, result.symptomatic_cfr,
    )]
    text = _table(rows, CALIBRATION_HEADER, digits)
    _emit(args, text, _manifest("calibrate", inputs.model_dump(), []))
    return 0
