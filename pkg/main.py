"""
Main application entry point for the incidence estimation toolkit.

Commands: estimate, ccfr, compare, simulate, calibrate.
Data goes to --out or stdout; diagnostics go to stderr.
"""

import argparse
import logging
import sys
from typing import List, Optional

from src.commands import cmd_calibrate, cmd_ccfr, cmd_compare, cmd_estimate, cmd_simulate

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one sub-command per pipeline."""

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="Output CSV path (default: stdout)")
    common.add_argument("--seed", type=int, help="Seed for every random draw")
    common.add_argument("--strict", action="store_true", help="Abort on the first malformed input row")
    common.add_argument("--config", help="Alternative estimation.yaml")
    common.add_argument("--verbose", action="store_true", help="Enable verbose logging")

    parser = argparse.ArgumentParser(
        description="Epidemic incidence from indirect surveys, cCFR and serology calibration"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    estimate = commands.add_parser("estimate", parents=[common], help="Survey incidence series")
    estimate.add_argument("responses", help="Responses CSV (date,country,region,reach,count)")
    estimate.add_argument("--method", choices=["region", "country"], default="region")
    estimate.add_argument("--regions", help="Region table CSV (country,region,population)")
    estimate.add_argument("--country", help="Country to estimate (ISO alpha-2)")
    estimate.add_argument("--ratio-cap", type=float, help="Maximum count/reach (default 0.3)")
    estimate.add_argument("--a-min", type=int, help="Responses per region-mode window (default 300)")
    estimate.add_argument("--amin-country", type=int, help="Responses per country-mode block (default 30)")
    estimate.add_argument("--z", type=float, help="Normal quantile for CIs (default 1.96)")
    estimate.add_argument("--scale-symptomatic", type=float, help="Divide estimates by this symptomatic fraction")
    estimate.set_defaults(handler=cmd_estimate)

    ccfr = commands.add_parser("ccfr", parents=[common], help="Delay-corrected CFR and true cases")
    ccfr.add_argument("series", help="Official series CSV (date,country,new_cases,new_deaths)")
    ccfr.add_argument("--baseline-deaths", type=int)
    ccfr.add_argument("--baseline-cases", type=int)
    ccfr.add_argument("--delay-mean", type=float)
    ccfr.add_argument("--delay-sd", type=float)
    ccfr.add_argument("--delay-horizon", type=int)
    ccfr.add_argument("--z", type=float)
    ccfr.set_defaults(handler=cmd_ccfr)

    compare = commands.add_parser("compare", parents=[common], help="Date-aligned comparison table")
    compare.add_argument("--survey", required=True, help="Output of the estimate command")
    compare.add_argument("--ccfr", required=True, help="Output of the ccfr command")
    compare.add_argument("--official", help="Official series CSV for reported cumulative cases")
    compare.add_argument("--population", type=int)
    compare.add_argument("--regions")
    compare.add_argument("--country")
    compare.add_argument("--scale-symptomatic", type=float)
    compare.add_argument("--serology-reference", type=float, help="Constant reference prevalence")
    compare.add_argument("--from", dest="date_from")
    compare.add_argument("--to", dest="date_to")
    compare.set_defaults(handler=cmd_compare)

    simulate = commands.add_parser("simulate", parents=[common], help="Synthetic responses and experiments")
    simulate.add_argument("scenario", help="Scenario YAML")
    simulate.add_argument("--n", type=int, help="Responses to draw (default: scenario)")
    simulate.add_argument("--truth", help="Write per-region truth CSV here")
    simulate.add_argument("--experiment", choices=["none", "coverage", "bias"], default="none")
    simulate.add_argument("--trials", type=int)
    simulate.add_argument("--summary", help="Write the experiment summary CSV here")
    simulate.set_defaults(handler=cmd_simulate)

    calibrate = commands.add_parser("calibrate", parents=[common], help="Serology calibration arithmetic")
    calibrate.add_argument("--raw-prevalence", type=float)
    calibrate.add_argument("--sensitivity", type=float)
    calibrate.add_argument("--specificity", type=float)
    calibrate.add_argument("--population", type=int)
    calibrate.add_argument("--deaths", type=int)
    calibrate.add_argument("--symptomatic-fraction", type=float)
    calibrate.add_argument("--responses", help="Responses CSV for the reach-error table")
    calibrate.add_argument("--regions")
    calibrate.add_argument("--country")
    calibrate.add_argument("--serology-truth", help="Regional serology CSV (region,prevalence)")
    calibrate.add_argument("--ratio-cap", type=float)
    calibrate.add_argument("--scale-symptomatic", type=float)
    calibrate.set_defaults(handler=cmd_calibrate)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""

    args = build_parser().parse_args(argv)

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    logger.info(f"Running {args.command}")
    try:
        return args.handler(args)
    except Exception as e:
        logger.error(f"{args.command} failed: {str(e)}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
