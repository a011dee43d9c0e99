"""Command line interface."""

from __future__ import annotations

import argparse
from collections.abc import Sequence
import logging
from pathlib import Path
import sys

from .config import RunConfig, load_run_config
from .const import (
    CONF_MASTER_SEED,
    CONF_NAVIGATION,
    CONF_OUTPUT_DIR,
    CONF_PARALLELISM,
    CONF_RUN_COUNT,
    CONF_SCENARIO,
    CONF_ZONE,
    CONF_ZONES,
    DOMAIN,
)
from .exceptions import SimulationError
from .metrics import format_report
from .runner import report_from_traces, run_single, run_zone_sweep
from .seedtree import seed_table
from .traces import SEEDS_FILE, provenance, write_report, write_seed_table

_LOGGER = logging.getLogger(__name__)

# Command line options that map straight onto run configuration keys.
_OVERRIDES = {
    "master_seed": CONF_MASTER_SEED,
    "runs": CONF_RUN_COUNT,
    "scenario": CONF_SCENARIO,
    "zone": CONF_ZONE,
    "zones": CONF_ZONES,
    "navigation": CONF_NAVIGATION,
    "output_dir": CONF_OUTPUT_DIR,
    "parallelism": CONF_PARALLELISM,
}


def _key_value(text: str) -> tuple[str, str]:
    key, separator, value = text.partition("=")
    if not separator or not key.strip():
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", type=Path, help="run configuration file")
    common.add_argument(
        "--set",
        dest="overrides",
        type=_key_value,
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one run configuration key",
    )
    common.add_argument("--master-seed", type=int)
    common.add_argument("--runs", type=int, help="number of runs of the batch")
    common.add_argument("--scenario", type=int, choices=(1, 2))
    common.add_argument("--zone", help="terrain zone code")
    common.add_argument("--navigation", help="registered navigation system")
    common.add_argument("--output-dir", help="output directory")
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug"
    )

    parser = argparse.ArgumentParser(
        prog=DOMAIN,
        description="Monte Carlo bench for GNSS-denied fixed-wing UAV navigation.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    run = commands.add_parser("run", parents=[common], help="simulate a single run")
    run.add_argument("--run-index", type=int, default=1, help="1-based run index")
    batch = commands.add_parser("mc", parents=[common], help="simulate a Monte Carlo batch")
    batch.add_argument("--parallelism", type=int, help="worker processes")
    batch.add_argument("--zones", help="comma separated zones, one batch each")
    commands.add_parser("seeds", parents=[common], help="dump the seed table")
    commands.add_parser("metrics", parents=[common], help="recompute metrics from traces")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    overrides = dict(args.overrides)
    for option, key in _OVERRIDES.items():
        value = getattr(args, option, None)
        if value is not None:
            overrides[key] = str(value)
    return load_run_config(args.config, overrides)


def _run(config: RunConfig, run_index: int) -> int:
    artifacts = run_single(config, run_index)
    if artifacts.failed:
        print(f"run {run_index} failed: {artifacts.failure}", file=sys.stderr)
        return 1
    print(
        f"run {run_index}: {artifacts.truth_epochs} truth epochs,"
        f" {artifacts.estimate_epochs} navigation epochs, traces in {artifacts.directory}"
    )
    for key, metrics in artifacts.trajectory.items():
        print(
            f"  {key:<20} mean {metrics.mean:>11.4g} std {metrics.std:>11.4g}"
            f" max {metrics.max:>11.4g}"
        )
    return 0


def _monte_carlo(config: RunConfig) -> int:
    results = run_zone_sweep(config)
    for zone, result in results.items():
        print(f"zone {zone}")
        print(format_report(result.report))
    return 0


def _seeds(config: RunConfig) -> int:
    table = seed_table(config.master_seed, config.run_count)
    path = config.output_dir / SEEDS_FILE
    write_seed_table(path, table, provenance(config.master_seed, None, config.config_hash))
    print(f"{len(table)} seed sets written to {path}")
    return 0


def _metrics(config: RunConfig) -> int:
    report = report_from_traces(config)
    header = provenance(config.master_seed, None, config.config_hash)
    write_report(report, config.output_dir, header)
    print(format_report(report))
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line interface."""
    args = build_parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = _config(args)
        match args.command:
            case "run":
                return _run(config, args.run_index)
            case "mc":
                return _monte_carlo(config)
            case "seeds":
                return _seeds(config)
            case "metrics":
                return _metrics(config)
    except SimulationError as exception:
        _LOGGER.debug("Command %s failed", args.command, exc_info=True)
        print(f"{DOMAIN}: {exception}", file=sys.stderr)
        return 2
    return 0
