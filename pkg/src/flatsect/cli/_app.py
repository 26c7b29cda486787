from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING

from pydantic import ValidationError

from flatsect._injector import ResourceInjector
from flatsect.cli._commands import run_constants, run_density, run_sample, run_validate
from flatsect.cli._config import Command, OutputFormat, RunConfig
from flatsect.densities import DistanceFamily
from flatsect.exceptions import DomainError, FlatsectError
from flatsect.utils import inject_and_run

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

logger = logging.getLogger("flatsect.cli")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_ABORTED = 2

COMMANDS: dict[Command, Callable[..., int]] = {
    Command.CONSTANTS: run_constants,
    Command.DENSITY: run_density,
    Command.SAMPLE: run_sample,
    Command.VALIDATE: run_validate,
}

HELP = {
    Command.CONSTANTS: "print the constants of a dimension triple",
    Command.DENSITY: "tabulate the distance density and distribution function on a grid",
    Command.SAMPLE: "emit sampled intersection distances",
    Command.VALIDATE: "run the Monte Carlo and quadrature checks",
}


def parse_grid(raw: str) -> tuple[float, ...]:
    """Comma-separated grid such as `0.5,1,2`."""
    try:
        return tuple(float(point) for point in raw.split(",") if point.strip())
    except ValueError as exc:
        error_msg = f"invalid grid {raw!r}"
        raise argparse.ArgumentTypeError(error_msg) from exc


def _options() -> argparse.ArgumentParser:
    # suppressed defaults leave unset flags to RunConfig
    options = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    options.add_argument("--n", type=int, help="ambient dimension")
    options.add_argument("--q", type=int, help="dimension of the random subspace")
    options.add_argument("--gamma", type=int, help="dimension of the intersection")
    options.add_argument("--family", type=DistanceFamily, choices=list(DistanceFamily))
    options.add_argument("--h", type=float, help="radius of the ball the flats meet")
    options.add_argument("--samples", dest="n_samples", type=int)
    options.add_argument("--hit-samples", dest="hit_samples", type=int)
    options.add_argument("--theorem-samples", dest="theorem_samples", type=int)
    options.add_argument("--seed", type=int)
    options.add_argument("--chunks", type=int, help="chunk layout of the Monte Carlo runs")
    options.add_argument("--alpha", type=float, help="test level")
    options.add_argument(
        "--format",
        dest="output_format",
        type=OutputFormat,
        choices=list(OutputFormat),
    )
    options.add_argument("--grid", type=parse_grid, help="comma-separated points, e.g. 0.5,1,2")
    options.add_argument("--out", type=Path, help="write the report here instead of stdout")
    options.add_argument("--threads", type=int, help="worker threads, FLATSECT_THREADS by default")
    options.add_argument("--calibration-trials", dest="calibration_trials", type=int)
    options.add_argument("--verbose", action="store_true")
    options.add_argument(
        "--debug-tamper-targets",
        dest="tamper",
        action="store_true",
        help="shift every target so the run must fail",
    )
    return options


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatsect",
        description="Intersections of random linear subspaces with random affine flats.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    options = _options()
    for command in Command:
        subparsers.add_parser(command.value, parents=[options], help=HELP[command])

    return parser


def main(argv: Sequence[str] | None = None, injector: ResourceInjector | None = None) -> int:
    """
    Run one command and return the process exit code.

    0 on success, 1 when a validation check fails, 2 on usage and domain errors and
    when a run aborts with a harness error. Records written before the abort are kept.
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        config = RunConfig.model_validate(vars(args))
        settings = config.harness_settings()
    except (ValidationError, DomainError) as exc:
        logger.error("%s", exc)  # noqa: TRY400
        return EXIT_USAGE

    injector = injector or ResourceInjector()
    injector.register(config)
    injector.register(settings)

    try:
        return inject_and_run(COMMANDS[config.command], injector)
    except DomainError as exc:
        logger.error("%s", exc)  # noqa: TRY400
        return EXIT_USAGE
    except FlatsectError as exc:
        logger.error("Run aborted: %s", exc)  # noqa: TRY400
        return EXIT_ABORTED
