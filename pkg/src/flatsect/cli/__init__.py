"""
Command-line front end: constants, density tables, samples and validation runs.
"""

from ._app import build_parser, main, parse_grid
from ._commands import cmd_constants, cmd_density, cmd_sample, cmd_validate
from ._config import Command, OutputFormat, RunConfig
from ._report import ReportWriter

__all__ = (
    "Command",
    "OutputFormat",
    "ReportWriter",
    "RunConfig",
    "build_parser",
    "cmd_constants",
    "cmd_density",
    "cmd_sample",
    "cmd_validate",
    "main",
    "parse_grid",
)
