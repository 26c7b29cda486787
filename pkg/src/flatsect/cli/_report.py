from __future__ import annotations

import csv
import json
import math
import sys
from typing import TYPE_CHECKING, Any, TextIO

from flatsect._connectable import Resource
from flatsect.cli._config import OutputFormat, RunConfig
from flatsect.exceptions import HarnessError
from flatsect.validation._reports import SCHEMA_VERSION

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

CSV_DIGITS = 17


def _csv_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, f".{CSV_DIGITS}g")
    return str(value)


def _json_value(value: Any) -> Any:
    # JSON has no literal for non-finite numbers
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


class ReportWriter(Resource):
    """
    Owns the report stream: `--out` when given, stdout otherwise.

    Rows are written as JSON lines stamped with `schema_version`, or as CSV with a
    header taken from the first row written. Rows may arrive in several calls.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self._stream: TextIO | None = None
        self._owned = False
        self._csv: csv.DictWriter[str] | None = None

    def __connect__(self) -> None:
        if self.config.out is not None:
            self._stream = self.config.out.open("w", encoding="utf-8", newline="")
            self._owned = True
        else:
            self._stream = sys.stdout

    def __disconnect__(self) -> None:
        if self._stream is None:
            return

        if self._owned:
            self._stream.close()
        else:
            self._stream.flush()

        self._stream = None
        self._owned = False
        self._csv = None

    @property
    def stream(self) -> TextIO:
        if self._stream is None:
            error_msg = "report writer is not connected"
            raise HarnessError(error_msg)

        return self._stream

    def write_rows(self, rows: Sequence[Mapping[str, Any]]) -> None:
        if not rows:
            return

        if self.config.output_format is OutputFormat.CSV:
            if self._csv is None:
                self._csv = csv.DictWriter(
                    self.stream, fieldnames=list(rows[0]), lineterminator="\n"
                )
                self._csv.writeheader()

            self._csv.writerows(
                {key: _csv_value(value) for key, value in row.items()} for row in rows
            )
            return

        for row in rows:
            record: dict[str, Any] = {"schema_version": SCHEMA_VERSION}
            record.update((key, _json_value(value)) for key, value in row.items())
            self.stream.write(json.dumps(record, ensure_ascii=False) + "\n")
