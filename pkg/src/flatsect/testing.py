from __future__ import annotations

import io
import json
import logging
from typing import Any

from flatsect.cli import ReportWriter, RunConfig
from flatsect.validation import ChunkExecutor, HarnessSettings
from flatsect.validation._chunks import logger as chunk_logger


class SerialChunkExecutor(ChunkExecutor):
    """
    Executor that never starts a thread pool.

    Example:
        >>> injector = ResourceInjector()
        >>> with injector.override({ChunkExecutor: SerialChunkExecutor}):
        ...     main(["validate", "--n", "2", "--q", "1", "--gamma", "0"], injector)
    """

    def __init__(
        self,
        settings: HarnessSettings | None = None,
        logger: logging.Logger = chunk_logger,
    ):
        super().__init__(None, logger)
        self.settings = settings


class MemoryReportWriter(ReportWriter):
    """
    Report writer keeping everything in memory, for `injector.override` in tests.

    The text survives disconnect; `rows` parses JSON-lines output back.
    """

    def __init__(self, config: RunConfig):
        super().__init__(config)
        self.buffer = io.StringIO()

    def __connect__(self) -> None:
        self._stream = self.buffer
        self._owned = False

    @property
    def text(self) -> str:
        return self.buffer.getvalue()

    @property
    def rows(self) -> list[dict[str, Any]]:
        return [json.loads(line) for line in self.text.splitlines() if line]
