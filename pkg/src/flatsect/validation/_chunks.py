from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING, TypeVar

from flatsect._connectable import Resource
from flatsect.exceptions import DomainError
from flatsect.validation._settings import HarnessSettings  # noqa: TC001

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from flatsect.sampling import RandomStream

T = TypeVar("T")
R = TypeVar("R")

DEFAULT_CHUNKS = 8

logger = logging.getLogger("flatsect.validation")


class ChunkExecutor(Resource):
    """
    Runs Monte Carlo chunks on a thread pool while connected, serially otherwise.

    `map` keeps the input order, so reductions do not depend on scheduling.
    """

    def __init__(
        self,
        settings: HarnessSettings | None = None,
        logger: logging.Logger = logger,
    ):
        self.max_workers = min(settings.threads, settings.chunks) if settings else 1
        self.logger = logger
        self._pool: ThreadPoolExecutor | None = None

    @property
    def is_parallel(self) -> bool:
        return self._pool is not None

    def __connect__(self) -> None:
        if self.max_workers > 1 and self._pool is None:
            self.logger.debug("Starting %d chunk workers", self.max_workers)
            self._pool = ThreadPoolExecutor(
                max_workers=self.max_workers,
                thread_name_prefix="flatsect-chunk",
            )

    def __disconnect__(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def map(self, fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
        if self._pool is None:
            return [fn(item) for item in items]

        return list(self._pool.map(fn, items))


def chunk_sizes(n_samples: int, chunks: int) -> list[int]:
    """Split `n_samples` into `chunks` near-equal sizes, larger chunks first."""
    if n_samples < 1 or chunks < 1:
        error_msg = f"expected positive sample and chunk counts, got {n_samples} and {chunks}"
        raise DomainError(error_msg)

    base, extra = divmod(n_samples, chunks)
    return [base + (index < extra) for index in range(chunks)]


def run_chunks(
    fn: Callable[[RandomStream, int], T],
    n_samples: int,
    rng: RandomStream,
    chunks: int = DEFAULT_CHUNKS,
    executor: ChunkExecutor | None = None,
) -> list[T]:
    """
    Evaluate `fn(rng.spawn(i), size_i)` for every chunk of the layout.

    Results come back in chunk order; empty chunks are skipped.
    """
    layout = [(index, size) for index, size in enumerate(chunk_sizes(n_samples, chunks)) if size]
    executor = executor or ChunkExecutor()

    def run(item: tuple[int, int]) -> T:
        index, size = item
        return fn(rng.spawn(index), size)

    return executor.map(run, layout)
