from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import pytest
from flatsect import Resource, ResourceInjector
from flatsect.sampling import RandomStream
from flatsect.validation import HarnessSettings


class TrackedResource(Resource):
    connected: bool = False

    def __connect__(self) -> None:
        self.connected = True

    def __disconnect__(self) -> None:
        self.connected = False


class WorkerPool(TrackedResource): ...


class ThreadedWorkerPool(WorkerPool): ...


class Sampler(TrackedResource):
    def __init__(self, pool: WorkerPool, chunks: int = 8) -> None:
        self.pool = pool
        self.chunks = chunks

    def is_ready(self) -> bool:
        return self.connected and self.pool.connected


class Journal(TrackedResource): ...


@dataclass
class Study(TrackedResource):
    sampler: Sampler
    journal: Journal | None

    def is_ready(self) -> bool:
        assert self.journal
        return self.sampler.is_ready() and self.journal.connected


class PlainTable: ...


@dataclass
class BrokenSampler:
    table: PlainTable


@dataclass
class BrokenStudy:
    sampler: BrokenSampler


class SamplerInterface(Protocol): ...


@dataclass
class StudyWithBindings:
    sampler: SamplerInterface


@pytest.fixture()
def injector() -> ResourceInjector:
    return ResourceInjector()


@pytest.fixture()
def rng() -> RandomStream:
    return RandomStream(seed=2024)


@pytest.fixture()
def settings() -> HarnessSettings:
    return HarnessSettings.uniform(4000, seed=7, chunks=2, threads=1, calibration_trials=40)
