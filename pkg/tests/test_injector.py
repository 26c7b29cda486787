from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Generic, TypeVar

import pytest
from flatsect import Resource, ResourceInjector
from flatsect.exceptions import WiringError

from tests.conftest import (
    BrokenStudy,
    Journal,
    PlainTable,
    Sampler,
    SamplerInterface,
    Study,
    StudyWithBindings,
    ThreadedWorkerPool,
    TrackedResource,
    WorkerPool,
)


class FlakyResource(TrackedResource):
    def __disconnect__(self) -> None:
        error_msg = "stream already closed"
        raise RuntimeError(error_msg)


def test_class_injection_success(injector: ResourceInjector) -> None:
    study = injector.inject(Study)()
    assert not study.is_ready()

    assert isinstance(study.sampler, Sampler)
    assert isinstance(study.sampler.pool, WorkerPool)
    assert isinstance(study.journal, Journal)
    assert not study.sampler.pool.connected

    injector.connect()

    assert study.connected
    assert study.sampler.connected
    assert study.sampler.pool.connected
    assert study.is_ready()

    injector.disconnect()

    assert not study.connected
    assert not study.sampler.pool.connected
    assert not study.journal.connected


def test_function_injection_success(injector: ResourceInjector) -> None:
    def run_study(study: Study, label: str = "x") -> tuple[Study, str]:
        return study, label

    injected = injector.inject(run_study)

    with injector:
        study, label = injected(label="y")
        assert study.is_ready()

    assert label == "y"
    assert not study.connected


def test_class_injection_missing_dependency(injector: ResourceInjector) -> None:
    with pytest.raises(WiringError, match="sampler"):
        injector.inject(BrokenStudy)()


def test_class_injection_with_bindings(injector: ResourceInjector) -> None:
    injector.bind({SamplerInterface: Sampler})

    study = injector.inject(StudyWithBindings)()

    assert isinstance(study.sampler, Sampler)

    with injector:
        assert study.sampler.is_ready()

    assert not study.sampler.connected


def test_resolve_returns_singletons(injector: ResourceInjector) -> None:
    get_study = injector.inject(Study)

    assert get_study() is get_study()
    assert injector.resolve(Sampler) is get_study().sampler


def test_overridden_injection(injector: ResourceInjector) -> None:
    study = injector.inject(Study)()

    with injector.override({WorkerPool: ThreadedWorkerPool}):
        overridden = injector.inject(Study)()

        assert isinstance(overridden.sampler.pool, ThreadedWorkerPool)
        assert not isinstance(study.sampler.pool, ThreadedWorkerPool)
        assert study is not overridden

    assert injector.inject(Study)() is study


def test_registered_instances_are_not_lifecycled(injector: ResourceInjector) -> None:
    pool = WorkerPool()
    injector.register(pool)

    sampler = injector.inject(Sampler)()
    assert sampler.pool is pool

    with injector:
        assert sampler.connected
        assert not pool.connected


def test_register_non_resource_as_dependency(injector: ResourceInjector) -> None:
    @dataclass
    class Report:
        table: PlainTable

    table = PlainTable()
    injector.register(table)

    assert injector.inject(Report)().table is table


def test_injector_iter_resources(injector: ResourceInjector) -> None:
    injector.inject(Study)()

    resources = [type(resource) for resource in injector.iter_resources()]
    assert resources == [WorkerPool, Sampler, Journal, Study]


def test_disconnect_failure_is_logged(
    injector: ResourceInjector,
    caplog: pytest.LogCaptureFixture,
) -> None:
    @dataclass
    class Holder:
        flaky: FlakyResource
        pool: WorkerPool

    holder = injector.inject(Holder)()

    with caplog.at_level(logging.ERROR, logger="flatsect.injector"), injector:
        assert holder.pool.connected

    assert not holder.pool.connected
    assert "Failed to disconnect FlakyResource" in caplog.text


def test_injector_with_metaclass(injector: ResourceInjector) -> None:
    class _StudyMetaClass(type):
        def __new__(cls, name: str, bases: tuple[type, ...], attrs: dict[str, Any]) -> type[Any]:
            for _ in attrs["__orig_bases__"]:
                ...

            new_type: type = super().__new__(cls, name, bases, attrs)
            return new_type

    tv = TypeVar("tv")

    class StudyGeneric(Generic[tv], metaclass=_StudyMetaClass): ...

    @dataclass(frozen=True)
    class WrappedStudy(StudyGeneric[Study]):
        sampler: Sampler
        journal: Journal | None

    assert isinstance(injector.inject(WrappedStudy)().sampler, Sampler)


def test_injector_pydantic_metaclass_doesnt_break(injector: ResourceInjector) -> None:
    from pydantic import BaseModel

    class PydanticClass(BaseModel, Resource):
        var: int = 1

    injected = injector.inject(PydanticClass)()
    assert isinstance(injected, PydanticClass)
    assert injected.var == 1
