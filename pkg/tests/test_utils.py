from __future__ import annotations

import pytest
from flatsect import ResourceInjector
from flatsect.utils import inject_and_run

from tests.conftest import Sampler


def test_inject_and_run(injector: ResourceInjector) -> None:
    def main(sampler: Sampler) -> Sampler:
        assert sampler.is_ready()
        return sampler

    sampler = inject_and_run(main, injector=injector)
    assert not sampler.connected
    assert not sampler.pool.connected


def test_inject_and_run_disconnects_on_error(injector: ResourceInjector) -> None:
    seen: list[Sampler] = []

    def main(sampler: Sampler) -> None:
        seen.append(sampler)
        error_msg = "check crashed"
        raise RuntimeError(error_msg)

    with pytest.raises(RuntimeError, match="check crashed"):
        inject_and_run(main, injector=injector)

    assert not seen[0].connected


def test_inject_and_run_default_injector() -> None:
    def main(sampler: Sampler) -> int:
        return sampler.chunks

    assert inject_and_run(main) == 8
