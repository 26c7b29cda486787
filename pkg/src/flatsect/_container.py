from __future__ import annotations

from dataclasses import dataclass
from threading import Lock
from typing import TYPE_CHECKING, Any, Generic, TypeVar

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable

T = TypeVar("T")


@dataclass(frozen=True)
class Dependency(Generic[T]):
    key: type[T]
    instance: T


class SingletonResourceContainer:
    """Keeps one instance per resource type, in creation order."""

    def __init__(self) -> None:
        self._deps: dict[type, Dependency[Any]] = {}
        self._lock: Lock = Lock()

    def add(self, key: type[T], factory: Callable[[], T]) -> T:
        with self._lock:
            if dep := self._deps.get(key):
                return dep.instance  # type: ignore[no-any-return]

        # The factory runs unlocked: it may resolve further resources
        instance = factory()

        with self._lock:
            if dep := self._deps.get(key):
                return dep.instance  # type: ignore[no-any-return]

            self._deps[key] = Dependency(key=key, instance=instance)

        return instance

    def get(self, key: type[T]) -> T | None:
        with self._lock:
            dep = self._deps.get(key)

        return dep.instance if dep else None

    def iter_instances(self, *, reverse: bool = False) -> Iterable[tuple[type, Any]]:
        with self._lock:
            deps = list(reversed(self._deps.values()) if reverse else self._deps.values())

        for dep in deps:
            yield dep.key, dep.instance
