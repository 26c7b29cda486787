from __future__ import annotations

import functools
import inspect
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from threading import Lock
from typing import TYPE_CHECKING, Any, Generic, TypeVar, cast

from flatsect._container import SingletonResourceContainer
from flatsect._utils import get_type_hints, is_resource, unwrap_optional
from flatsect.exceptions import InspectionError, WiringError

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Iterator

    from flatsect._connectable import ResourceProtocol

T = TypeVar("T")
AnyObject = TypeVar("AnyObject")

logger = logging.getLogger("flatsect.injector")


@dataclass
class Signature(Generic[AnyObject]):
    obj: AnyObject
    deps: dict[str, type] = field(default_factory=dict)
    kwargs: dict[str, type] = field(default_factory=dict)


class ResourceInjector:
    """
    Wires run resources (settings, worker pools, report writers) into functions
    and classes by their type hints, and drives their connect/disconnect lifecycle.

    Example:
        >>> injector = ResourceInjector()
        >>> injector.register(settings)
        >>> with injector:
        ...     injector.inject(run_validate)()
    """

    def __init__(
        self,
        bindings: dict[type, type] | None = None,
        logger: logging.Logger = logger,
    ):
        self.bindings = bindings or {}
        self.logger: logging.Logger = logger

        self._deps = SingletonResourceContainer()
        self._registered: dict[type, Any] = {}
        self._lock = Lock()

    def register(self, instance: Any, *, as_type: type | None = None) -> None:
        """
        Provide a ready-made instance for a type hint.

        Registered instances are owned by the caller: the injector never connects
        or disconnects them.
        """
        with self._lock:
            self._registered[as_type or type(instance)] = instance

    def resolve(self, cls: type[T]) -> T:
        """
        Return the single instance of a resource class, creating it on first use.

        Args:
            cls (type[T]): Resource class, possibly optional or bound to an implementation.

        Returns:
            T: The registered instance or the singleton built from its own dependencies.

        Raises:
            WiringError: if the class cannot be built from the resolvable dependencies.
        """
        cls = self._unwrap_type_hint(cls)

        if cls in self._registered:
            return cast(T, self._registered[cls])

        if (instance := self._deps.get(cls)) is not None:
            return instance

        signature = self.inspect(cls)
        clients = {name: self.resolve(dep) for name, dep in signature.deps.items()}

        def build() -> T:
            try:
                return cls(**clients)
            except TypeError as exc:
                raise WiringError(cls, self._missing(cls, clients)) from exc

        return self._deps.add(cls, build)

    def inject(self, obj: Callable[..., T]) -> Callable[..., T]:
        """
        Bind the resource dependencies of a function.

        Returns:
            Callable[..., T]: Partial with every resource argument filled in;
            the remaining arguments stay for the caller.
        """
        if isinstance(obj, type):
            return functools.partial(self.resolve, obj)

        signature = self.inspect(obj)
        clients = {name: self.resolve(dep) for name, dep in signature.deps.items()}

        return functools.wraps(obj)(functools.partial(obj, **clients))

    def inspect(self, obj: AnyObject) -> Signature[AnyObject]:
        try:
            hints: dict[str, Any] = get_type_hints(obj)
            hints.pop("return", None)
            if inspect.ismethod(obj):
                hints.pop("self", None)

            signature = Signature(obj)
            for name, hint_ in hints.items():
                hint = self._unwrap_type_hint(hint_)

                if hint in self._registered or is_resource(hint):
                    signature.deps[name] = hint
                else:
                    signature.kwargs[name] = hint

        except Exception as exc:
            raise InspectionError(obj) from exc

        return signature

    def connect(self) -> None:
        """
        Connect all resolved resources, dependencies first
        """
        for cls, instance in self._deps.iter_instances():
            if is_resource(instance):
                self.logger.debug("Connecting %s...", cls.__name__)
                instance.__connect__()

    def disconnect(self) -> None:
        """
        Disconnect all resolved resources in reverse order
        """
        for cls, instance in self._deps.iter_instances(reverse=True):
            if is_resource(instance):
                self.logger.debug("Disconnecting %s...", cls.__name__)
                try:
                    instance.__disconnect__()
                except Exception:
                    self.logger.exception("Failed to disconnect %s", cls.__name__)

    def __enter__(self) -> ResourceInjector:
        self.connect()
        return self

    def __exit__(self, *args: object) -> None:
        self.disconnect()

    def iter_resources(self) -> Iterable[ResourceProtocol]:
        for _, instance in self._deps.iter_instances():
            yield instance

    def bind(self, bindings: dict[type, type]) -> None:
        """
        Replace the classes used in type hints by implementations,
        e.g. `injector.bind({ChunkExecutor: SerialChunkExecutor})`.
        Existing bindings for the same keys are updated.
        """
        with self._lock:
            self.bindings = self.bindings | bindings

    @contextmanager
    def override(self, bindings: dict[type, type]) -> Iterator[None]:
        """
        Temporarily override the bindings; resources resolved inside the block
        are fresh and are dropped when it exits.
        """
        with self._lock:
            actual_deps = self._deps
            actual_bindings = self.bindings

            self._deps = SingletonResourceContainer()
            self.bindings = self.bindings | bindings

        try:
            yield
        finally:
            with self._lock:
                self._deps = actual_deps
                self.bindings = actual_bindings

    def _unwrap_type_hint(self, obj: Any) -> Any:
        obj = unwrap_optional(obj)
        return self.bindings.get(obj, obj)

    def _missing(self, cls: type, clients: dict[str, Any]) -> dict[str, Any]:
        try:
            parameters = inspect.signature(cls).parameters
        except (TypeError, ValueError):
            return {}

        hints = get_type_hints(cls)
        return {
            name: hints.get(name, param.annotation)
            for name, param in parameters.items()
            if name not in clients
            and param.default is inspect.Parameter.empty
            and param.kind not in (inspect.Parameter.VAR_POSITIONAL, inspect.Parameter.VAR_KEYWORD)
        }

    def __hash__(self) -> int:
        """Injector is always unique"""
        return id(self)
