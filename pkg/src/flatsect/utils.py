from __future__ import annotations

from typing import TYPE_CHECKING, TypeVar

from flatsect._injector import ResourceInjector

if TYPE_CHECKING:
    from collections.abc import Callable


T = TypeVar("T")


def inject_and_run(
    fn: Callable[..., T],
    injector: ResourceInjector | None = None,
) -> T:
    """
    Inject the resources `fn` asks for, connect them, run `fn` and disconnect.

    Args:
        fn (Callable): The function into which resources will be injected.
        injector (ResourceInjector, optional): The injector to use.
            If not provided, a fresh injector is created.

    Returns:
        Any: The return value of `fn`.

    Raises:
        Any exceptions raised by `fn` or the injector are propagated;
        resources are disconnected in every case.
    """
    injector = injector or ResourceInjector()

    injected = injector.inject(fn)

    with injector:
        return injected()
