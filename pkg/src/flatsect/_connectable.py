from typing import Protocol, runtime_checkable


@runtime_checkable
class ResourceProtocol(Protocol):
    """
    Interface for resources owned by a run: worker pools, output streams, settings.
    The injector uses duck typing to check that a class implements the interface,
    so inheriting from this protocol is optional.

    `__connect__` acquires whatever the resource holds,
    `__disconnect__` releases it again.
    """

    def __connect__(self) -> None: ...

    def __disconnect__(self) -> None: ...


class Resource:
    """
    You can inherit from this class to make a dependency visible to the injector
    without adding these empty methods.
    """

    def __connect__(self) -> None: ...

    def __disconnect__(self) -> None: ...
