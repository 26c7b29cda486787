from __future__ import annotations

from types import NoneType, UnionType
from typing import Any, Union, get_args, get_origin
from typing import get_type_hints as _get_type_hints

from flatsect._connectable import ResourceProtocol


def unwrap_optional(hint: Any) -> Any:
    """
    Strip `None` from an optional type hint.

    Example:
        >>> unwrap_optional(ChunkExecutor | None)
        ChunkExecutor
        >>> unwrap_optional(int | str)
        int | str
    """
    if get_origin(hint) not in (Union, UnionType):
        return hint

    args = [arg for arg in get_args(hint) if arg is not NoneType]
    return args[0] if len(args) == 1 else hint


def safe_is_subclass(sub_cls: Any, cls: type) -> bool:
    try:
        return issubclass(sub_cls, cls)
    except TypeError:
        return False


def is_resource(obj: Any) -> bool:
    """True for resource classes and resource instances alike."""
    return safe_is_subclass(obj, ResourceProtocol) or isinstance(obj, ResourceProtocol)


def get_type_hints(obj: Any) -> dict[str, Any]:
    try:
        if isinstance(obj, type):
            return _get_type_hints(obj.__init__)

        return _get_type_hints(obj)
    except TypeError:
        return {}
