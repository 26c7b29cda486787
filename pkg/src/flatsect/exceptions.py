from __future__ import annotations

import inspect
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from collections.abc import Callable


class FlatsectError(Exception): ...


class DomainError(FlatsectError, ValueError):
    """An argument lies outside the domain of a formula or sampler."""


class InvalidCaseError(DomainError):
    def __init__(self, n: int, q: int, gamma: int):
        self.n = n
        self.q = q
        self.gamma = gamma

    def __str__(self) -> str:
        return self._build_error_message()

    def _build_error_message(self) -> str:
        return (
            f"Invalid dimension triple (n={self.n}, q={self.q}, gamma={self.gamma}).\n"
            f"Expected n >= 2, 1 <= q <= n-1 and 0 <= gamma <= q-1"
        )


class GeometryError(FlatsectError): ...


class EmptyIntersectionError(GeometryError):
    def __init__(self, residual: float, tolerance: float):
        self.residual = residual
        self.tolerance = tolerance

    def __str__(self) -> str:
        return (
            f"Flats do not intersect: residual {self.residual:.3e} "
            f"exceeds tolerance {self.tolerance:.3e} (parallel configuration)"
        )


class DegenerateConfigurationError(GeometryError):
    def __init__(self, expected_dim: int, actual_dim: int):
        self.expected_dim = expected_dim
        self.actual_dim = actual_dim

    def __str__(self) -> str:
        return (
            f"Intersection has dimension {self.actual_dim}, "
            f"expected {self.expected_dim} for flats in general position"
        )


class HarnessError(FlatsectError): ...


class DegeneracyBudgetError(HarnessError):
    def __init__(self, rejected: int, n_samples: int, budget: float):
        self.rejected = rejected
        self.n_samples = n_samples
        self.budget = budget

    def __str__(self) -> str:
        return (
            f"Rejected {self.rejected} degenerate draws out of {self.n_samples}, "
            f"the budget is a fraction of {self.budget:g}"
        )


class RefusedEstimateError(HarnessError, ValueError):
    def __init__(self, reason: str):
        self.reason = reason

    def __str__(self) -> str:
        return f"Estimate refused: {self.reason}"


class WiringError(FlatsectError):
    def __init__(self, obj: Callable[..., Any], missing: dict[str, Any]):
        self.obj = obj
        self.missing = missing

    def __str__(self) -> str:
        return self._build_error_message()

    def _build_error_message(self) -> str:
        missing_str = "\n".join(f"{name}: {hint!r}" for name, hint in self.missing.items())
        object_location = _get_object_source_location(self.obj)

        return (
            f"Failed to wire {self.obj}. \n"
            f"{object_location}\n\n"
            f"Missing arguments:\n"
            f"{missing_str}\n\n"
            f"Hint: Did you forget to make these dependencies resources? "
            f"(Inherit from Resource, implement __connect__ and __disconnect__ "
            f"or register an instance)"
        )


class InspectionError(WiringError):
    def __init__(self, obj: Any):
        super().__init__(obj, {})

    def _build_error_message(self) -> str:
        object_location = _get_object_source_location(self.obj)

        return f"Failed to inspect {self.obj}. \n{object_location}\nSee the exception above"


def _get_object_source_location(obj: Callable[..., Any]) -> str:
    try:
        _, obj_line_number = inspect.getsourcelines(obj)
        source_file = inspect.getsourcefile(obj)
    except Exception:  # noqa: BLE001
        return ""

    return f"{source_file}:{obj_line_number}"
