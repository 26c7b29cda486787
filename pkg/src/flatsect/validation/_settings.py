from __future__ import annotations

import os
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from flatsect._connectable import Resource
from flatsect.exceptions import DomainError

THREADS_ENV = "FLATSECT_THREADS"


def threads_from_env() -> int:
    """Worker cap from FLATSECT_THREADS, the CPU count when unset."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or not raw.strip():
        return os.cpu_count() or 1

    try:
        threads = int(raw)
    except ValueError as exc:
        error_msg = f"{THREADS_ENV} must be a positive integer, got {raw!r}"
        raise DomainError(error_msg) from exc

    if threads < 1:
        error_msg = f"{THREADS_ENV} must be a positive integer, got {raw!r}"
        raise DomainError(error_msg)

    return threads


class HarnessSettings(BaseModel, Resource):
    """Knobs shared by every Monte Carlo check of a run."""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(default=42, ge=0, lt=2**64)
    n_samples: int = Field(default=100_000, ge=1)
    # sizes of the hit-probability and weighted-measure checks
    hit_samples: int = Field(default=1_000_000, ge=1)
    theorem_samples: int = Field(default=1_000_000, ge=1)
    chunks: int = Field(default=8, ge=1)
    alpha: float = Field(default=0.01, gt=0, lt=1)
    threads: int = Field(default_factory=threads_from_env, ge=1)
    calibration_trials: int = Field(default=2000, ge=1)
    tamper: bool = False

    @classmethod
    def uniform(cls, n_samples: int, **kwargs: Any) -> HarnessSettings:
        """Settings with one sample size for every check."""
        return cls(n_samples=n_samples, hit_samples=n_samples, theorem_samples=n_samples, **kwargs)
