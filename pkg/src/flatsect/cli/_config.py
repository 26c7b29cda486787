from __future__ import annotations

import math
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from flatsect._connectable import Resource
from flatsect.densities import DistanceFamily
from flatsect.specfun import CaseTriple
from flatsect.validation import HarnessSettings
from flatsect.validation._settings import threads_from_env


class Command(str, Enum):
    CONSTANTS = "constants"
    DENSITY = "density"
    SAMPLE = "sample"
    VALIDATE = "validate"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class RunConfig(BaseModel, Resource):
    """
    Validated options of one CLI invocation.

    The triple is optional only for `validate`, which then runs the full suite.
    """

    model_config = ConfigDict(frozen=True)

    command: Command
    n: int | None = None
    q: int | None = None
    gamma: int | None = None
    family: DistanceFamily = DistanceFamily.BALL
    h: float = Field(default=1.0, gt=0, allow_inf_nan=False)
    n_samples: int = Field(default=100_000, ge=1)
    hit_samples: int | None = Field(default=None, ge=1)
    theorem_samples: int | None = Field(default=None, ge=1)
    seed: int = Field(default=42, ge=0, lt=2**64)
    chunks: int = Field(default=8, ge=1)
    alpha: float = Field(default=0.01, gt=0, lt=1)
    output_format: OutputFormat = OutputFormat.JSON
    grid: tuple[float, ...] = ()
    out: Path | None = None
    threads: int = Field(default_factory=threads_from_env, ge=1)
    verbose: bool = False
    tamper: bool = False
    calibration_trials: int = Field(default=2000, ge=1)

    @field_validator("grid")
    @classmethod
    def _check_grid(cls, grid: tuple[float, ...]) -> tuple[float, ...]:
        for point in grid:
            if not math.isfinite(point) or point < 0:
                error_msg = f"grid points must be finite and non-negative, got {point!r}"
                raise ValueError(error_msg)

        return grid

    @model_validator(mode="after")
    def _check_case(self) -> RunConfig:
        given = [value is not None for value in (self.n, self.q, self.gamma)]

        if any(given) and not all(given):
            error_msg = "--n, --q and --gamma must be given together"
            raise ValueError(error_msg)

        if all(given):
            # raises InvalidCaseError with the constraint message
            _ = self.case
        elif self.command is not Command.VALIDATE:
            error_msg = f"the {self.command.value} command needs --n, --q and --gamma"
            raise ValueError(error_msg)

        if self.command is Command.DENSITY and not self.grid:
            error_msg = "the density command needs a nonempty --grid"
            raise ValueError(error_msg)

        return self

    @property
    def case(self) -> CaseTriple | None:
        if self.n is None or self.q is None or self.gamma is None:
            return None

        return CaseTriple(self.n, self.q, self.gamma)

    def require_case(self) -> CaseTriple:
        case = self.case
        if case is None:  # pragma: no cover
            error_msg = f"the {self.command.value} command needs a dimension triple"
            raise ValueError(error_msg)

        return case

    def harness_settings(self) -> HarnessSettings:
        """
        Settings of a `validate` run.

        An explicit `--samples` also sizes the hit-probability and weighted-measure
        checks unless `--hit-samples` or `--theorem-samples` say otherwise.
        """
        sizes: dict[str, int] = {}
        for name in ("hit_samples", "theorem_samples"):
            size = getattr(self, name)
            if size is None and "n_samples" in self.model_fields_set:
                size = self.n_samples
            if size is not None:
                sizes[name] = size

        settings = HarnessSettings(
            seed=self.seed,
            n_samples=self.n_samples,
            chunks=self.chunks,
            alpha=self.alpha,
            threads=self.threads,
            calibration_trials=self.calibration_trials,
            tamper=self.tamper,
        )
        return settings.model_copy(update=sizes)
