from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any

import numpy as np
import numpy.typing as npt
from scipy import special, stats

from flatsect.exceptions import DegeneracyBudgetError, DomainError

if TYPE_CHECKING:
    from collections.abc import Callable

    from flatsect.sampling import RandomStream
    from flatsect.subspaces import FloatArray

SCHEMA_VERSION = 1
DEFAULT_ALPHA = 0.01
DEFAULT_SIGMAS = 3.0
# rejected degenerate draws allowed per accepted sample
DEGENERACY_BUDGET = 1e-4
# floor under the 3-sigma band when the standard error vanishes
ABSOLUTE_AGREEMENT = 1e-12


@dataclass(frozen=True)
class MCEstimate:
    value: float
    std_error: float
    n_samples: int
    seed: int
    rejected: int = 0

    def __post_init__(self) -> None:
        if not self.std_error >= 0:
            error_msg = f"standard error must be non-negative, got {self.std_error}"
            raise DomainError(error_msg)

        if self.n_samples < 1:
            error_msg = f"an estimate needs at least one sample, got {self.n_samples}"
            raise DomainError(error_msg)

        if self.rejected > DEGENERACY_BUDGET * self.n_samples:
            raise DegeneracyBudgetError(self.rejected, self.n_samples, DEGENERACY_BUDGET)

    @classmethod
    def from_samples(
        cls,
        values: FloatArray,
        seed: int,
        rejected: int = 0,
        scale: float = 1.0,
    ) -> MCEstimate:
        """Scaled sample mean with its standard error."""
        n = int(values.size)
        spread = float(np.std(values, ddof=1)) if n > 1 else 0.0
        return cls(
            value=scale * float(np.mean(values)),
            std_error=abs(scale) * spread / math.sqrt(n),
            n_samples=n,
            seed=seed,
            rejected=rejected,
        )

    def agrees_with(self, target: float, sigmas: float = DEFAULT_SIGMAS) -> bool:
        return abs(self.value - target) <= sigmas * self.std_error + ABSOLUTE_AGREEMENT * (
            1.0 + abs(target)
        )


@dataclass(frozen=True)
class PairedEstimate:
    """Monte Carlo estimate next to the closed-form value it should reproduce."""

    estimate: MCEstimate
    target: float

    @property
    def passed(self) -> bool:
        return self.estimate.agrees_with(self.target)


@dataclass(frozen=True)
class GoodnessOfFitReport:
    ks_statistic: float
    n_samples: int
    critical_value: float
    alpha: float
    passed: bool


@dataclass(frozen=True)
class ChiSquareReport:
    statistic: float
    dof: int
    p_value: float
    alpha: float
    passed: bool


@dataclass(frozen=True)
class CalibrationReport:
    rejections: int
    trials: int
    alpha: float

    @property
    def rate(self) -> float:
        return self.rejections / self.trials

    @property
    def passed(self) -> bool:
        """Observed rejection rate within [α/3, 3α]."""
        return self.alpha / 3 <= self.rate <= 3 * self.alpha


class RecordKind(Enum):
    """How a record decides pass or fail."""

    ESTIMATE = "estimate"
    KS = "ks"
    EXACT = "exact"
    BOUND = "bound"


@dataclass(frozen=True)
class CheckRecord:
    """One line of a validation report."""

    check_id: str
    statement: str
    estimate: float
    target: float
    passed: bool
    seed: int
    std_error: float | None = None
    ks: float | None = None
    rejected: int = 0
    kind: RecordKind = field(default=RecordKind.EXACT, compare=False)
    tolerance: float = field(default=1e-6, compare=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "check_id": self.check_id,
            "statement": self.statement,
            "estimate": self.estimate,
            "target": self.target,
            "std_error": self.std_error,
            "ks": self.ks,
            "pass": self.passed,
            "seed": self.seed,
            "rejected": self.rejected,
        }


def tamper_record(record: CheckRecord) -> CheckRecord:
    """
    Shift the target of `record` and decide pass again.

    Estimates and exact values get `1.5 * target + 1`; KS and bound records get a
    target no statistic can stay under.
    """
    if record.kind in (RecordKind.KS, RecordKind.BOUND):
        return dataclasses.replace(record, target=-1.0, passed=False)

    target = 1.5 * record.target + 1.0
    if record.kind is RecordKind.ESTIMATE and record.std_error is not None:
        band = DEFAULT_SIGMAS * record.std_error + ABSOLUTE_AGREEMENT * (1.0 + abs(target))
        passed = abs(record.estimate - target) <= band
    else:
        tol = record.tolerance
        passed = math.isclose(record.estimate, target, rel_tol=tol, abs_tol=tol)

    return dataclasses.replace(record, target=target, passed=passed)


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        error_msg = f"test level must lie in (0, 1), got {alpha}"
        raise DomainError(error_msg)


def _as_samples(samples: npt.ArrayLike) -> FloatArray:
    values = np.asarray(samples, dtype=np.float64).ravel()
    if values.size == 0:
        error_msg = "goodness-of-fit tests need a nonempty sample"
        raise DomainError(error_msg)

    return values


def ks_critical_value(n: float, alpha: float = DEFAULT_ALPHA) -> float:
    """Asymptotic critical value c(α)/√n, with c(0.01) ≈ 1.628."""
    _check_alpha(alpha)
    return float(special.kolmogi(alpha)) / math.sqrt(n)


def ks_test(
    samples: npt.ArrayLike,
    cdf: Callable[[FloatArray], npt.ArrayLike],
    alpha: float = DEFAULT_ALPHA,
) -> GoodnessOfFitReport:
    """
    One-sample Kolmogorov-Smirnov test against a vectorized distribution function.

    Args:
        samples (ArrayLike): Nonempty sample.
        cdf (Callable): Distribution function evaluated on arrays.
        alpha (float): Test level.

    Returns:
        GoodnessOfFitReport: The sup-distance D_n and the decision D_n < c(α)/√n.
    """
    values = _as_samples(samples)
    critical = ks_critical_value(values.size, alpha)
    result = stats.kstest(values, lambda x: np.asarray(cdf(np.asarray(x)), dtype=np.float64))
    statistic = float(result.statistic)
    return GoodnessOfFitReport(
        ks_statistic=statistic,
        n_samples=int(values.size),
        critical_value=critical,
        alpha=alpha,
        passed=statistic < critical,
    )


def ks_two_sample(
    first: npt.ArrayLike,
    second: npt.ArrayLike,
    alpha: float = DEFAULT_ALPHA,
) -> GoodnessOfFitReport:
    """Two-sample Kolmogorov-Smirnov test with effective size n₁n₂/(n₁+n₂)."""
    a, b = _as_samples(first), _as_samples(second)
    effective = a.size * b.size / (a.size + b.size)
    critical = ks_critical_value(effective, alpha)
    statistic = float(stats.ks_2samp(a, b).statistic)
    return GoodnessOfFitReport(
        ks_statistic=statistic,
        n_samples=int(effective),
        critical_value=critical,
        alpha=alpha,
        passed=statistic < critical,
    )


def chi_square_test(
    samples: npt.ArrayLike,
    cdf: Callable[[FloatArray], npt.ArrayLike],
    alpha: float = DEFAULT_ALPHA,
) -> ChiSquareReport:
    """
    Pearson chi-square test on Sturges bins over the sample range; the outer
    bins absorb the mass of the distribution beyond the range.
    """
    _check_alpha(alpha)
    values = _as_samples(samples)
    edges = np.histogram_bin_edges(values, bins="sturges")
    observed, _ = np.histogram(values, bins=edges)

    probabilities = np.asarray(cdf(edges), dtype=np.float64)
    probabilities[0], probabilities[-1] = 0.0, 1.0
    expected = values.size * np.diff(probabilities)

    mask = expected > 0
    statistic = float(np.sum((observed[mask] - expected[mask]) ** 2 / expected[mask]))
    dof = max(int(mask.sum()) - 1, 1)
    p_value = float(stats.chi2.sf(statistic, dof))
    return ChiSquareReport(
        statistic=statistic,
        dof=dof,
        p_value=p_value,
        alpha=alpha,
        passed=p_value >= alpha,
    )


def calibrate_ks(
    sampler: Callable[[RandomStream, int], FloatArray],
    cdf: Callable[[FloatArray], npt.ArrayLike],
    n_samples: int,
    rng: RandomStream,
    alpha: float = DEFAULT_ALPHA,
    trials: int = 2000,
) -> CalibrationReport:
    """
    Rejection rate of `ks_test` on synthetic samples drawn from the oracle law itself.

    Trial `i` draws from `rng.spawn(i)`.
    """
    rejections = sum(
        not ks_test(sampler(rng.spawn(trial), n_samples), cdf, alpha).passed
        for trial in range(trials)
    )
    return CalibrationReport(rejections=rejections, trials=trials, alpha=alpha)


def sample_from_cdf(
    cdf: Callable[[FloatArray], npt.ArrayLike],
    size: int,
    rng: RandomStream,
    iterations: int = 64,
) -> FloatArray:
    """
    Inverse-transform sample of a law on [0, ∞) known through its distribution function.

    The quantiles are located by vectorized bisection after doubling an upper bracket.
    """
    levels = 1.0 - rng.uniform(size)
    low = np.zeros(size)
    high = np.ones(size)

    while True:
        short = np.asarray(cdf(high), dtype=np.float64) < levels
        if not short.any():
            break
        if not np.isfinite(high).all():
            error_msg = "distribution function does not reach the sampled levels"
            raise DomainError(error_msg)
        low = np.where(short, high, low)
        high = np.where(short, 2.0 * high, high)

    for _ in range(iterations):
        middle = 0.5 * (low + high)
        below = np.asarray(cdf(middle), dtype=np.float64) < levels
        low = np.where(below, middle, low)
        high = np.where(below, high, middle)

    return high
