from __future__ import annotations

import logging
import math
from collections.abc import Sequence  # noqa: TC003
from dataclasses import dataclass
from functools import partial
from typing import TYPE_CHECKING

import numpy as np
from scipy import special

from flatsect.densities import (
    DistanceFamily,
    RadialDensity,
    WeightProfile,
    mean_tangent_limit,
    moment_ball,
    moment_tangent,
    moment_tangent_quadrature,
)
from flatsect.sampling import RandomStream
from flatsect.specfun import (
    CaseTriple,
    axis_moment_constant,
    beta_incomplete,
    d_constant,
    hit_probability,
    hit_probability_asymptotic,
    hit_probability_gamma_form,
    hit_probability_omega_form,
    hug_moment_constant,
    omega,
    pivot_constant,
)
from flatsect.subspaces import LinearSubspace
from flatsect.validation._chunks import ChunkExecutor  # noqa: TC001
from flatsect.validation._estimators import (
    estimate_hit_probability,
    estimate_moment,
    moment_window,
    sample_intersection_distances,
)
from flatsect.validation._reports import (
    CheckRecord,
    GoodnessOfFitReport,
    PairedEstimate,
    RecordKind,
    calibrate_ks,
    ks_test,
    sample_from_cdf,
    tamper_record,
)
from flatsect.validation._settings import HarnessSettings  # noqa: TC001
from flatsect.validation._theorems import (
    validate_fixed_subspace_theorem,
    validate_lemma_axis_moment,
    validate_multiple_intersections,
    validate_tangent_beta,
    validate_theorem_general,
)

if TYPE_CHECKING:
    from collections.abc import Callable

    from flatsect.subspaces import FloatArray

    CheckRunner = Callable[[RandomStream, HarnessSettings, ChunkExecutor | None], list[CheckRecord]]

logger = logging.getLogger("flatsect.validation")

HIT_CASES = ((2, 1, 0), (3, 2, 1), (3, 1, 0), (8, 5, 2), (9, 5, 3), (9, 6, 1))
TANGENT_CASES = ((2, 1, 0), (3, 1, 0), (3, 2, 1), (9, 5, 3))
FIXED_CASES = ((2, 1, 0), (3, 2, 1))
MOMENT_CASES = {(8, 5, 2): 4 / math.pi, (9, 5, 3): 16 / 15}
THEOREM_CASES = ((2, 1, 0), (3, 2, 1), (4, 2, 1))
THEOREM_RADII = (0.5, 1.0, 2.0)
DELTA_GRID = (0.25, 1.0, 2.0, 5.0)
# (n, p, q, alpha)
LEMMA_CONFIGS = (
    (3, 1, 1, 1.0),
    (3, 1, 2, 2.0),
    (3, 2, 1, 1.0),
    (4, 1, 2, 2.0),
    (4, 2, 2, 1.0),
    (4, 1, 3, 2.0),
    (4, 2, 1, 3.0),
    (5, 2, 2, 1.0),
    (5, 1, 3, 2.0),
    (5, 2, 3, 3.0),
    (5, 3, 2, 2.0),
)
# (n, subspace dims, flat dims)
MULTIPLE_CONFIGS = (
    (3, (2, 2), (2,)),
    (2, (1,), (1,)),
    (3, (2,), (2, 2)),
)
CALIBRATION_CASE = (3, 2, 1)
CALIBRATION_SAMPLE_SIZE = 200
ASYMPTOTIC_TOLERANCE = 0.02


@dataclass(frozen=True)
class Check:
    check_id: str
    statement: str
    run: CheckRunner


def _estimate_record(check_id: str, statement: str, pair: PairedEstimate) -> CheckRecord:
    return CheckRecord(
        check_id=check_id,
        statement=statement,
        estimate=pair.estimate.value,
        target=pair.target,
        passed=pair.passed,
        seed=pair.estimate.seed,
        std_error=pair.estimate.std_error,
        rejected=pair.estimate.rejected,
        kind=RecordKind.ESTIMATE,
    )


def _ks_record(
    check_id: str,
    statement: str,
    report: GoodnessOfFitReport,
    seed: int,
    rejected: int = 0,
) -> CheckRecord:
    return CheckRecord(
        check_id=check_id,
        statement=statement,
        estimate=report.ks_statistic,
        target=report.critical_value,
        passed=report.passed,
        seed=seed,
        ks=report.ks_statistic,
        rejected=rejected,
        kind=RecordKind.KS,
    )


def _exact_record(
    check_id: str,
    statement: str,
    value: float,
    target: float,
    seed: int,
    tolerance: float,
) -> CheckRecord:
    return CheckRecord(
        check_id=check_id,
        statement=statement,
        estimate=value,
        target=target,
        passed=math.isclose(value, target, rel_tol=tolerance, abs_tol=tolerance),
        seed=seed,
        kind=RecordKind.EXACT,
        tolerance=tolerance,
    )


def _bound_record(
    check_id: str,
    statement: str,
    value: float,
    bound: float,
    seed: int,
) -> CheckRecord:
    return CheckRecord(
        check_id=check_id,
        statement=statement,
        estimate=value,
        target=bound,
        passed=value <= bound,
        seed=seed,
        kind=RecordKind.BOUND,
    )


def _hit_check(triple: tuple[int, int, int]) -> Check:
    c = CaseTriple(*triple)
    check_id = f"hit_probability/{c}"
    statement = "fraction of intersections meeting the unit ball equals the hit probability"

    def run(
        rng: RandomStream,
        settings: HarnessSettings,
        executor: ChunkExecutor | None,
    ) -> list[CheckRecord]:
        estimate = estimate_hit_probability(
            c, settings.hit_samples, rng, chunks=settings.chunks, executor=executor
        )
        return [_estimate_record(check_id, statement, PairedEstimate(estimate, hit_probability(c)))]

    return Check(check_id, statement, run)


def _ball_law_check(triple: tuple[int, int, int], family: DistanceFamily, h: float = 1.0) -> Check:
    c = CaseTriple(*triple)
    check_id = f"distance_law/{family.value}/{c}"
    statement = (
        "distance of the intersection to the origin follows the ball law"
        if family is DistanceFamily.BALL
        else "the ball law persists with the subspace held fixed"
    )

    def run(
        rng: RandomStream,
        settings: HarnessSettings,
        executor: ChunkExecutor | None,
    ) -> list[CheckRecord]:
        if family is DistanceFamily.FIXED:
            report = validate_fixed_subspace_theorem(
                c,
                LinearSubspace.coordinate(c.n, c.q),
                WeightProfile.ball_indicator(h),
                settings.n_samples,
                rng,
                alpha=settings.alpha,
                chunks=settings.chunks,
                executor=executor,
            )
        else:
            distances = sample_intersection_distances(
                c, family, settings.n_samples, rng, h=h, chunks=settings.chunks, executor=executor
            )
            report = ks_test(distances, RadialDensity(c, family, h).cdf, settings.alpha)

        return [_ks_record(check_id, statement, report, rng.seed)]

    return Check(check_id, statement, run)


def _tangent_check(triple: tuple[int, int, int]) -> Check:
    c = CaseTriple(*triple)
    check_id = f"tangent_beta/{c}"
    statement = "inverse squared distance for tangent flats is beta distributed"

    def run(
        rng: RandomStream,
        settings: HarnessSettings,
        executor: ChunkExecutor | None,
    ) -> list[CheckRecord]:
        report = validate_tangent_beta(
            c,
            settings.n_samples,
            rng,
            alpha=settings.alpha,
            chunks=settings.chunks,
            executor=executor,
        )
        return [_ks_record(check_id, statement, report, rng.seed)]

    return Check(check_id, statement, run)


def _moment_check(triple: tuple[int, int, int], alpha: float = 1.0) -> Check:
    c = CaseTriple(*triple)
    check_id = f"moment/ball/{c}/{alpha:g}"
    statement = "sample mean of the distance power matches the quadrature moment"

    def run(
        rng: RandomStream,
        settings: HarnessSettings,
        executor: ChunkExecutor | None,
    ) -> list[CheckRecord]:
        estimate = estimate_moment(
            c,
            DistanceFamily.BALL,
            alpha,
            settings.n_samples,
            rng,
            chunks=settings.chunks,
            executor=executor,
        )
        pair = PairedEstimate(estimate, moment_ball(c, alpha))
        return [_estimate_record(check_id, statement, pair)]

    return Check(check_id, statement, run)


def _moment_values_check() -> Check:
    check_id = "moment/closed_forms"
    statement = "quadrature moments reproduce the tabulated means"

    def run(
        rng: RandomStream,
        settings: HarnessSettings,
        executor: ChunkExecutor | None,
    ) -> list[CheckRecord]:
        records = [
            _exact_record(
                f"{check_id}/ball/{c}",
                statement,
                moment_ball(c, 1.0),
                target,
                rng.seed,
                1e-6,
            )
            for c, target in [
                (CaseTriple(3, 2, 1), math.pi / 4),
                *((CaseTriple(*triple), value) for triple, value in MOMENT_CASES.items()),
            ]
        ]
        c = CaseTriple(3, 2, 1)
        records.append(
            _exact_record(
                f"{check_id}/tangent/{c}",
                "tangent mean by the beta identity matches quadrature of the density",
                moment_tangent(c, 1.0),
                moment_tangent_quadrature(c, 1.0),
                rng.seed,
                1e-7,
            ),
        )
        records.append(
            _exact_record(
                f"{check_id}/tangent_value/{c}",
                "tangent mean equals ω_{γ+1} ω_{n-q+γ} / (ω_γ ω_{n-q+γ+1})",
                moment_tangent(c, 1.0),
                omega(2) * omega(2) / (omega(1) * omega(3)),
                rng.seed,
                1e-10,
            ),
        )
        return records

    return Check(check_id, statement, run)


def _lemma_check(config: tuple[int, int, int, float]) -> Check:
    n, p, q, alpha = config
    check_id = f"axis_moment/n={n},p={p},q={q},alpha={alpha:g}"
    statement = "mean of [L, M]^α over subspaces through an axis equals a(n,p,q,α) [u, M]^α"

    def run(
        rng: RandomStream,
        settings: HarnessSettings,
        executor: ChunkExecutor | None,
    ) -> list[CheckRecord]:
        pair = validate_lemma_axis_moment(
            n, p, q, alpha, settings.n_samples, rng, chunks=settings.chunks, executor=executor
        )
        return [_estimate_record(check_id, statement, pair)]

    return Check(check_id, statement, run)


def _constants_check() -> Check:
    check_id = "constants"
    statement = "algebraic identities between the constants"

    def run(
        rng: RandomStream,
        settings: HarnessSettings,
        executor: ChunkExecutor | None,
    ) -> list[CheckRecord]:
        triples = [
            CaseTriple(n, q, g) for n in range(2, 13) for q in range(1, n) for g in range(q)
        ]
        pivot_error = max(abs(pivot_constant(c) / d_constant(c) - 1) for c in triples)

        forms = [CaseTriple(n, q, g) for n in range(2, 51) for q in range(1, n) for g in range(q)]
        form_error = max(
            abs(hit_probability_omega_form(c) / hit_probability_gamma_form(c) - 1) for c in forms
        )

        beta_error = max(
            abs(beta_incomplete(1.0, m / 2, k / 2) * omega(m) * omega(k) / (2 * omega(m + k)) - 1)
            for m in range(1, 21)
            for k in range(1, 21)
        )

        substitution_error = max(
            abs(axis_moment_constant(n, p, q, a) - hug_moment_constant(n - 1, n - q, n - p - 1, a))
            for n in range(3, 11)
            for p in range(1, n)
            for q in range(1, n - p + 1)
            for a in (0.0, 1.0, 2.0, 3.0)
        )

        return [
            _bound_record(
                f"{check_id}/pivot",
                "pivoted constant equals D",
                pivot_error,
                1e-10,
                rng.seed,
            ),
            _bound_record(
                f"{check_id}/hit_forms",
                "ω-form and Γ-form of the hit probability agree",
                form_error,
                1e-12,
                rng.seed,
            ),
            _bound_record(
                f"{check_id}/beta_integral",
                "B(m/2, k/2) = 2 ω_{m+k} / (ω_m ω_k)",
                beta_error,
                1e-12,
                rng.seed,
            ),
            _bound_record(
                f"{check_id}/axis_substitution",
                "axis moment constant equals the subspace moment constant one dimension down",
                substitution_error,
                1e-12,
                rng.seed,
            ),
        ]

    return Check(check_id, statement, run)


def _theorem_check(triple: tuple[int, int, int], h: float, grid: Sequence[float]) -> Check:
    c = CaseTriple(*triple)
    check_id = f"weighted_measure/{c}/h={h:g}"
    statement = "Monte Carlo measure of intersections within δ equals the weighted radial integral"

    def run(
        rng: RandomStream,
        settings: HarnessSettings,
        executor: ChunkExecutor | None,
    ) -> list[CheckRecord]:
        pairs = validate_theorem_general(
            c,
            WeightProfile.ball_indicator(h),
            grid,
            settings.theorem_samples,
            rng,
            chunks=settings.chunks,
            executor=executor,
        )
        return [
            _estimate_record(f"{check_id}/delta={delta:g}", statement, pair)
            for delta, pair in zip(grid, pairs)
        ]

    return Check(check_id, statement, run)


def _multiple_check(config: tuple[int, tuple[int, ...], tuple[int, ...]]) -> Check:
    n, subspace_dims, flat_dims = config
    check_id = f"multiple_intersections/n={n},q={list(subspace_dims)},p={list(flat_dims)}"
    statement = "intersections of uniform subspaces are uniform and flat measures telescope"

    def run(
        rng: RandomStream,
        settings: HarnessSettings,
        executor: ChunkExecutor | None,
    ) -> list[CheckRecord]:
        report = validate_multiple_intersections(
            n,
            subspace_dims,
            flat_dims,
            settings.n_samples,
            rng,
            alpha=settings.alpha,
            chunks=settings.chunks,
            executor=executor,
        )
        return [
            _ks_record(
                f"{check_id}/uniformity",
                statement,
                report.uniformity,
                rng.seed,
                report.rejected,
            ),
            _estimate_record(f"{check_id}/crofton", statement, report.crofton),
        ]

    return Check(check_id, statement, run)


def _asymptotic_check() -> Check:
    check_id = "asymptotics"
    statement = "leading terms of the hit probability and the tangent mean"

    def run(
        rng: RandomStream,
        settings: HarnessSettings,
        executor: ChunkExecutor | None,
    ) -> list[CheckRecord]:
        records = []
        for q, gamma in ((1, 0), (5, 3)):
            c = CaseTriple(1000, q, gamma)
            ratio = hit_probability(c) / hit_probability_asymptotic(c)
            records.append(
                _bound_record(
                    f"{check_id}/hit_probability/{c}",
                    statement,
                    abs(ratio - 1),
                    ASYMPTOTIC_TOLERANCE,
                    rng.seed,
                ),
            )

        c = CaseTriple(400, 2, 1)
        ratio = moment_tangent(c, 1.0) / math.sqrt(c.n) / mean_tangent_limit(c.gamma)
        records.append(
            _bound_record(
                f"{check_id}/tangent_mean/{c}",
                statement,
                abs(ratio - 1),
                ASYMPTOTIC_TOLERANCE,
                rng.seed,
            ),
        )
        return records

    return Check(check_id, statement, run)


def _beta_cdf(a: float, b: float, x: FloatArray) -> FloatArray:
    return np.asarray(special.betainc(a, b, np.clip(x, 0.0, 1.0)), dtype=np.float64)


def _calibration_check() -> Check:
    c = CaseTriple(*CALIBRATION_CASE)
    check_id = f"calibration/{c}"
    statement = "KS tests on samples from the oracle laws reject at the nominal rate"

    def run(
        rng: RandomStream,
        settings: HarnessSettings,
        executor: ChunkExecutor | None,
    ) -> list[CheckRecord]:
        ball_cdf = RadialDensity(c, DistanceFamily.BALL).cdf
        beta_cdf = partial(_beta_cdf, (c.gamma + 1) / 2, (c.n - c.q) / 2)

        records = []
        for index, (name, cdf) in enumerate((("ball", ball_cdf), ("tangent_beta", beta_cdf))):
            report = calibrate_ks(
                partial(_oracle_sample, cdf),
                cdf,
                CALIBRATION_SAMPLE_SIZE,
                rng.spawn(index),
                alpha=settings.alpha,
                trials=settings.calibration_trials,
            )
            records.append(
                CheckRecord(
                    check_id=f"{check_id}/{name}",
                    statement=statement,
                    estimate=report.rate,
                    target=report.alpha,
                    passed=report.passed,
                    seed=rng.seed,
                    kind=RecordKind.BOUND,
                ),
            )
        return records

    return Check(check_id, statement, run)


def _oracle_sample(
    cdf: Callable[[FloatArray], FloatArray],
    stream: RandomStream,
    size: int,
) -> FloatArray:
    return sample_from_cdf(cdf, size, stream)


def default_checks() -> list[Check]:
    """The full acceptance suite."""
    return [
        _constants_check(),
        *(_hit_check(triple) for triple in HIT_CASES),
        *(_ball_law_check(triple, DistanceFamily.BALL) for triple in HIT_CASES),
        *(_tangent_check(triple) for triple in TANGENT_CASES),
        *(_ball_law_check(triple, DistanceFamily.FIXED) for triple in FIXED_CASES),
        _moment_values_check(),
        *(_moment_check(triple) for triple in MOMENT_CASES),
        *(_lemma_check(config) for config in LEMMA_CONFIGS),
        *(
            _theorem_check(triple, h, DELTA_GRID)
            for triple in THEOREM_CASES
            for h in THEOREM_RADII
        ),
        *(_multiple_check(config) for config in MULTIPLE_CONFIGS),
        _asymptotic_check(),
        _calibration_check(),
    ]


def case_checks(c: CaseTriple, h: float = 1.0, grid: Sequence[float] = DELTA_GRID) -> list[Check]:
    """Checks of a single dimension triple."""
    triple = (c.n, c.q, c.gamma)
    checks = [
        _hit_check(triple),
        _ball_law_check(triple, DistanceFamily.BALL),
        _tangent_check(triple),
        _ball_law_check(triple, DistanceFamily.FIXED, h),
    ]

    low, high = moment_window(c, DistanceFamily.BALL)
    # the estimator needs a finite variance
    if low < 2.0 < high:
        checks.append(_moment_check(triple))

    if grid:
        checks.append(_theorem_check(triple, h, grid))

    return checks


def run_suite(
    settings: HarnessSettings,
    executor: ChunkExecutor | None = None,
    checks: Sequence[Check] | None = None,
    logger: logging.Logger = logger,
    on_record: Callable[[CheckRecord], None] | None = None,
) -> list[CheckRecord]:
    """
    Run the checks in order; check number `i` (from 1) draws from
    `RandomStream(settings.seed, i)`.

    `on_record` sees every record as soon as its check finishes, so the records of
    earlier checks survive an exception raised by a later one.

    With `settings.tamper` every target is shifted, which must make the run fail.
    """
    checks = default_checks() if checks is None else checks
    records: list[CheckRecord] = []

    for number, check in enumerate(checks, start=1):
        rng = RandomStream(settings.seed, number)
        logger.debug("Running %s", check.check_id)

        for record in check.run(rng, settings, executor):
            final = tamper_record(record) if settings.tamper else record
            if final.passed:
                logger.info("%s passed", final.check_id)
            else:
                logger.warning(
                    "%s failed: estimate %r, target %r",
                    final.check_id,
                    final.estimate,
                    final.target,
                )
            records.append(final)
            if on_record is not None:
                on_record(final)

    return records
