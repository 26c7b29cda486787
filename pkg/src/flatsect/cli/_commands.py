from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any

from flatsect.cli._config import RunConfig  # noqa: TC001
from flatsect.cli._report import ReportWriter  # noqa: TC001
from flatsect.densities import DistanceFamily, RadialDensity
from flatsect.sampling import RandomStream
from flatsect.specfun import (
    d_constant,
    d_tilde_constant,
    hit_probability,
    hit_probability_asymptotic,
    kappa,
    omega,
)
from flatsect.validation import (
    CheckRecord,
    ChunkExecutor,
    case_checks,
    default_checks,
    moment_window,
    run_suite,
    sample_intersection_distances,
)
from flatsect.validation._suite import DELTA_GRID

if TYPE_CHECKING:
    from collections.abc import Callable

logger = logging.getLogger("flatsect.cli")

Row = dict[str, Any]


def cmd_constants(config: RunConfig) -> list[Row]:
    """One row with the constants of the configured triple."""
    c = config.require_case()
    ball_low, ball_high = moment_window(c, DistanceFamily.BALL)
    tangent_low, tangent_high = moment_window(c, DistanceFamily.TANGENT)

    return [
        {
            "n": c.n,
            "q": c.q,
            "gamma": c.gamma,
            "omega_n": omega(c.n),
            "kappa_n": kappa(c.n),
            "D": d_constant(c),
            "D_tilde": d_tilde_constant(c),
            "p": hit_probability(c),
            "p_asymptotic": hit_probability_asymptotic(c),
            "ball_moment_low": float(ball_low),
            "ball_moment_high": float(ball_high),
            "tangent_moment_low": float(tangent_low),
            "tangent_moment_high": float(tangent_high),
        },
    ]


def cmd_density(config: RunConfig) -> list[Row]:
    """Density and distribution function of the configured family on `--grid`."""
    law = RadialDensity(config.require_case(), config.family, config.h)
    density = law.pdf(config.grid)
    cdf = law.cdf(config.grid)

    return [
        {"x": x, "density": float(f), "cdf": float(F)}
        for x, f, F in zip(config.grid, density, cdf)
    ]


def cmd_sample(config: RunConfig, executor: ChunkExecutor | None = None) -> list[Row]:
    """Sampled distances d(o, E ∩ L) of the configured family."""
    distances = sample_intersection_distances(
        config.require_case(),
        config.family,
        config.n_samples,
        RandomStream(config.seed),
        h=config.h,
        chunks=config.chunks,
        executor=executor,
    )
    return [{"index": index, "distance": float(d)} for index, d in enumerate(distances)]


def cmd_validate(
    config: RunConfig,
    executor: ChunkExecutor | None = None,
    on_record: Callable[[CheckRecord], None] | None = None,
) -> list[CheckRecord]:
    """Full suite without a triple; the checks of that triple otherwise."""
    case = config.case
    checks = (
        default_checks()
        if case is None
        else case_checks(case, h=config.h, grid=config.grid or DELTA_GRID)
    )
    return run_suite(config.harness_settings(), executor, checks, on_record=on_record)


def run_constants(config: RunConfig, writer: ReportWriter) -> int:
    writer.write_rows(cmd_constants(config))
    return 0


def run_density(config: RunConfig, writer: ReportWriter) -> int:
    writer.write_rows(cmd_density(config))
    return 0


def run_sample(config: RunConfig, executor: ChunkExecutor, writer: ReportWriter) -> int:
    writer.write_rows(cmd_sample(config, executor))
    return 0


def run_validate(config: RunConfig, executor: ChunkExecutor, writer: ReportWriter) -> int:
    records = cmd_validate(
        config,
        executor,
        on_record=lambda record: writer.write_rows([record.to_dict()]),
    )

    failed = [record.check_id for record in records if not record.passed]
    if failed:
        logger.warning("%d of %d checks failed", len(failed), len(records))
        return 1

    logger.info("All %d checks passed", len(records))
    return 0
