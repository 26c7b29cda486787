from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from flatsect.densities import DistanceFamily
from flatsect.exceptions import DegeneracyBudgetError, DomainError, RefusedEstimateError
from flatsect.sampling import sample_ball_points, sample_frames, sample_sphere_points
from flatsect.subspaces import LinearSubspace, batch_min_norm_points, complement
from flatsect.validation._chunks import DEFAULT_CHUNKS, run_chunks
from flatsect.validation._reports import DEGENERACY_BUDGET, MCEstimate

if TYPE_CHECKING:
    from flatsect.sampling import RandomStream
    from flatsect.specfun import CaseTriple
    from flatsect.subspaces import FloatArray
    from flatsect.validation._chunks import ChunkExecutor

logger = logging.getLogger("flatsect.validation")

# rounds of resampling before a chunk gives up on degenerate draws
MAX_RESAMPLING_ROUNDS = 8


@dataclass(frozen=True)
class IntersectionBatch:
    """
    Accepted draws of E ∩ L: minimum-norm points of the intersections
    and the distances d(o, E) of the flats themselves.
    """

    points: FloatArray
    flat_distances: FloatArray
    rejected: int = 0

    @property
    def distances(self) -> FloatArray:
        return np.asarray(np.linalg.norm(self.points, axis=1), dtype=np.float64)

    @property
    def size(self) -> int:
        return int(self.flat_distances.size)

    @classmethod
    def concatenate(cls, batches: list[IntersectionBatch]) -> IntersectionBatch:
        return cls(
            points=np.concatenate([batch.points for batch in batches]),
            flat_distances=np.concatenate([batch.flat_distances for batch in batches]),
            rejected=sum(batch.rejected for batch in batches),
        )


def _resolve_fixed_subspace(c: CaseTriple, l0: LinearSubspace | None) -> LinearSubspace:
    l0 = l0 or LinearSubspace.coordinate(c.n, c.q)
    if l0.ambient_dim != c.n or l0.dim != c.q:
        error_msg = f"the fixed subspace must be {c.q}-dimensional in R^{c.n}, got dim {l0.dim}"
        raise DomainError(error_msg)

    return l0


def _draw_round(
    c: CaseTriple,
    family: DistanceFamily,
    size: int,
    rng: RandomStream,
    h: float,
    fixed_normals: FloatArray | None,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    # E = {x : C_Eᵀx = z} with C_E spanning a uniform (q-γ)-subspace, L = ker C_Lᵀ
    flat_normals = sample_frames(c.n, c.codim, size, rng)
    if family is DistanceFamily.TANGENT:
        offsets = sample_sphere_points(c.codim, size, rng)
    else:
        offsets = sample_ball_points(c.codim, h, size, rng)

    if fixed_normals is None:
        subspace_normals = sample_frames(c.n, c.n - c.q, size, rng)
    else:
        subspace_normals = np.broadcast_to(fixed_normals, (size, *fixed_normals.shape))

    normals = np.concatenate([flat_normals, subspace_normals], axis=-1)
    rhs = np.concatenate([offsets, np.zeros((size, c.n - c.q))], axis=-1)
    points, ok = batch_min_norm_points(normals, rhs)
    flat_distances = np.linalg.norm(offsets, axis=1)
    return points[ok], flat_distances[ok], ok


def _draw_accepted(
    c: CaseTriple,
    family: DistanceFamily,
    size: int,
    rng: RandomStream,
    h: float,
    fixed_normals: FloatArray | None,
) -> IntersectionBatch:
    points: list[FloatArray] = []
    flat_distances: list[FloatArray] = []
    accepted = rejected = 0

    for _ in range(MAX_RESAMPLING_ROUNDS):
        remaining = size - accepted
        batch_points, batch_flat, ok = _draw_round(c, family, remaining, rng, h, fixed_normals)
        points.append(batch_points)
        flat_distances.append(batch_flat)
        accepted += int(ok.sum())
        rejected += int((~ok).sum())

        if rejected > DEGENERACY_BUDGET * size:
            raise DegeneracyBudgetError(rejected, size, DEGENERACY_BUDGET)

        if accepted == size:
            return IntersectionBatch(
                np.concatenate(points), np.concatenate(flat_distances), rejected
            )

    raise DegeneracyBudgetError(rejected, size, DEGENERACY_BUDGET)


def sample_intersections(
    c: CaseTriple,
    family: DistanceFamily,
    n_samples: int,
    rng: RandomStream,
    *,
    l0: LinearSubspace | None = None,
    h: float = 1.0,
    chunks: int = DEFAULT_CHUNKS,
    executor: ChunkExecutor | None = None,
) -> IntersectionBatch:
    """
    Draw `n_samples` intersections E ∩ L.

    Args:
        c (CaseTriple): Dimension triple.
        family (DistanceFamily): BALL draws E meeting the radius-h ball and a uniform L,
            TANGENT draws E at distance 1, FIXED keeps L = `l0` (the coordinate
            q-plane by default).
        n_samples (int): Number of accepted draws.
        rng (RandomStream): Root stream; chunk `i` uses `rng.spawn(i)`.
        l0 (LinearSubspace, optional): Fixed subspace of the FIXED family.
        h (float): Ball radius of the BALL and FIXED families.
        chunks (int): Chunk layout, part of the reproducibility contract.
        executor (ChunkExecutor, optional): Runs the chunks, serially by default.

    Raises:
        DegeneracyBudgetError: if degenerate draws exceed the budget.
    """
    if not (0 < h < math.inf):
        error_msg = f"h must be positive and finite, got {h}"
        raise DomainError(error_msg)

    fixed_normals = None
    if family is DistanceFamily.FIXED:
        fixed_normals = complement(_resolve_fixed_subspace(c, l0)).frame

    def draw(stream: RandomStream, size: int) -> IntersectionBatch:
        return _draw_accepted(c, family, size, stream, h, fixed_normals)

    batch = IntersectionBatch.concatenate(run_chunks(draw, n_samples, rng, chunks, executor))
    if batch.rejected:
        logger.debug("Rejected %d degenerate draws for %s", batch.rejected, c)

    return batch


def sample_intersection_distances(
    c: CaseTriple,
    family: DistanceFamily,
    n_samples: int,
    rng: RandomStream,
    *,
    l0: LinearSubspace | None = None,
    h: float = 1.0,
    chunks: int = DEFAULT_CHUNKS,
    executor: ChunkExecutor | None = None,
) -> FloatArray:
    """Distances d(o, E ∩ L) of `sample_intersections`."""
    return sample_intersections(
        c, family, n_samples, rng, l0=l0, h=h, chunks=chunks, executor=executor
    ).distances


def estimate_hit_probability(
    c: CaseTriple,
    n_samples: int,
    rng: RandomStream,
    *,
    chunks: int = DEFAULT_CHUNKS,
    executor: ChunkExecutor | None = None,
) -> MCEstimate:
    """Fraction of intersections meeting the unit ball, with error √(p̂(1-p̂)/n)."""
    batch = sample_intersections(
        c, DistanceFamily.BALL, n_samples, rng, chunks=chunks, executor=executor
    )
    hits = float(np.mean(batch.distances <= 1.0))
    return MCEstimate(
        value=hits,
        std_error=math.sqrt(hits * (1.0 - hits) / batch.size),
        n_samples=batch.size,
        seed=rng.seed,
        rejected=batch.rejected,
    )


def moment_window(c: CaseTriple, family: DistanceFamily) -> tuple[float, float]:
    """Open interval of exponents α with a finite moment E d(o, E ∩ L)^α."""
    if family is DistanceFamily.TANGENT:
        return -math.inf, c.gamma + 1

    return c.gamma - c.q, c.gamma + 1


def estimate_moment(
    c: CaseTriple,
    family: DistanceFamily,
    alpha: float,
    n_samples: int,
    rng: RandomStream,
    *,
    h: float = 1.0,
    chunks: int = DEFAULT_CHUNKS,
    executor: ChunkExecutor | None = None,
) -> MCEstimate:
    """
    Sample mean of d(o, E ∩ L)^α.

    Raises:
        RefusedEstimateError: unless 2α lies inside the finiteness window,
            i.e. unless the estimator has finite variance.
    """
    low, high = moment_window(c, family)
    if not low < 2 * alpha < high:
        reason = (
            f"E d^{2 * alpha:g} is infinite for {c} ({family.value} family, finite window "
            f"({low:g}, {high:g})); the mean would have infinite variance, "
            f"use moment_ball or moment_tangent instead"
        )
        raise RefusedEstimateError(reason)

    batch = sample_intersections(c, family, n_samples, rng, h=h, chunks=chunks, executor=executor)
    return MCEstimate.from_samples(batch.distances**alpha, seed=rng.seed, rejected=batch.rejected)
