from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy import special

from flatsect.densities import DistanceFamily, RadialDensity, WeightKind, intersection_measure
from flatsect.exceptions import (
    DegeneracyBudgetError,
    DomainError,
    HarnessError,
    RefusedEstimateError,
)
from flatsect.sampling import (
    sample_ball_points,
    sample_containing_frames,
    sample_frames,
    sample_grassmannian,
    sample_sphere_points,
)
from flatsect.specfun import CaseTriple, axis_moment_constant, kappa, multiple_intersection_constant
from flatsect.subspaces import (
    DEFAULT_TOL,
    LinearSubspace,
    batch_gram_determinant,
    batch_min_norm_points,
    complement,
    subspace_determinant,
)
from flatsect.validation._chunks import DEFAULT_CHUNKS, run_chunks
from flatsect.validation._estimators import sample_intersections
from flatsect.validation._reports import (
    DEFAULT_ALPHA,
    DEGENERACY_BUDGET,
    GoodnessOfFitReport,
    MCEstimate,
    PairedEstimate,
    ks_test,
    ks_two_sample,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

    import numpy.typing as npt

    from flatsect.densities import WeightProfile
    from flatsect.sampling import RandomStream
    from flatsect.subspaces import FloatArray
    from flatsect.validation._chunks import ChunkExecutor

logger = logging.getLogger("flatsect.validation")

# substream reserved for configuration draws (random u, M), away from chunk indices
CONFIGURATION_STREAM = 2**32
# E ∩ L0 must lie in L0 up to this residual, relative to max(1, ‖x‖)
CONTAINMENT_TOL = 1e-8


def validate_lemma_axis_moment(
    n: int,
    p: int,
    q: int,
    alpha: float,
    n_samples: int,
    rng: RandomStream,
    *,
    u: npt.ArrayLike | None = None,
    m: LinearSubspace | None = None,
    chunks: int = DEFAULT_CHUNKS,
    executor: ChunkExecutor | None = None,
) -> PairedEstimate:
    """
    Monte Carlo mean of [L, M]^α over q-subspaces L containing the axis u,
    against a(n, p, q, α) [u, M]^α.

    `u` and `M` are drawn from a configuration substream of `rng` when omitted.
    """
    constant = axis_moment_constant(n, p, q, alpha)

    config = rng.spawn(CONFIGURATION_STREAM)
    axis = sample_sphere_points(n, 1, config)[0] if u is None else np.asarray(u, dtype=np.float64)
    m = m or sample_grassmannian(n, p, config)
    if axis.shape != (n,) or not np.linalg.norm(axis) > 0 or m.ambient_dim != n or m.dim != p:
        error_msg = f"expected a nonzero u in R^{n} and a {p}-dimensional M"
        raise DomainError(error_msg)

    span_u = LinearSubspace((axis / np.linalg.norm(axis))[:, None])

    def draw(stream: RandomStream, size: int) -> FloatArray:
        frames = sample_containing_frames(span_u, q, size, stream)
        return np.asarray(batch_gram_determinant(frames, m.frame) ** alpha, dtype=np.float64)

    values = np.concatenate(run_chunks(draw, n_samples, rng, chunks, executor))
    target = constant * subspace_determinant(span_u, m) ** alpha
    return PairedEstimate(MCEstimate.from_samples(values, seed=rng.seed), target)


def validate_theorem_general(
    c: CaseTriple,
    H: WeightProfile,
    delta_grid: Sequence[float],
    n_samples: int,
    rng: RandomStream,
    *,
    chunks: int = DEFAULT_CHUNKS,
    executor: ChunkExecutor | None = None,
) -> list[PairedEstimate]:
    """
    Both sides of the weighted intersection formula with test function
    f = 1{d(o, ·) <= δ}.

    E ∩ L can only come within δ of the origin when E does, so E is drawn from the
    flats meeting the radius-δ ball (mass κ_{q-γ} δ^{q-γ}) and weighted by H. Grid
    point `j` uses the substream `rng.spawn(j)`.

    Raises:
        RefusedEstimateError: for infinite or negative δ, where the flat measure
            of the support is unbounded.
    """
    pairs: list[PairedEstimate] = []
    for index, delta in enumerate(delta_grid):
        if not (0 <= delta < math.inf):
            reason = f"test function 1{{d <= {delta}}} has no compact support in the flat space"
            raise RefusedEstimateError(reason)

        if delta == 0:
            pairs.append(PairedEstimate(MCEstimate(0.0, 0.0, n_samples, rng.seed), 0.0))
            continue

        batch = sample_intersections(
            c,
            DistanceFamily.BALL,
            n_samples,
            rng.spawn(index),
            h=delta,
            chunks=chunks,
            executor=executor,
        )
        weights = H.evaluate(batch.flat_distances) * (batch.distances <= delta)
        estimate = MCEstimate.from_samples(
            weights,
            seed=rng.seed,
            rejected=batch.rejected,
            scale=kappa(c.codim) * delta**c.codim,
        )
        pairs.append(PairedEstimate(estimate, intersection_measure(c, H, delta)))

    return pairs


def validate_fixed_subspace_theorem(
    c: CaseTriple,
    L0: LinearSubspace,
    H: WeightProfile,
    n_samples: int,
    rng: RandomStream,
    *,
    alpha: float = DEFAULT_ALPHA,
    chunks: int = DEFAULT_CHUNKS,
    executor: ChunkExecutor | None = None,
) -> GoodnessOfFitReport:
    """
    KS test of d(o, E ∩ L0) with L0 held fixed against the ball law of radius h.

    Raises:
        DomainError: unless H is a ball indicator and dim L0 = q.
        HarnessError: if more intersections than the degeneracy budget leave L0
            beyond the relative containment tolerance.
    """
    if H.kind is not WeightKind.BALL_INDICATOR:
        error_msg = "the fixed-subspace law is tested with ball indicator weights"
        raise DomainError(error_msg)

    batch = sample_intersections(
        c,
        DistanceFamily.FIXED,
        n_samples,
        rng,
        l0=L0,
        h=H.h,
        chunks=chunks,
        executor=executor,
    )
    residuals = containment_residuals(batch.points, L0)
    stray = int((residuals > CONTAINMENT_TOL).sum())
    if stray > DEGENERACY_BUDGET * batch.size:
        error_msg = (
            f"{stray} of {batch.size} intersections left the fixed subspace, "
            f"largest relative residual {residuals.max():.3e}"
        )
        raise HarnessError(error_msg)

    if stray:
        logger.debug("Projected %d ill-conditioned intersections back onto L0", stray)

    distances = np.linalg.norm(project_onto(batch.points, L0), axis=1)
    return ks_test(distances, RadialDensity(c, DistanceFamily.BALL, H.h).cdf, alpha)


def containment_residuals(points: FloatArray, subspace: LinearSubspace) -> FloatArray:
    """Distance of each row of `points` to `subspace`, relative to max(1, ‖x‖)."""
    drift = np.linalg.norm(points @ complement(subspace).frame, axis=1)
    scale = np.maximum(1.0, np.linalg.norm(points, axis=1))
    return np.asarray(drift / scale, dtype=np.float64)


def project_onto(points: FloatArray, subspace: LinearSubspace) -> FloatArray:
    return np.asarray((points @ subspace.frame) @ subspace.frame.T, dtype=np.float64)


def validate_tangent_beta(
    c: CaseTriple,
    n_samples: int,
    rng: RandomStream,
    *,
    alpha: float = DEFAULT_ALPHA,
    chunks: int = DEFAULT_CHUNKS,
    executor: ChunkExecutor | None = None,
) -> GoodnessOfFitReport:
    """KS test of r⁻² for tangent flats against Beta((γ+1)/2, (n-q)/2)."""
    distances = sample_intersections(
        c, DistanceFamily.TANGENT, n_samples, rng, chunks=chunks, executor=executor
    ).distances
    a, b = (c.gamma + 1) / 2, (c.n - c.q) / 2

    def beta_cdf(x: FloatArray) -> FloatArray:
        return np.asarray(special.betainc(a, b, np.clip(x, 0.0, 1.0)), dtype=np.float64)

    return ks_test(distances**-2, beta_cdf, alpha)


@dataclass(frozen=True)
class MultipleIntersectionReport:
    case: CaseTriple
    uniformity: GoodnessOfFitReport
    crofton: PairedEstimate
    # subspace draws not in general position, left out of the uniformity sample
    rejected: int = 0

    @property
    def passed(self) -> bool:
        return self.uniformity.passed and self.crofton.passed


def _multiple_intersection_case(
    n: int,
    subspace_dims: Sequence[int],
    flat_dims: Sequence[int],
) -> CaseTriple:
    if not subspace_dims or not flat_dims:
        error_msg = "expected at least one subspace and one flat"
        raise DomainError(error_msg)

    if any(not 0 <= q <= n for q in subspace_dims) or any(not 0 <= p <= n - 1 for p in flat_dims):
        error_msg = f"dimensions out of range for n={n}: {list(subspace_dims)}, {list(flat_dims)}"
        raise DomainError(error_msg)

    q = sum(subspace_dims) - (len(subspace_dims) - 1) * n
    affine_dim = sum(flat_dims) - (len(flat_dims) - 1) * n
    if not 1 <= q <= n - 1:
        error_msg = f"subspaces {list(subspace_dims)} meet in dimension {q}, expected 1..{n - 1}"
        raise DomainError(error_msg)

    # raises InvalidCaseError when γ = affine_dim - n + q falls outside [0, q-1]
    return CaseTriple(n, q, affine_dim - n + q)


def _largest_angle_to_reference(frames: FloatArray, q: int) -> FloatArray:
    # the reference is the coordinate q-plane, so Fᵀ·frame is the leading q rows
    cosines = np.linalg.svd(frames[:, :q, :], compute_uv=False)
    return np.asarray(np.arccos(np.clip(cosines.min(axis=1), 0.0, 1.0)), dtype=np.float64)


def validate_multiple_intersections(
    n: int,
    subspace_dims: Sequence[int],
    flat_dims: Sequence[int],
    n_samples: int,
    rng: RandomStream,
    *,
    alpha: float = DEFAULT_ALPHA,
    chunks: int = DEFAULT_CHUNKS,
    executor: ChunkExecutor | None = None,
) -> MultipleIntersectionReport:
    """
    Two checks of the extension to several subspaces and flats.

    The intersection of independent uniform subspaces of dims q_1..q_ℓ is compared with
    a directly sampled uniform q-subspace (two-sample KS on the largest principal angle
    to a fixed plane). The product of the ball-restricted flat measures of dims
    p_1..p_m is checked against the telescoped Crofton constant with the test function
    vol(E_1 ∩ ... ∩ E_m ∩ Bⁿ), whose integral against the flat measure is c κ_n.
    """
    c = _multiple_intersection_case(n, subspace_dims, flat_dims)
    affine_dim = c.affine_dim

    def intersected(stream: RandomStream, size: int) -> tuple[FloatArray, int]:
        normals = np.concatenate(
            [sample_frames(n, n - dim, size, stream) for dim in subspace_dims], axis=-1
        )
        full, singular, _ = np.linalg.svd(normals, full_matrices=True)
        ok = singular.min(axis=1) > DEFAULT_TOL
        angles = _largest_angle_to_reference(full[ok][:, :, n - c.q :], c.q)
        return angles, int((~ok).sum())

    def direct(stream: RandomStream, size: int) -> FloatArray:
        return _largest_angle_to_reference(sample_frames(n, c.q, size, stream), c.q)

    drawn = run_chunks(intersected, n_samples, rng.spawn(0), chunks, executor)
    rejected = sum(count for _, count in drawn)
    if rejected > DEGENERACY_BUDGET * n_samples:
        raise DegeneracyBudgetError(rejected, n_samples, DEGENERACY_BUDGET)

    uniformity = ks_two_sample(
        np.concatenate([angles for angles, _ in drawn]),
        np.concatenate(run_chunks(direct, n_samples, rng.spawn(1), chunks, executor)),
        alpha,
    )

    def sections(stream: RandomStream, size: int) -> tuple[FloatArray, int]:
        normals = [sample_frames(n, n - p, size, stream) for p in flat_dims]
        offsets = [sample_ball_points(n - p, 1.0, size, stream) for p in flat_dims]
        points, ok = batch_min_norm_points(
            np.concatenate(normals, axis=-1), np.concatenate(offsets, axis=-1)
        )
        squared = np.sum(points[ok] ** 2, axis=1)
        volumes = np.where(
            squared < 1.0,
            kappa(affine_dim) * np.clip(1.0 - squared, 0.0, None) ** (affine_dim / 2),
            0.0,
        )
        return volumes, int((~ok).sum())

    results = run_chunks(sections, n_samples, rng.spawn(2), chunks, executor)
    mass = math.prod(kappa(n - p) for p in flat_dims)
    crofton = PairedEstimate(
        MCEstimate.from_samples(
            np.concatenate([volumes for volumes, _ in results]),
            seed=rng.seed,
            rejected=sum(rejected for _, rejected in results),
            scale=mass,
        ),
        multiple_intersection_constant(n, flat_dims, affine_dim) * kappa(n),
    )
    return MultipleIntersectionReport(c, uniformity, crofton, rejected)
