"""
Linear subspaces and affine flats of R^n stored as orthonormal frames,
with intersection, projection, distance and subspace-determinant operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt
import scipy.linalg

from flatsect.exceptions import DegenerateConfigurationError, DomainError, EmptyIntersectionError

if TYPE_CHECKING:
    from collections.abc import Sequence

FloatArray = npt.NDArray[np.float64]
BoolArray = npt.NDArray[np.bool_]

# relative rank tolerance of orthogonalization and null spaces
DEFAULT_TOL = 1e-9
ORTHONORMALITY_TOL = 1e-10
# residual of an inconsistent membership system, relative to 1 + |rhs|
INCONSISTENCY_TOL = 1e-7


def _frozen(array: npt.ArrayLike) -> FloatArray:
    frozen = np.array(array, dtype=np.float64)
    frozen.setflags(write=False)
    return frozen


@dataclass(frozen=True, eq=False)
class LinearSubspace:
    """
    A linear subspace of R^n given by an n×k matrix with orthonormal columns.

    The zero subspace is an n×0 frame.
    """

    frame: FloatArray

    def __post_init__(self) -> None:
        frame = _frozen(self.frame)
        if frame.ndim != 2 or frame.shape[1] > frame.shape[0]:
            error_msg = f"frame must be an n×k matrix with k <= n, got shape {frame.shape}"
            raise DomainError(error_msg)

        defect = np.linalg.norm(frame.T @ frame - np.eye(frame.shape[1]))
        if defect > ORTHONORMALITY_TOL:
            error_msg = f"frame columns are not orthonormal (defect {defect:.3e})"
            raise DomainError(error_msg)

        object.__setattr__(self, "frame", frame)

    @property
    def ambient_dim(self) -> int:
        return int(self.frame.shape[0])

    @property
    def dim(self) -> int:
        return int(self.frame.shape[1])

    @classmethod
    def zero(cls, n: int) -> LinearSubspace:
        return cls(np.zeros((n, 0)))

    @classmethod
    def full(cls, n: int) -> LinearSubspace:
        return cls(np.eye(n))

    @classmethod
    def coordinate(cls, n: int, k: int) -> LinearSubspace:
        """Span of the first `k` standard basis vectors."""
        if not 0 <= k <= n:
            error_msg = f"expected 0 <= k <= n, got n={n}, k={k}"
            raise DomainError(error_msg)

        return cls(np.eye(n)[:, :k])

    def projector(self) -> FloatArray:
        return self.frame @ self.frame.T

    def contains(self, x: npt.ArrayLike, tol: float = 1e-8) -> bool:
        vector = np.asarray(x, dtype=np.float64)
        residual = vector - project(vector, self)
        return bool(np.linalg.norm(residual) <= tol * (1.0 + np.linalg.norm(vector)))


@dataclass(frozen=True, eq=False)
class AffineFlat:
    """An affine flat `direction + foot`, where `foot` is its point closest to the origin."""

    direction: LinearSubspace
    foot: FloatArray

    def __post_init__(self) -> None:
        foot = _frozen(self.foot)
        if foot.shape != (self.direction.ambient_dim,):
            error_msg = (
                f"foot must be a vector of length {self.direction.ambient_dim}, "
                f"got shape {foot.shape}"
            )
            raise DomainError(error_msg)

        overlap = np.abs(self.direction.frame.T @ foot)
        if overlap.size and overlap.max() > ORTHONORMALITY_TOL * max(1.0, np.linalg.norm(foot)):
            error_msg = f"foot is not orthogonal to the direction (overlap {overlap.max():.3e})"
            raise DomainError(error_msg)

        object.__setattr__(self, "foot", foot)

    @classmethod
    def through(cls, direction: LinearSubspace, point: npt.ArrayLike) -> AffineFlat:
        """The flat with the given direction passing through `point`."""
        vector = np.asarray(point, dtype=np.float64)
        return cls(direction, vector - project(vector, direction))

    @classmethod
    def from_linear(cls, subspace: LinearSubspace) -> AffineFlat:
        return cls(subspace, np.zeros(subspace.ambient_dim))

    @property
    def ambient_dim(self) -> int:
        return self.direction.ambient_dim

    @property
    def dim(self) -> int:
        return self.direction.dim

    def contains(self, x: npt.ArrayLike, tol: float = 1e-8) -> bool:
        return self.direction.contains(np.asarray(x, dtype=np.float64) - self.foot, tol)


def _check_same_ambient(*subspaces: LinearSubspace) -> int:
    dims = {subspace.ambient_dim for subspace in subspaces}
    if len(dims) != 1:
        error_msg = f"subspaces live in different ambient dimensions {sorted(dims)}"
        raise DomainError(error_msg)

    return dims.pop()


def orthonormalize(columns: npt.ArrayLike, tol: float = DEFAULT_TOL) -> LinearSubspace:
    """
    Orthonormal frame of the column span.

    Householder QR with column pivoting; a direction counts when its pivot exceeds
    `tol` times the largest column norm, so rank-deficient input yields a
    lower-dimensional subspace.
    """
    matrix = np.atleast_2d(np.asarray(columns, dtype=np.float64))
    n, k = matrix.shape
    if k > n:
        error_msg = f"expected at most n={n} columns, got {k}"
        raise DomainError(error_msg)

    scale = float(np.linalg.norm(matrix, axis=0).max()) if k else 0.0
    if scale == 0.0:
        return LinearSubspace.zero(n)

    q, r, _ = scipy.linalg.qr(matrix, mode="economic", pivoting=True)
    rank = int(np.count_nonzero(np.abs(np.diag(r)) > tol * scale))
    return LinearSubspace(q[:, :rank])


def complement(L: LinearSubspace) -> LinearSubspace:
    n, k = L.ambient_dim, L.dim
    if k == 0:
        return LinearSubspace.full(n)

    q, _ = scipy.linalg.qr(L.frame, mode="full")
    return LinearSubspace(q[:, k:])


def project(x: npt.ArrayLike, L: LinearSubspace) -> FloatArray:
    """Orthogonal projection x|L."""
    vector = np.asarray(x, dtype=np.float64)
    if vector.shape[-1] != L.ambient_dim:
        error_msg = f"vector of length {vector.shape[-1]} does not live in R^{L.ambient_dim}"
        raise DomainError(error_msg)

    return np.asarray(L.frame @ (L.frame.T @ vector), dtype=np.float64)


def _null_space(matrix: FloatArray, tol: float) -> LinearSubspace:
    return LinearSubspace(scipy.linalg.null_space(matrix, rcond=tol))


def _stacked_complement_projectors(subspaces: Sequence[LinearSubspace]) -> FloatArray:
    n = subspaces[0].ambient_dim
    return np.vstack([np.eye(n) - subspace.projector() for subspace in subspaces])


def intersect_linear(
    L1: LinearSubspace,
    L2: LinearSubspace,
    tol: float = DEFAULT_TOL,
) -> LinearSubspace:
    """
    L1 ∩ L2 as the null space of the stacked complement projectors.

    Generic inputs with dim L1 + dim L2 >= n meet in dimension dim L1 + dim L2 - n.
    """
    _check_same_ambient(L1, L2)
    return _null_space(_stacked_complement_projectors([L1, L2]), tol)


def intersect_flats(flats: Sequence[AffineFlat], tol: float = DEFAULT_TOL) -> AffineFlat:
    """
    Intersection of several affine flats.

    Solves the stacked membership system by least squares and keeps the
    minimum-norm solution as the foot of the intersection.

    Raises:
        EmptyIntersectionError: if the system is inconsistent (parallel configuration).
        DegenerateConfigurationError: if the intersection dimension differs from the
            generic one, sum of dims minus (m - 1)·n.
    """
    if not flats:
        error_msg = "at least one flat is required"
        raise DomainError(error_msg)

    n = _check_same_ambient(*(flat.direction for flat in flats))
    system = _stacked_complement_projectors([flat.direction for flat in flats])
    rhs = np.concatenate([flat.foot for flat in flats])

    solution, *_ = scipy.linalg.lstsq(system, rhs)
    residual = float(np.linalg.norm(system @ solution - rhs))
    tolerance = INCONSISTENCY_TOL * (1.0 + float(np.linalg.norm(rhs)))
    if residual > tolerance:
        raise EmptyIntersectionError(residual, tolerance)

    direction = _null_space(system, tol)
    expected_dim = sum(flat.dim for flat in flats) - (len(flats) - 1) * n
    if direction.dim != max(expected_dim, 0):
        raise DegenerateConfigurationError(expected_dim, direction.dim)

    return AffineFlat.through(direction, solution)


def intersect_affine_linear(
    E: AffineFlat,
    L: LinearSubspace,
    tol: float = DEFAULT_TOL,
) -> AffineFlat:
    """E ∩ L, with dimension dim E + dim L - n for flats in general position."""
    return intersect_flats([E, AffineFlat.from_linear(L)], tol)


def distance_to_origin(E: AffineFlat) -> float:
    return float(np.linalg.norm(E.foot))


def _gram_determinant(frames: FloatArray) -> FloatArray:
    gram = np.swapaxes(frames, -1, -2) @ frames
    return np.sqrt(np.clip(np.linalg.det(gram), 0.0, 1.0))


def subspace_determinant(L: LinearSubspace, M: LinearSubspace) -> float:
    """
    Generalized sine [L, M] of two subspaces.

    For dim L + dim M <= n the volume of the parallelepiped spanned by both frames,
    otherwise [L⊥, M⊥].
    """
    n = _check_same_ambient(L, M)
    if L.dim + M.dim > n:
        return subspace_determinant(complement(L), complement(M))

    return float(_gram_determinant(np.hstack([L.frame, M.frame])))


def batch_gram_determinant(frames: FloatArray, fixed: FloatArray) -> FloatArray:
    """[L_i, M] for a stack of frames (N, n, q) against one frame (n, p), p + q <= n."""
    tiled = np.broadcast_to(fixed, (frames.shape[0], *fixed.shape))
    return _gram_determinant(np.concatenate([frames, tiled], axis=-1))


def principal_angles(L1: LinearSubspace, L2: LinearSubspace) -> FloatArray:
    """Principal angles in [0, π/2], ascending (cosines nonincreasing)."""
    _check_same_ambient(L1, L2)
    if min(L1.dim, L2.dim) == 0:
        return np.zeros(0)

    cosines = np.clip(scipy.linalg.svdvals(L1.frame.T @ L2.frame), 0.0, 1.0)
    return np.asarray(np.arccos(cosines), dtype=np.float64)


def batch_min_norm_points(
    normals: FloatArray,
    offsets: FloatArray,
    tol: float = DEFAULT_TOL,
) -> tuple[FloatArray, BoolArray]:
    """
    Minimum-norm points of a stack of flats {x : Cᵀx = z}.

    Args:
        normals (FloatArray): Normal frames C of shape (N, n, c).
        offsets (FloatArray): Right-hand sides z of shape (N, c).
        tol (float): Smallest admissible singular value of C.

    Returns:
        tuple[FloatArray, BoolArray]: Points C(CᵀC)⁻¹z of shape (N, n) and the mask of
        draws in general position; degenerate rows hold NaN.
    """
    gram = np.swapaxes(normals, -1, -2) @ normals
    if gram.shape[-1] == 0:
        return np.zeros(normals.shape[:2]), np.ones(normals.shape[0], dtype=bool)

    smallest = np.linalg.eigvalsh(gram)[:, 0]
    ok = np.sqrt(np.clip(smallest, 0.0, None)) > tol

    safe_gram = np.where(ok[:, None, None], gram, np.eye(gram.shape[-1]))
    weights = np.linalg.solve(safe_gram, offsets[..., None])
    points = (normals @ weights)[..., 0]
    points[~ok] = math.nan
    return points, ok
