"""
Seedable samplers for Haar rotations, uniform Grassmannians and the invariant
laws of random affine flats.

Randomness comes from `RandomStream`, a counter-based Philox generator keyed by
`(seed, stream_id)`. Gaussian variates use the Box-Muller transform of uniforms so
draws are reproducible bit for bit on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from flatsect.exceptions import DomainError
from flatsect.subspaces import AffineFlat, FloatArray, LinearSubspace, complement, orthonormalize

_UINT64_LIMIT = 2**64


@dataclass
class RandomStream:
    """
    Single-owner substream of random numbers.

    Equal `(seed, stream_id)` pairs reproduce identical sequences; concurrent
    workers take their own stream from `spawn`.
    """

    seed: int
    stream_id: int = 0
    _generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        for name, value in (("seed", self.seed), ("stream_id", self.stream_id)):
            if not 0 <= value < _UINT64_LIMIT:
                error_msg = f"{name} must be a 64-bit unsigned integer, got {value}"
                raise DomainError(error_msg)

        key = (self.stream_id << 64) | self.seed
        self._generator = np.random.Generator(np.random.Philox(key=key))

    def spawn(self, index: int) -> RandomStream:
        """Independent child stream number `index`, e.g. one per Monte Carlo chunk."""
        sequence = np.random.SeedSequence(entropy=self.stream_id, spawn_key=(index,))
        child_id = int(sequence.generate_state(1, dtype=np.uint64)[0])
        return RandomStream(self.seed, child_id)

    def uniform(self, size: int | tuple[int, ...]) -> FloatArray:
        """Uniform variates on (0, 1]."""
        return 1.0 - self._generator.random(size)

    def normal(self, size: int | tuple[int, ...]) -> FloatArray:
        shape = (size,) if isinstance(size, int) else size
        count = math.prod(shape)
        pairs = (count + 1) // 2

        radius = np.sqrt(-2.0 * np.log(self.uniform(pairs)))
        angle = 2.0 * math.pi * self._generator.random(pairs)
        variates = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
        return variates[:count].reshape(shape)


def _check_dims(n: int, k: int, *, low: int = 0, high: int | None = None) -> None:
    high = n if high is None else high
    if n < 1 or not low <= k <= high:
        error_msg = f"expected n >= 1 and {low} <= k <= {high}, got n={n}, k={k}"
        raise DomainError(error_msg)


def sample_rotation(n: int, rng: RandomStream) -> FloatArray:
    """
    Haar-distributed rotation in SO(n).

    QR of a Gaussian matrix with columns multiplied by the signs of diag(R); a
    negative determinant is fixed by flipping the first column.
    """
    if n < 1:
        error_msg = f"expected n >= 1, got {n}"
        raise DomainError(error_msg)

    q, r = np.linalg.qr(rng.normal((n, n)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs

    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]

    return np.asarray(q, dtype=np.float64)


def sample_frames(n: int, k: int, size: int, rng: RandomStream) -> FloatArray:
    """`size` orthonormal n×k frames spanning ν_k-distributed subspaces, shape (size, n, k)."""
    _check_dims(n, k)
    if k == 0:
        return np.zeros((size, n, 0))

    q, _ = np.linalg.qr(rng.normal((size, n, k)))
    return np.asarray(q, dtype=np.float64)


def sample_sphere_points(d: int, size: int, rng: RandomStream) -> FloatArray:
    """Uniform points on the unit sphere of R^d, shape (size, d)."""
    if d < 1:
        error_msg = f"expected d >= 1, got {d}"
        raise DomainError(error_msg)

    gaussian = rng.normal((size, d))
    return np.asarray(gaussian / np.linalg.norm(gaussian, axis=1, keepdims=True), dtype=np.float64)


def sample_ball_points(d: int, radius: float, size: int, rng: RandomStream) -> FloatArray:
    """Uniform points in the radius-`radius` ball of R^d, shape (size, d)."""
    if not radius > 0:
        error_msg = f"radius must be positive, got {radius}"
        raise DomainError(error_msg)

    directions = sample_sphere_points(d, size, rng)
    radii = radius * rng.uniform(size) ** (1.0 / d)
    return np.asarray(directions * radii[:, None], dtype=np.float64)


def sample_ball_uniform(d: int, radius: float, rng: RandomStream) -> FloatArray:
    return sample_ball_points(d, radius, 1, rng)[0]


def sample_grassmannian(n: int, k: int, rng: RandomStream) -> LinearSubspace:
    """ν_k-distributed subspace: the span of an n×k Gaussian matrix."""
    _check_dims(n, k)
    if k == 0:
        return LinearSubspace.zero(n)

    return orthonormalize(rng.normal((n, k)))


def sample_affine_hitting_ball(n: int, k: int, h: float, rng: RandomStream) -> AffineFlat:
    """
    k-flat from the normalized invariant measure restricted to flats meeting the
    radius-h ball: direction M ~ ν_k, foot uniform in the radius-h ball of M⊥.
    """
    _check_dims(n, k, high=n - 1)
    normal = complement(sample_grassmannian(n, k, rng))
    coords = sample_ball_uniform(n - k, h, rng)
    return AffineFlat(complement(normal), normal.frame @ coords)


def sample_affine_tangent(n: int, k: int, rng: RandomStream) -> AffineFlat:
    """k-flat M + u with M ~ ν_k and u uniform on the unit sphere of M⊥."""
    _check_dims(n, k, low=1, high=n - 1)
    normal = complement(sample_grassmannian(n, k, rng))
    coords = sample_sphere_points(n - k, 1, rng)[0]
    return AffineFlat(complement(normal), normal.frame @ coords)


def sample_containing(L0: LinearSubspace, p: int, rng: RandomStream) -> LinearSubspace:
    """
    Uniform p-dimensional subspace containing L0: L0 plus a uniform
    (p - dim L0)-subspace of L0⊥.
    """
    n, dim = L0.ambient_dim, L0.dim
    if not dim <= p <= n:
        error_msg = f"expected dim L0 = {dim} <= p <= n = {n}, got p={p}"
        raise DomainError(error_msg)

    if p == dim:
        return L0

    inner = complement(L0).frame
    extra = sample_frames(n - dim, p - dim, 1, rng)[0]
    return LinearSubspace(np.hstack([L0.frame, inner @ extra]))


def sample_containing_frames(
    L0: LinearSubspace,
    p: int,
    size: int,
    rng: RandomStream,
) -> FloatArray:
    """Frames of `size` independent draws of `sample_containing`, shape (size, n, p)."""
    n, dim = L0.ambient_dim, L0.dim
    if not dim <= p <= n:
        error_msg = f"expected dim L0 = {dim} <= p <= n = {n}, got p={p}"
        raise DomainError(error_msg)

    fixed = np.broadcast_to(L0.frame, (size, n, dim))
    if p == dim:
        return np.array(fixed)

    inner = complement(L0).frame
    extra = inner @ sample_frames(n - dim, p - dim, size, rng)
    return np.concatenate([fixed, extra], axis=-1)
