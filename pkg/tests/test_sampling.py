from __future__ import annotations

import numpy as np
import pytest
from flatsect.exceptions import DomainError
from flatsect.sampling import (
    RandomStream,
    sample_affine_hitting_ball,
    sample_affine_tangent,
    sample_ball_points,
    sample_ball_uniform,
    sample_containing,
    sample_containing_frames,
    sample_frames,
    sample_grassmannian,
    sample_rotation,
    sample_sphere_points,
)
from flatsect.subspaces import LinearSubspace, distance_to_origin, principal_angles
from scipy import stats


def test_streams_are_reproducible() -> None:
    assert np.array_equal(RandomStream(42).uniform(16), RandomStream(42).uniform(16))
    assert np.array_equal(RandomStream(42, 3).normal(8), RandomStream(42, 3).normal(8))
    assert not np.array_equal(RandomStream(42, 1).uniform(16), RandomStream(42, 2).uniform(16))
    assert not np.array_equal(RandomStream(41).uniform(16), RandomStream(42).uniform(16))


def test_spawned_streams_are_reproducible_and_distinct() -> None:
    root = RandomStream(42, 5)

    first, again, second = root.spawn(0), root.spawn(0), root.spawn(1)

    assert first.stream_id == again.stream_id
    assert first.stream_id != second.stream_id
    assert np.array_equal(first.uniform(8), again.uniform(8))


@pytest.mark.parametrize(("seed", "stream_id"), [(-1, 0), (2**64, 0), (0, -3)])
def test_stream_rejects_out_of_range_keys(seed: int, stream_id: int) -> None:
    with pytest.raises(DomainError):
        RandomStream(seed, stream_id)


def test_uniform_and_normal_variates(rng: RandomStream) -> None:
    uniform = rng.uniform(100_000)
    normal = rng.normal((400, 500))

    assert uniform.min() > 0.0
    assert uniform.max() <= 1.0
    assert normal.shape == (400, 500)
    assert abs(normal.mean()) < 0.01
    assert abs(normal.var() - 1.0) < 0.02


def test_rotation_is_special_orthogonal(rng: RandomStream) -> None:
    rotation = sample_rotation(5, rng)

    assert np.allclose(rotation.T @ rotation, np.eye(5), atol=1e-12)
    assert np.linalg.det(rotation) == pytest.approx(1.0)


def test_rotation_columns_are_uniform(rng: RandomStream) -> None:
    n = 4
    first_coordinates = np.array([sample_rotation(n, rng)[0, 1] for _ in range(2000)])

    # a uniform unit vector has x_1^2 ~ Beta(1/2, (n-1)/2)
    result = stats.kstest(first_coordinates**2, stats.beta(0.5, (n - 1) / 2).cdf)
    assert result.pvalue > 1e-3


def test_frames_are_orthonormal(rng: RandomStream) -> None:
    frames = sample_frames(6, 3, 50, rng)

    assert frames.shape == (50, 6, 3)
    gram = np.swapaxes(frames, -1, -2) @ frames
    assert np.allclose(gram, np.eye(3), atol=1e-12)
    assert sample_frames(4, 0, 3, rng).shape == (3, 4, 0)

    with pytest.raises(DomainError):
        sample_frames(3, 4, 1, rng)


def test_sphere_and_ball_points(rng: RandomStream) -> None:
    sphere = sample_sphere_points(3, 1000, rng)
    ball = sample_ball_points(3, 2.0, 20_000, rng)
    radii = np.linalg.norm(ball, axis=1)

    assert np.allclose(np.linalg.norm(sphere, axis=1), 1.0)
    assert radii.max() <= 2.0
    # P(|x| <= h/2) = 2^{-d} for the uniform law on the radius-h ball
    assert np.mean(radii <= 1.0) == pytest.approx(0.125, abs=0.01)
    assert sample_ball_uniform(3, 2.0, rng).shape == (3,)
    assert np.linalg.norm(sample_ball_uniform(3, 2.0, rng)) <= 2.0

    with pytest.raises(DomainError):
        sample_ball_points(3, 0.0, 1, rng)


def test_grassmannian_dimensions(rng: RandomStream) -> None:
    subspace = sample_grassmannian(7, 3, rng)

    assert subspace.dim == 3
    assert np.trace(subspace.projector()) == pytest.approx(3.0)
    assert sample_grassmannian(4, 0, rng).dim == 0


def test_affine_samplers(rng: RandomStream) -> None:
    for _ in range(20):
        hitting = sample_affine_hitting_ball(5, 2, 1.5, rng)
        tangent = sample_affine_tangent(5, 3, rng)

        assert hitting.dim == 2
        assert distance_to_origin(hitting) <= 1.5
        assert tangent.dim == 3
        assert distance_to_origin(tangent) == pytest.approx(1.0)

    with pytest.raises(DomainError):
        sample_affine_tangent(3, 3, rng)


def test_sample_containing(rng: RandomStream) -> None:
    axis = LinearSubspace(np.array([[0.0], [1.0], [0.0], [0.0]]))

    subspace = sample_containing(axis, 3, rng)

    assert subspace.dim == 3
    assert subspace.contains([0.0, 1.0, 0.0, 0.0])
    assert sample_containing(axis, 1, rng) is axis

    with pytest.raises(DomainError):
        sample_containing(LinearSubspace.coordinate(4, 2), 1, rng)


def test_sample_containing_frames(rng: RandomStream) -> None:
    fixed = LinearSubspace.coordinate(5, 2)

    frames = sample_containing_frames(fixed, 4, 30, rng)

    assert frames.shape == (30, 5, 4)
    assert np.allclose(frames[:, :, :2], fixed.frame)
    gram = np.swapaxes(frames, -1, -2) @ frames
    assert np.allclose(gram, np.eye(4), atol=1e-12)
    assert sample_containing_frames(fixed, 2, 3, rng).shape == (3, 5, 2)


def largest_angle(subspace: LinearSubspace, reference: LinearSubspace) -> float:
    return float(principal_angles(subspace, reference).max())


def smallest_angle(subspace: LinearSubspace, reference: LinearSubspace) -> float:
    return float(principal_angles(subspace, reference).min())


def test_planar_rotation_angle_is_uniform(rng: RandomStream) -> None:
    rotations = [sample_rotation(2, rng) for _ in range(2000)]
    angles = np.array([np.arctan2(r[1, 0], r[0, 0]) for r in rotations])

    result = stats.kstest(angles, stats.uniform(loc=-np.pi, scale=2 * np.pi).cdf)
    assert result.pvalue > 1e-3


@pytest.mark.parametrize(("n", "k", "h"), [(5, 2, 1.5), (3, 1, 1.0), (4, 3, 2.0)])
def test_hitting_flat_distance_law(rng: RandomStream, n: int, k: int, h: float) -> None:
    distances = np.array(
        [distance_to_origin(sample_affine_hitting_ball(n, k, h, rng)) for _ in range(2000)]
    )

    # the foot is uniform in the radius-h ball of M⊥, so P(d <= r) = (r/h)^{n-k}
    result = stats.kstest(distances, lambda r: (np.asarray(r) / h) ** (n - k))
    assert result.pvalue > 1e-3


def test_grassmannian_is_rotation_invariant(rng: RandomStream) -> None:
    plane = LinearSubspace.coordinate(4, 2)
    turned = LinearSubspace(sample_rotation(4, RandomStream(99)) @ plane.frame)

    to_plane = [largest_angle(sample_grassmannian(4, 2, rng), plane) for _ in range(1500)]
    to_turned = [largest_angle(sample_grassmannian(4, 2, rng), turned) for _ in range(1500)]

    assert stats.ks_2samp(to_plane, to_turned).pvalue > 1e-3


def test_containing_law_is_invariant_under_rotations_fixing_the_axis(
    rng: RandomStream,
) -> None:
    axis = LinearSubspace.coordinate(4, 1)
    reference = LinearSubspace(np.eye(4)[:, [1, 2]])
    # rotation of e2, e3, e4 that leaves e1 in place
    block = np.eye(4)
    block[1:, 1:] = sample_rotation(3, RandomStream(99))
    turned = LinearSubspace(block @ reference.frame)

    # the largest angle is always π/2 here since e1 is orthogonal to the reference
    to_reference = [smallest_angle(sample_containing(axis, 2, rng), reference) for _ in range(1500)]
    to_turned = [smallest_angle(sample_containing(axis, 2, rng), turned) for _ in range(1500)]

    assert stats.ks_2samp(to_reference, to_turned).pvalue > 1e-3
