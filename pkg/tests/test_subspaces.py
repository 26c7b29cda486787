from __future__ import annotations

import math

import numpy as np
import pytest
from flatsect.exceptions import DegenerateConfigurationError, DomainError, EmptyIntersectionError
from flatsect.sampling import (
    RandomStream,
    sample_ball_points,
    sample_frames,
    sample_grassmannian,
    sample_rotation,
)
from flatsect.subspaces import (
    AffineFlat,
    LinearSubspace,
    batch_gram_determinant,
    batch_min_norm_points,
    complement,
    distance_to_origin,
    intersect_affine_linear,
    intersect_flats,
    intersect_linear,
    orthonormalize,
    principal_angles,
    project,
    subspace_determinant,
)


def line(angle: float) -> LinearSubspace:
    return LinearSubspace(np.array([[math.cos(angle)], [math.sin(angle)]]))


def test_frame_must_be_orthonormal() -> None:
    with pytest.raises(DomainError):
        LinearSubspace(np.array([[1.0, 1.0], [0.0, 1.0]]))

    with pytest.raises(DomainError):
        LinearSubspace(np.eye(3)[:2])


def test_frame_is_read_only() -> None:
    subspace = LinearSubspace.coordinate(3, 2)

    with pytest.raises(ValueError):
        subspace.frame[0, 0] = 2.0


def test_orthonormalize_drops_dependent_columns() -> None:
    subspace = orthonormalize(np.array([[1.0, 2.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 0.0]]))

    assert subspace.dim == 1
    assert subspace.contains([1.0, 1.0, 0.0])
    assert orthonormalize(np.zeros((3, 2))).dim == 0


def test_complement_is_orthogonal(rng: RandomStream) -> None:
    subspace = sample_grassmannian(6, 2, rng)
    other = complement(subspace)

    assert other.dim == 4
    assert np.allclose(subspace.frame.T @ other.frame, 0.0, atol=1e-12)
    assert complement(LinearSubspace.zero(3)).dim == 3


def test_project_and_contains() -> None:
    plane = LinearSubspace.coordinate(3, 2)

    assert np.allclose(project([1.0, 2.0, 3.0], plane), [1.0, 2.0, 0.0])
    assert plane.contains([4.0, -1.0, 0.0])
    assert not plane.contains([0.0, 0.0, 1.0])

    with pytest.raises(DomainError):
        project([1.0, 2.0], plane)


def test_intersect_linear_planes() -> None:
    xy = LinearSubspace(np.eye(3)[:, [0, 1]])
    xz = LinearSubspace(np.eye(3)[:, [0, 2]])

    meet = intersect_linear(xy, xz)

    assert meet.dim == 1
    assert meet.contains([1.0, 0.0, 0.0])


def test_affine_flat_foot_validation() -> None:
    x_axis = LinearSubspace.coordinate(2, 1)

    with pytest.raises(DomainError):
        AffineFlat(x_axis, np.array([1.0, 1.0]))

    flat = AffineFlat.through(x_axis, [5.0, 1.0])
    assert np.allclose(flat.foot, [0.0, 1.0])
    assert flat.contains([-3.0, 1.0])
    assert distance_to_origin(flat) == pytest.approx(1.0)


def test_intersect_line_with_axis() -> None:
    horizontal = AffineFlat.through(LinearSubspace.coordinate(2, 1), [0.0, 1.0])
    y_axis = LinearSubspace(np.array([[0.0], [1.0]]))

    point = intersect_affine_linear(horizontal, y_axis)

    assert point.dim == 0
    assert np.allclose(point.foot, [0.0, 1.0])


def test_parallel_configuration_is_empty() -> None:
    horizontal = AffineFlat.through(LinearSubspace.coordinate(2, 1), [0.0, 1.0])

    with pytest.raises(EmptyIntersectionError):
        intersect_affine_linear(horizontal, LinearSubspace.coordinate(2, 1))


def test_coincident_configuration_is_degenerate() -> None:
    x_axis = LinearSubspace.coordinate(2, 1)

    with pytest.raises(DegenerateConfigurationError):
        intersect_affine_linear(AffineFlat.from_linear(x_axis), x_axis)


def test_intersection_lies_in_both(rng: RandomStream) -> None:
    direction = sample_grassmannian(5, 3, rng)
    flat = AffineFlat.through(direction, rng.normal(5))
    subspace = sample_grassmannian(5, 3, rng)

    meet = intersect_affine_linear(flat, subspace)

    assert meet.dim == 1
    assert subspace.contains(meet.foot)
    assert flat.contains(meet.foot)
    # the foot is the closest point of the intersection, hence no closer than the flat
    assert distance_to_origin(meet) >= distance_to_origin(flat) - 1e-12


def test_intersect_flats_needs_input() -> None:
    with pytest.raises(DomainError):
        intersect_flats([])


def test_subspace_determinant() -> None:
    assert subspace_determinant(line(0.0), line(math.pi / 2)) == pytest.approx(1.0)
    assert subspace_determinant(line(0.3), line(0.3)) == pytest.approx(0.0, abs=1e-7)
    assert subspace_determinant(line(0.0), line(0.4)) == pytest.approx(math.sin(0.4))


def test_subspace_determinant_uses_complements() -> None:
    xy = LinearSubspace(np.eye(3)[:, [0, 1]])
    tilted = orthonormalize(np.array([[1.0, 0.0], [0.0, math.cos(0.7)], [0.0, math.sin(0.7)]]))

    assert subspace_determinant(xy, tilted) == pytest.approx(math.sin(0.7))


def test_batch_gram_determinant_matches_single(rng: RandomStream) -> None:
    fixed = sample_grassmannian(5, 2, rng)
    subspaces = [sample_grassmannian(5, 3, rng) for _ in range(4)]

    batch = batch_gram_determinant(np.stack([s.frame for s in subspaces]), fixed.frame)

    for value, subspace in zip(batch, subspaces):
        assert value == pytest.approx(subspace_determinant(subspace, fixed), abs=1e-12)


def test_principal_angles_ascending() -> None:
    xy = LinearSubspace(np.eye(3)[:, [0, 1]])
    tilted = orthonormalize(np.array([[1.0, 0.0], [0.0, math.cos(0.5)], [0.0, math.sin(0.5)]]))

    angles = principal_angles(xy, tilted)

    assert angles == pytest.approx([0.0, 0.5], abs=1e-7)
    assert principal_angles(xy, LinearSubspace.zero(3)).size == 0


def test_batch_min_norm_points() -> None:
    normals = np.zeros((2, 2, 1))
    normals[0, 1, 0] = 1.0
    offsets = np.array([[2.0], [1.0]])

    points, ok = batch_min_norm_points(normals, offsets)

    assert ok.tolist() == [True, False]
    assert np.allclose(points[0], [0.0, 2.0])
    assert np.isnan(points[1]).all()


def rotated(rotation: np.ndarray, subspace: LinearSubspace) -> LinearSubspace:
    return LinearSubspace(rotation @ subspace.frame)


@pytest.mark.parametrize(("n", "p"), [(4, 2), (5, 2), (6, 1)])
def test_subspace_determinant_of_complements(rng: RandomStream, n: int, p: int) -> None:
    for _ in range(50):
        L, M = sample_grassmannian(n, p, rng), sample_grassmannian(n, n - p, rng)

        assert subspace_determinant(L, M) == pytest.approx(
            subspace_determinant(complement(L), complement(M)), abs=1e-10
        )


def test_double_complement_is_identity(rng: RandomStream) -> None:
    for k in range(6):
        subspace = sample_grassmannian(5, k, rng)

        again = complement(complement(subspace))

        assert again.dim == subspace.dim
        assert np.allclose(again.projector(), subspace.projector(), atol=1e-12)


def test_principal_angles_are_rotation_invariant(rng: RandomStream) -> None:
    for _ in range(20):
        L, M = sample_grassmannian(6, 2, rng), sample_grassmannian(6, 3, rng)
        rotation = sample_rotation(6, rng)

        assert principal_angles(rotated(rotation, L), rotated(rotation, M)) == pytest.approx(
            principal_angles(L, M), abs=1e-7
        )


def test_projection_jacobian_is_a_subspace_determinant(rng: RandomStream) -> None:
    # projecting M onto L of the same dimension scales volume by [M, L⊥]
    for _ in range(50):
        L, M = sample_grassmannian(5, 2, rng), sample_grassmannian(5, 2, rng)

        jacobian = abs(np.linalg.det(L.frame.T @ M.frame))

        assert jacobian == pytest.approx(subspace_determinant(M, complement(L)), abs=1e-10)
        assert jacobian == pytest.approx(np.prod(np.cos(principal_angles(L, M))), abs=1e-10)


def test_generic_subspaces_meet_in_the_expected_dimension(rng: RandomStream) -> None:
    for _ in range(10_000):
        L1, L2 = sample_grassmannian(4, 3, rng), sample_grassmannian(4, 2, rng)

        meet = intersect_linear(L1, L2)

        assert meet.dim == 1
        assert L1.contains(meet.frame[:, 0])
        assert L2.contains(meet.frame[:, 0])


def test_scalar_and_batched_intersections_agree(rng: RandomStream) -> None:
    n, codim, q = 5, 2, 3
    flat_normals = sample_frames(n, codim, 200, rng)
    offsets = sample_ball_points(codim, 1.0, 200, rng)
    subspace_normals = sample_frames(n, n - q, 200, rng)

    points, ok = batch_min_norm_points(
        np.concatenate([flat_normals, subspace_normals], axis=-1),
        np.concatenate([offsets, np.zeros((200, n - q))], axis=-1),
    )

    assert ok.all()
    for i in range(200):
        normal = LinearSubspace(flat_normals[i])
        flat = AffineFlat(complement(normal), normal.frame @ offsets[i])
        subspace = complement(LinearSubspace(subspace_normals[i]))

        meet = intersect_affine_linear(flat, subspace)

        assert meet.dim == q - codim
        assert meet.foot == pytest.approx(points[i], abs=1e-8)
        assert distance_to_origin(meet) == pytest.approx(np.linalg.norm(points[i]), rel=1e-8)
