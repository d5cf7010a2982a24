"""Point cloud construction, tangent frames, projection."""

import numpy as np
import pytest

from surface_fixtures import build_cloud, estimate_frames, project_to_surface
from surface_fixtures.errors import EmptyCloud, InsufficientPoints, NonFiniteCoordinate

from conftest import fibonacci_sphere, plane_grid, random_sphere

SQUARE = np.array(
    [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]
)


class TestBuildCloud:
    def test_unit_square_neighbors(self):
        cloud = build_cloud(SQUARE, k=3)
        for i in range(4):
            assert sorted(cloud.neighbor_indices[i]) == sorted(set(range(4)) - {i})
            # nearest two at distance 1, farthest at sqrt(2)
            np.testing.assert_allclose(cloud.neighbor_distances[i][:2], 1.0)
            assert np.all(np.diff(cloud.neighbor_distances[i]) >= 0)

    def test_unit_square_mean_spacing(self):
        cloud = build_cloud(SQUARE, k=3)
        assert cloud.mean_spacing == pytest.approx(1.0)

    def test_sphere_spacing_vs_brute_force(self):
        pos = random_sphere(10_000, seed=3)
        cloud = build_cloud(pos, k=12)
        # O(n^2) nearest-neighbor scan, chunked
        nn = np.empty(len(pos))
        for lo in range(0, len(pos), 500):
            chunk = pos[lo : lo + 500]
            d = np.linalg.norm(chunk[:, None, :] - pos[None, :, :], axis=2)
            d[np.arange(len(chunk)), lo + np.arange(len(chunk))] = np.inf
            nn[lo : lo + 500] = d.min(axis=1)
        oracle = nn.mean()
        assert 0.8 * oracle <= cloud.mean_spacing <= 1.2 * oracle

    def test_neighbor_lists_exclude_self_and_sorted(self):
        cloud = build_cloud(plane_grid(10), k=8)
        for i in range(cloud.point_count):
            assert i not in cloud.neighbor_indices[i]
            assert np.all(np.diff(cloud.neighbor_distances[i]) >= -1e-15)

    def test_empty_cloud(self):
        with pytest.raises(EmptyCloud):
            build_cloud(np.zeros((0, 3)))

    def test_non_finite(self):
        pts = SQUARE.copy()
        pts[2, 1] = np.nan
        with pytest.raises(NonFiniteCoordinate) as exc:
            build_cloud(pts, k=3)
        assert exc.value.index == 2

    def test_insufficient_points(self):
        with pytest.raises(InsufficientPoints):
            build_cloud(SQUARE, k=4)

    def test_duplicates_merged(self):
        pts = np.vstack([plane_grid(5), plane_grid(5)])
        cloud = build_cloud(pts, k=6)
        assert cloud.point_count == 25

    def test_deterministic(self):
        a = build_cloud(plane_grid(10), k=8)
        b = build_cloud(plane_grid(10), k=8)
        np.testing.assert_array_equal(a.neighbor_indices, b.neighbor_indices)
        assert a.mean_spacing == b.mean_spacing


class TestEstimateFrames:
    def test_planar_grid_normals(self, grid_cloud_30):
        normals = grid_cloud_30.normals()
        np.testing.assert_allclose(np.abs(normals[:, 2]), 1.0, atol=1e-10)
        # all mutually consistent after propagation
        assert len(np.unique(np.sign(normals[:, 2]))) == 1

    def test_frame_orthonormality(self, sphere_cloud_2k):
        for f in sphere_cloud_2k.frames[::37]:
            assert abs(np.linalg.norm(f.normal) - 1) < 1e-10
            assert abs(np.dot(f.e1, f.e2)) < 1e-10
            assert abs(np.dot(f.e1, f.normal)) < 1e-10
            assert abs(np.dot(f.e2, f.normal)) < 1e-10
            np.testing.assert_allclose(np.cross(f.e1, f.e2), f.normal, atol=1e-10)

    def test_sphere_normals_radial(self, sphere_cloud_2k):
        pos = sphere_cloud_2k.positions
        radial = pos / np.linalg.norm(pos, axis=1)[:, None]
        dots = np.abs((sphere_cloud_2k.normals() * radial).sum(axis=1))
        assert dots.min() > 0.95

    def test_translation_invariance(self):
        pts = fibonacci_sphere(500)
        a = build_cloud(pts, k=12)
        b = build_cloud(pts + np.array([5.0, 5.0, 5.0]), k=12)
        na = np.array([f.normal for f in estimate_frames(a)])
        nb = np.array([f.normal for f in estimate_frames(b)])
        np.testing.assert_allclose(na, nb, atol=1e-9)

    def test_rotation_equivariance(self):
        pts = fibonacci_sphere(500)
        theta = 0.7
        R = np.array(
            [
                [np.cos(theta), -np.sin(theta), 0.0],
                [np.sin(theta), np.cos(theta), 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
        na = np.array([f.normal for f in estimate_frames(build_cloud(pts, k=12))])
        nb = np.array(
            [f.normal for f in estimate_frames(build_cloud(pts @ R.T, k=12))]
        )
        rotated = na @ R.T
        # up to a global/per-point sign from propagation
        angle = np.arccos(np.clip(np.abs((rotated * nb).sum(axis=1)), -1, 1))
        assert angle.max() < 1e-6


class TestProjectToSurface:
    def test_identity_on_cloud_points(self, grid_cloud_30):
        for i in (0, 17, 450):
            j, foot = project_to_surface(grid_cloud_30, grid_cloud_30.positions[i])
            assert j == i
            np.testing.assert_allclose(foot, grid_cloud_30.positions[i], atol=1e-12)

    def test_plane_projection(self, grid_cloud_30):
        p = grid_cloud_30.positions[42]
        j, foot = project_to_surface(grid_cloud_30, p + np.array([0, 0, 0.1]))
        assert j == 42
        np.testing.assert_allclose(foot, p, atol=1e-12)

    def test_sphere_projection_near_true_footpoint(self, sphere_cloud_2k):
        rng = np.random.default_rng(11)
        h = sphere_cloud_2k.mean_spacing
        for _ in range(50):
            q = rng.normal(size=3)
            q *= (1.0 + 0.05 * rng.normal()) / np.linalg.norm(q)
            _, foot = project_to_surface(sphere_cloud_2k, q)
            true_foot = q / np.linalg.norm(q)
            assert np.linalg.norm(foot - true_foot) < 2 * h

    def test_idempotent(self, sphere_cloud_2k):
        q = np.array([0.9, 0.2, 0.1])
        i, foot = project_to_surface(sphere_cloud_2k, q)
        j, foot2 = project_to_surface(sphere_cloud_2k, foot)
        assert i == j
        np.testing.assert_allclose(foot, foot2, atol=1e-12)
