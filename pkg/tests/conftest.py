"""Shared synthetic clouds for the test suite."""

import numpy as np
import pytest

from surface_fixtures import apply_labels, build_cloud, estimate_frames


def plane_grid(n, extent=1.0, z=0.0):
    """(n*n, 3) regular grid on [0, extent]^2 at height z."""
    xs, ys = np.meshgrid(np.linspace(0.0, extent, n), np.linspace(0.0, extent, n))
    return np.column_stack([xs.ravel(), ys.ravel(), np.full(n * n, float(z))])


def fibonacci_sphere(n, radius=1.0):
    """Deterministic near-uniform sphere sampling (Fibonacci lattice)."""
    i = np.arange(n, dtype=np.float64)
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    z = 1.0 - 2.0 * (i + 0.5) / n
    r = np.sqrt(1.0 - z * z)
    return radius * np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def random_sphere(n, radius=1.0, seed=0):
    """Uniform random sphere sampling with a fixed seed."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return radius * v


@pytest.fixture(scope="session")
def grid_cloud_30():
    cloud = build_cloud(plane_grid(30), k=12)
    estimate_frames(cloud)
    return cloud


@pytest.fixture(scope="session")
def grid_cloud_50():
    cloud = build_cloud(plane_grid(50), k=12)
    estimate_frames(cloud)
    return cloud


@pytest.fixture(scope="session")
def sphere_cloud_2k():
    cloud = build_cloud(fibonacci_sphere(2000), k=12)
    estimate_frames(cloud)
    return cloud


def labeling_from(cloud, labels):
    return apply_labels(cloud, np.asarray(labels, dtype=np.int64))
