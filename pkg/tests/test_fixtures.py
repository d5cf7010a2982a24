"""Value/guidance fixtures, queries, and agent simulation."""

import numpy as np
import pytest

from surface_fixtures import (
    FixtureSpec,
    RegionRole,
    SolveParams,
    apply_labels,
    build_cloud,
    build_guidance_fixture,
    build_value_fixture,
    estimate_frames,
    query,
    simulate_agents,
)
from surface_fixtures.errors import NoTargetRegion, SpecValidationError
from surface_fixtures.fixtures import inward_obstacle_direction

from conftest import fibonacci_sphere, plane_grid


def value_spec(values, t_d=1e-3):
    roles = {rid: RegionRole("value", v) for rid, v in values.items()}
    return FixtureSpec(
        kind="value", region_roles=roles, params=SolveParams(diffusion_time=t_d)
    )


def guidance_spec(obstacles=(), targets=(1,), t_d=1e-3):
    roles = {rid: RegionRole("obstacle") for rid in obstacles}
    roles.update({rid: RegionRole("target") for rid in targets})
    return FixtureSpec(
        kind="guidance", region_roles=roles, params=SolveParams(diffusion_time=t_d)
    )


@pytest.fixture(scope="module")
def strip_setup():
    """Plane strip with value regions at the left and right edges."""
    pos = plane_grid(40)
    cloud = build_cloud(pos, k=12)
    estimate_frames(cloud)
    labels = np.zeros(len(pos), int)
    labels[np.isclose(pos[:, 0], 0.0)] = 1
    labels[np.isclose(pos[:, 0], 1.0)] = 2
    return cloud, apply_labels(cloud, labels)


@pytest.fixture(scope="module")
def disk_target_setup():
    """Plane with a central disk target region."""
    pos = plane_grid(40, extent=2.0) - np.array([1.0, 1.0, 0.0])
    cloud = build_cloud(pos, k=12)
    estimate_frames(cloud)
    labels = (np.linalg.norm(pos[:, :2], axis=1) < 0.25).astype(int)
    labeling = apply_labels(cloud, labels)
    return cloud, labeling


@pytest.fixture(scope="module")
def sphere_caps_setup():
    """Sphere with an antipodal target cap and one obstacle cap."""
    pos = fibonacci_sphere(5000)
    cloud = build_cloud(pos, k=12)
    estimate_frames(cloud)
    labels = np.zeros(len(pos), int)
    labels[np.linalg.norm(pos - np.array([0.0, 1.0, 0.0]), axis=1) < 0.5] = 1
    labels[pos[:, 2] < -0.85] = 2
    labeling = apply_labels(cloud, labels)
    spec = guidance_spec(obstacles=(1,), targets=(2,), t_d=cloud.mean_spacing ** 2)
    fixture = build_guidance_fixture(cloud, labeling, spec)
    return cloud, labeling, fixture


class TestValueFixture:
    def test_equal_constants_constant_everywhere(self, strip_setup):
        cloud, labeling = strip_setup
        fixture = build_value_fixture(cloud, labeling, value_spec({1: 5.0, 2: 5.0}))
        assert np.abs(fixture.field.values - 5.0).max() < 1e-9

    def test_strip_midline(self, strip_setup):
        cloud, labeling = strip_setup
        fixture = build_value_fixture(cloud, labeling, value_spec({1: 0.0, 2: 10.0}))
        x = cloud.positions[:, 0]
        mid_col = x[np.argmin(np.abs(x - 0.5))]
        mid = np.isclose(x, mid_col)
        assert abs(fixture.field.values[mid].mean() - 5.0) <= 0.5

    def test_maximum_principle_two_patches(self, sphere_caps_setup):
        cloud, labeling, _ = sphere_caps_setup
        fixture = build_value_fixture(cloud, labeling, value_spec({1: 2.0, 2: 9.0}))
        vals = fixture.field.values[fixture.field.domain_mask]
        assert vals.min() >= 2.0 - 1e-8
        assert vals.max() <= 9.0 + 1e-8

    def test_region_points_keep_constant(self, strip_setup):
        cloud, labeling = strip_setup
        fixture = build_value_fixture(cloud, labeling, value_spec({1: 1.5, 2: 8.25}))
        assert (fixture.field.values[labeling.points_of(1)] == 1.5).all()
        assert (fixture.field.values[labeling.points_of(2)] == 8.25).all()

    def test_spec_validation(self, strip_setup):
        cloud, labeling = strip_setup
        bad = FixtureSpec(
            kind="value",
            region_roles={1: RegionRole("value", 1.0)},  # region 2 unassigned
            params=SolveParams(diffusion_time=1e-3),
        )
        with pytest.raises(SpecValidationError):
            build_value_fixture(cloud, labeling, bad)


class TestGuidanceFixture:
    def test_disk_target_radial(self, disk_target_setup):
        cloud, labeling = disk_target_setup
        spec = guidance_spec(targets=(1,), t_d=cloud.mean_spacing ** 2)
        fixture = build_guidance_fixture(cloud, labeling, spec)
        pos = cloud.positions
        free = labeling.region_of == 0
        defined = fixture.free_field.defined_mask(cloud.point_count) & free
        dirs = fixture.free_field.vectors[defined]
        inward = -pos[defined] / np.linalg.norm(pos[defined], axis=1)[:, None]
        angles = np.degrees(
            np.arccos(np.clip((dirs * inward).sum(axis=1), -1, 1))
        )
        assert angles.mean() < 15

    def test_obstacle_field_outward_radial(self):
        pos = plane_grid(40, extent=2.0) - np.array([1.0, 1.0, 0.0])
        cloud = build_cloud(pos, k=12)
        estimate_frames(cloud)
        labels = np.zeros(len(pos), int)
        labels[np.linalg.norm(pos[:, :2], axis=1) < 0.4] = 1  # obstacle disk
        labels[pos[:, 0] > 0.9] = 2  # target band at the right edge
        labeling = apply_labels(cloud, labels)
        spec = guidance_spec(
            obstacles=(1,), targets=(2,), t_d=cloud.mean_spacing ** 2
        )
        fixture = build_guidance_fixture(cloud, labeling, spec)
        flow = fixture.obstacle_fields[1]
        defined = flow.defined_mask(cloud.point_count)
        inside = np.flatnonzero((labeling.region_of == 1) & defined)
        inside = inside[np.linalg.norm(pos[inside, :2], axis=1) > 1e-6]
        dirs = flow.vectors[inside]
        outward = pos[inside] / np.linalg.norm(pos[inside], axis=1)[:, None]
        angles = np.degrees(
            np.arccos(np.clip((dirs * outward).sum(axis=1), -1, 1))
        )
        assert angles.mean() < 15

    def test_vectors_unit_and_tangent(self, sphere_caps_setup):
        cloud, labeling, fixture = sphere_caps_setup
        flow = fixture.free_field
        defined = flow.defined_mask(cloud.point_count)
        norms = np.linalg.norm(flow.vectors[defined], axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-8)
        for i in np.flatnonzero(defined)[::71]:
            assert abs(np.dot(flow.vectors[i], cloud.frames[i].normal)) < 1e-8

    def test_interface_safety(self, sphere_caps_setup):
        cloud, labeling, fixture = sphere_caps_setup
        defined = fixture.free_field.defined_mask(cloud.point_count)
        for i in labeling.interface_boundaries[(0, 1)]:
            if not defined[i]:
                continue
            inward = inward_obstacle_direction(cloud, labeling, i, 1)
            assert np.dot(fixture.free_field.vectors[i], inward) <= 1e-6

    def test_dirichlet_scale_invariance(self, disk_target_setup):
        # normalization removes the Dirichlet constant: rim value 1 vs c
        # gives identical directions by linearity
        from surface_fixtures import (
            BoundaryConditions,
            assemble_laplacian,
            gradient_field,
            heat_step,
        )
        from surface_fixtures.operators import ScalarField

        cloud, labeling = disk_target_setup
        op = assemble_laplacian(cloud)
        params = SolveParams(diffusion_time=cloud.mean_spacing ** 2)
        domain = labeling.region_of == 0
        rim = labeling.boundary_of(1)
        domain_plus = domain.copy()
        domain_plus[rim] = True
        zero = ScalarField(values=np.zeros(cloud.point_count))
        flows = []
        for c in (1.0, 42.0):
            bc = BoundaryConditions(dirichlet={int(i): c for i in rim})
            u = heat_step(op, zero, bc, params, domain=domain_plus)
            flows.append(gradient_field(cloud, u, normalize=True))
        np.testing.assert_allclose(
            flows[0].vectors, flows[1].vectors, atol=1e-9
        )

    def test_no_target_rejected(self, disk_target_setup):
        cloud, labeling = disk_target_setup
        spec = guidance_spec(obstacles=(1,), targets=())
        with pytest.raises(NoTargetRegion):
            build_guidance_fixture(cloud, labeling, spec)


class TestQuery:
    def test_target_interior_no_direction(self, disk_target_setup):
        cloud, labeling = disk_target_setup
        spec = guidance_spec(targets=(1,), t_d=cloud.mean_spacing ** 2)
        fixture = build_guidance_fixture(cloud, labeling, spec)
        inside = labeling.points_of(1)[0]
        r = query(fixture, cloud.positions[inside])
        assert r.defined and r.direction is None and r.region == 1

    def test_obstacle_interior_pushes_outward(self, sphere_caps_setup):
        cloud, labeling, fixture = sphere_caps_setup
        from surface_fixtures import outward_directions

        rim = {bf.index: bf.outward_direction
               for bf in outward_directions(cloud, labeling, 1)}
        checked = 0
        for i, out_dir in list(rim.items())[:20]:
            r = query(fixture, cloud.positions[i])
            if r.direction is None:
                continue
            angle = np.degrees(
                np.arccos(np.clip(np.dot(r.direction, out_dir), -1, 1))
            )
            assert angle < 30
            checked += 1
        assert checked > 0

    def test_off_surface_query_equals_footpoint_query(self, disk_target_setup):
        cloud, labeling = disk_target_setup
        spec = guidance_spec(targets=(1,), t_d=cloud.mean_spacing ** 2)
        fixture = build_guidance_fixture(cloud, labeling, spec)
        free_pt = cloud.positions[labeling.points_of(0)[100]]
        far = free_pt + np.array([0.0, 0.0, 3.0])
        a = query(fixture, far)
        b = query(fixture, a.footpoint)
        assert a.region == b.region and a.defined == b.defined
        np.testing.assert_allclose(a.direction, b.direction, atol=1e-12)

    def test_value_fixture_query(self, strip_setup=None):
        pos = plane_grid(40)
        cloud = build_cloud(pos, k=12)
        estimate_frames(cloud)
        labels = np.zeros(len(pos), int)
        labels[np.isclose(pos[:, 0], 0.0)] = 1
        labels[np.isclose(pos[:, 0], 1.0)] = 2
        labeling = apply_labels(cloud, labels)
        fixture = build_value_fixture(cloud, labeling, value_spec({1: 0.0, 2: 10.0}))
        r = query(fixture, np.array([0.0, 0.5, 0.2]))
        assert r.defined and r.value == 0.0 and r.direction is None


class TestSimulateAgents:
    def test_start_inside_target(self, disk_target_setup):
        cloud, labeling = disk_target_setup
        spec = guidance_spec(targets=(1,), t_d=cloud.mean_spacing ** 2)
        fixture = build_guidance_fixture(cloud, labeling, spec)
        start = int(labeling.points_of(1)[0])
        (traj,) = simulate_agents(
            cloud, fixture, [start], cloud.mean_spacing, 100
        )
        assert traj.outcome == "success"
        assert len(traj.points) == 1

    def test_plane_disk_full_success(self, disk_target_setup):
        cloud, labeling = disk_target_setup
        spec = guidance_spec(targets=(1,), t_d=cloud.mean_spacing ** 2)
        fixture = build_guidance_fixture(cloud, labeling, spec)
        rng = np.random.default_rng(3)
        free = np.flatnonzero(labeling.region_of == 0)
        starts = rng.choice(free, size=100, replace=False)
        h = cloud.mean_spacing
        max_steps = int(4 * 2 * np.sqrt(2) / h)
        trajectories = simulate_agents(cloud, fixture, starts, h, max_steps)
        assert all(t.outcome == "success" for t in trajectories)

    def test_trajectories_stay_on_surface(self, sphere_caps_setup):
        cloud, labeling, fixture = sphere_caps_setup
        h = cloud.mean_spacing
        trajectories = simulate_agents(
            cloud, fixture, [10, 400, 2500], h, 500
        )
        for t in trajectories:
            d, _ = cloud._kdtree.query(t.points)
            assert d.max() <= 2 * h

    def test_determinism(self, sphere_caps_setup):
        cloud, labeling, fixture = sphere_caps_setup
        h = cloud.mean_spacing
        a = simulate_agents(cloud, fixture, [5, 99], h, 300)
        b = simulate_agents(cloud, fixture, [5, 99], h, 300)
        for ta, tb in zip(a, b):
            assert ta.outcome == tb.outcome
            np.testing.assert_array_equal(ta.points, tb.points)

    def test_step_cap(self, sphere_caps_setup):
        cloud, labeling, fixture = sphere_caps_setup
        with pytest.raises(ValueError):
            simulate_agents(cloud, fixture, [0], 3 * cloud.mean_spacing, 10)
