"""Value and guidance virtual fixtures, runtime queries, agent simulation.

A value fixture harmonically interpolates per-region constants (e.g. contact
force magnitudes) over the free region. A guidance fixture composes two
independent flow fields: inside each obstacle region, the normalized
gradient of a short diffusion from the obstacle rim (pointing outward), and
on the free region, the normalized gradient of a short diffusion emitted by
the target rims (pointing toward the targets). The fields are piecewise by
region and never blended.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NoTargetRegion, SpecValidationError
from .geometry import project_to_surface
from .operators import ScalarField, TangentVectorField, assemble_laplacian, gradient_field
from .solvers import BoundaryConditions, SolveParams, heat_step, solve_laplace

VALUE = "value"
GUIDANCE = "guidance"
ROLE_FREE = "free"
ROLE_VALUE = "value"
ROLE_OBSTACLE = "obstacle"
ROLE_TARGET = "target"


@dataclass
class RegionRole:
    role: str
    value: float | None = None


@dataclass
class FixtureSpec:
    """Declarative behavior assignment per region.

    kind is "value" or "guidance". region_roles maps region id -> RegionRole.
    Region 0 is always the free region; value fixtures require a value(c)
    role on every other region, guidance fixtures require obstacle/target
    roles with at least one target.
    """

    kind: str
    region_roles: dict
    params: SolveParams

    def validate(self, region_count):
        if self.kind not in (VALUE, GUIDANCE):
            raise SpecValidationError(f"unknown fixture kind '{self.kind}'")
        for rid in self.region_roles:
            if not (0 <= rid < region_count):
                raise SpecValidationError(
                    f"spec names region {rid}, cloud has regions 0..{region_count - 1}"
                )
        for rid in range(1, region_count):
            role = self.region_roles.get(rid)
            if role is None:
                raise SpecValidationError(f"region {rid} has no assigned role")
            if self.kind == VALUE:
                if role.role != ROLE_VALUE or role.value is None:
                    raise SpecValidationError(
                        f"value fixture: region {rid} must carry value(c)"
                    )
            else:
                if role.role not in (ROLE_OBSTACLE, ROLE_TARGET):
                    raise SpecValidationError(
                        f"guidance fixture: region {rid} must be obstacle or target"
                    )
        if self.kind == GUIDANCE:
            if not any(r.role == ROLE_TARGET for r in self.region_roles.values()):
                raise NoTargetRegion("guidance fixture needs at least one target region")

    def regions_with(self, role):
        return sorted(r for r, rr in self.region_roles.items() if rr.role == role)


@dataclass
class ValueFixture:
    cloud: object
    labeling: object
    spec: FixtureSpec
    field: ScalarField


@dataclass
class GuidanceFixture:
    cloud: object
    labeling: object
    spec: FixtureSpec
    free_field: TangentVectorField
    obstacle_fields: dict
    target_regions: list
    obstacle_regions: list
    free_scalar: ScalarField
    obstacle_scalars: dict = field(default_factory=dict)


@dataclass
class FixtureResponse:
    region: int
    footpoint: np.ndarray
    defined: bool
    value: float | None = None
    direction: np.ndarray | None = None


@dataclass
class AgentTrajectory:
    points: np.ndarray  # (steps+1, 3) positions visited
    outcome: str  # "success" | "stall" | "timeout"
    nearest_indices: np.ndarray


def build_value_fixture(cloud, labeling, spec, operator=None):
    """Solve Laplace on the free region with each region's constant pinned
    on its free-side interface; annotated regions keep their constants.
    """
    spec.validate(labeling.region_count)
    if spec.kind != VALUE:
        raise SpecValidationError("build_value_fixture requires a value spec")
    if operator is None:
        operator = assemble_laplacian(cloud)

    free_mask = labeling.region_of == 0
    dirichlet = {}
    for rid in range(1, labeling.region_count):
        c = spec.region_roles[rid].value
        for i in labeling.interface_boundaries.get((0, rid), ()):
            dirichlet[int(i)] = float(c)

    solved = solve_laplace(
        operator,
        BoundaryConditions(dirichlet=dirichlet),
        domain=free_mask,
        tolerance=spec.params.tolerance,
    )

    values = solved.values.copy()
    mask = solved.domain_mask.copy()
    for rid in range(1, labeling.region_count):
        pts = labeling.points_of(rid)
        values[pts] = spec.region_roles[rid].value
        mask[pts] = True

    return ValueFixture(
        cloud=cloud,
        labeling=labeling,
        spec=spec,
        field=ScalarField(values=values, domain_mask=mask),
    )


def build_guidance_fixture(cloud, labeling, spec, operator=None):
    """Two independent flows: outward inside obstacles, toward targets on
    the free region, both from short implicit diffusion steps (u0 = 0,
    rim Dirichlet = 1) with insulating walls elsewhere.
    """
    spec.validate(labeling.region_count)
    if spec.kind != GUIDANCE:
        raise SpecValidationError("build_guidance_fixture requires a guidance spec")
    if operator is None:
        operator = assemble_laplacian(cloud)
    params = spec.params
    eps = operator.kernel_bandwidth

    obstacles = spec.regions_with(ROLE_OBSTACLE)
    targets = spec.regions_with(ROLE_TARGET)

    zero = ScalarField(values=np.zeros(cloud.point_count))

    obstacle_fields = {}
    obstacle_scalars = {}
    for rid in obstacles:
        domain = labeling.region_of == rid
        rim = labeling.boundary_of(rid)
        bc = BoundaryConditions(dirichlet={int(i): 1.0 for i in rim})
        scalar = heat_step(operator, zero, bc, params, domain=domain)
        # heat enters from the rim, so the gradient points outward
        flow = gradient_field(cloud, scalar, epsilon=eps, normalize=True)
        obstacle_fields[rid] = flow
        obstacle_scalars[rid] = scalar

    free_domain = labeling.region_of == 0
    dirichlet = {}
    for rid in targets:
        for i in labeling.boundary_of(rid):
            dirichlet[int(i)] = 1.0
    target_domain = free_domain.copy()
    for i in dirichlet:
        target_domain[i] = True
    bc = BoundaryConditions(dirichlet=dirichlet)
    free_scalar = heat_step(operator, zero, bc, params, domain=target_domain)
    free_flow = gradient_field(cloud, free_scalar, epsilon=eps, normalize=False)
    _enforce_wall_tangency(cloud, labeling, obstacles, free_flow)
    _normalize_flow(free_flow)
    # the flow lives on the free region only; target rim points belong to
    # their target region and answer "no direction" at query time
    free_flow.domain_mask &= free_domain

    return GuidanceFixture(
        cloud=cloud,
        labeling=labeling,
        spec=spec,
        free_field=free_flow,
        obstacle_fields=obstacle_fields,
        target_regions=targets,
        obstacle_regions=obstacles,
        free_scalar=free_scalar,
        obstacle_scalars=obstacle_scalars,
    )


def inward_obstacle_direction(cloud, labeling, index, obstacle):
    """Unit tangent-plane direction from a free point into an adjacent
    obstacle region (mean offset toward the obstacle-labeled neighbors)."""
    nbrs = cloud.neighbor_indices[index]
    inside = nbrs[labeling.region_of[nbrs] == obstacle]
    if len(inside) == 0:
        return None
    offset = (cloud.positions[inside] - cloud.positions[index]).mean(axis=0)
    frame = cloud.frames[index]
    in_plane = offset - np.dot(offset, frame.normal) * frame.normal
    norm = np.linalg.norm(in_plane)
    if norm < 1e-300:
        return None
    return in_plane / norm


def _enforce_wall_tangency(cloud, labeling, obstacles, flow):
    """Remove inward components at obstacle-adjacent free points.

    The continuum solution has zero normal derivative at the insulating
    obstacle wall (the gradient is tangential to the wall); the discrete
    gradient picks up a spurious normal component that normalization
    would amplify wherever the tangential part vanishes, so it is
    projected out here. Repeated in case a point borders several
    obstacle regions.
    """
    defined = flow.defined_mask(cloud.point_count)
    for obstacle in obstacles:
        for index in labeling.interface_boundaries.get((0, obstacle), ()):
            if not defined[index]:
                continue
            inward = inward_obstacle_direction(cloud, labeling, index, obstacle)
            if inward is None:
                continue
            for _ in range(3):
                component = np.dot(flow.vectors[index], inward)
                if component <= 0:
                    break
                flow.vectors[index] -= component * inward


def _normalize_flow(flow, zero_tol=1e-280):
    norms = np.linalg.norm(flow.vectors, axis=1)
    ok = flow.defined_mask(len(flow.vectors)) & (norms > zero_tol)
    flow.vectors[ok] /= norms[ok, None]
    flow.vectors[~ok] = 0.0
    flow.domain_mask = ok


def query(fixture, position):
    """Project a (possibly off-surface) position and report the local
    constraint: interpolated value, guidance direction, or target/undefined
    status, at the nearest cloud point.
    """
    cloud = fixture.cloud
    labeling = fixture.labeling
    i, footpoint = project_to_surface(cloud, position)
    region = int(labeling.region_of[i])

    if isinstance(fixture, ValueFixture):
        defined = bool(fixture.field.domain_mask[i])
        return FixtureResponse(
            region=region,
            footpoint=footpoint,
            defined=defined,
            value=float(fixture.field.values[i]) if defined else None,
        )

    if region in fixture.target_regions:
        return FixtureResponse(region=region, footpoint=footpoint, defined=True)
    if region in fixture.obstacle_regions:
        flow = fixture.obstacle_fields[region]
    else:
        flow = fixture.free_field
    defined = bool(flow.defined_mask(cloud.point_count)[i])
    return FixtureResponse(
        region=region,
        footpoint=footpoint,
        defined=defined,
        direction=flow.vectors[i].copy() if defined else None,
    )


def simulate_agents(cloud, fixture, starts, step, max_steps):
    """March agents along the guidance flow with explicit Euler steps,
    re-projecting onto the surface each iteration.

    Outcomes: "success" on entering a target region, "stall" on an
    undefined direction, "timeout" at max_steps.
    """
    if not isinstance(fixture, GuidanceFixture):
        raise SpecValidationError("simulate_agents requires a guidance fixture")
    h = cloud.mean_spacing
    if not (0 < step <= 2 * h):
        raise ValueError(f"step must be in (0, {2 * h:g}], got {step:g}")

    trajectories = []
    for start in starts:
        x = cloud.positions[int(start)].copy()
        points = [x.copy()]
        nearest = [int(start)]
        outcome = "timeout"
        for _ in range(max_steps):
            response = query(fixture, x)
            if response.region in fixture.target_regions:
                outcome = "success"
                break
            if not response.defined or response.direction is None:
                outcome = "stall"
                break
            _, x = project_to_surface(cloud, x + step * response.direction)
            points.append(x.copy())
            i, _ = project_to_surface(cloud, x)
            nearest.append(i)
        else:
            # max_steps exhausted; check whether the last step landed home
            if query(fixture, x).region in fixture.target_regions:
                outcome = "success"
        trajectories.append(
            AgentTrajectory(
                points=np.array(points),
                outcome=outcome,
                nearest_indices=np.array(nearest, dtype=np.int64),
            )
        )
    return trajectories
