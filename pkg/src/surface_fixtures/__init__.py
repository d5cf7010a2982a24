"""Diffusion-based virtual fixtures on surface point clouds.

Pipeline: build a point cloud with a k-NN graph, label behavior regions,
assemble a graph Laplace-Beltrami operator, solve Laplace/heat equations
with mixed Dirichlet / zero-Neumann boundaries, and expose the results as
queryable value and guidance fixtures.
"""

from .errors import SurfaceFixtureError
from .fixtures import (
    FixtureResponse,
    FixtureSpec,
    GuidanceFixture,
    RegionRole,
    ValueFixture,
    build_guidance_fixture,
    build_value_fixture,
    query,
    simulate_agents,
)
from .geometry import PointCloud, TangentFrame, build_cloud, estimate_frames, project_to_surface
from .operators import (
    ScalarField,
    SparseOperator,
    TangentVectorField,
    assemble_laplacian,
    gradient,
    gradient_field,
)
from .segmentation import (
    BoundaryFrame,
    RegionLabeling,
    apply_labels,
    extract_open_boundary,
    outward_directions,
)
from .solvers import BoundaryConditions, SolveParams, heat_step, solve_laplace

__version__ = "0.1.0"

__all__ = [
    "BoundaryConditions",
    "BoundaryFrame",
    "FixtureResponse",
    "FixtureSpec",
    "GuidanceFixture",
    "PointCloud",
    "RegionLabeling",
    "RegionRole",
    "ScalarField",
    "SolveParams",
    "SparseOperator",
    "SurfaceFixtureError",
    "TangentFrame",
    "TangentVectorField",
    "ValueFixture",
    "apply_labels",
    "assemble_laplacian",
    "build_cloud",
    "build_guidance_fixture",
    "build_value_fixture",
    "estimate_frames",
    "extract_open_boundary",
    "gradient",
    "gradient_field",
    "heat_step",
    "outward_directions",
    "project_to_surface",
    "query",
    "simulate_agents",
    "solve_laplace",
]
