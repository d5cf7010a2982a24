"""Command-line front-end for batch workflows.

Subcommands: info, boundaries, solve-values, solve-guidance, simulate,
serve. Each prints one machine-readable JSON summary line to stdout.
Exit codes: 0 success, 2 validation errors, 3 solver errors.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import geometry, plyio, segmentation, specfile
from .errors import (
    NoTargetRegion,
    SolverDivergence,
    SpecValidationError,
    SurfaceFixtureError,
)
from .fixtures import build_guidance_fixture, build_value_fixture, simulate_agents
from .operators import assemble_laplacian

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3


def _load_pipeline(cloud_path, spec_path=None):
    positions, labels, colors = plyio.read_cloud(cloud_path)
    spec = options = None
    k = 12
    if spec_path is not None:
        if not os.path.exists(spec_path):
            raise SpecValidationError(f"spec file not found: {spec_path}")
        spec, options = specfile.load_spec(spec_path)
        k = options.k
    cloud = geometry.build_cloud(
        positions, colors=colors, k=min(k, max(1, len(positions) - 1))
    )
    labeling = segmentation.apply_labels(cloud, labels[: cloud.point_count])
    if spec is not None:
        specfile.resolve_params(spec, options, cloud.mean_spacing)
        present = set(np.unique(labeling.region_of).tolist())
        missing = [r for r in spec.region_roles if r not in present]
        if missing:
            raise SpecValidationError(
                f"spec names regions {missing} absent from the cloud labels"
            )
    return cloud, labeling, spec, options


def _summary(payload):
    print(json.dumps(payload, sort_keys=True))


def cmd_info(args):
    cloud, labeling, _, _ = _load_pipeline(args.cloud)
    op = assemble_laplacian(cloud)
    counts = {
        int(r): int((labeling.region_of == r).sum())
        for r in range(labeling.region_count)
    }
    _summary(
        {
            "command": "info",
            "n_points": cloud.point_count,
            "h": cloud.mean_spacing,
            "k": cloud.k,
            "regions": counts,
            "graph_components": op.n_components,
        }
    )
    return EXIT_OK


def cmd_boundaries(args):
    cloud, labeling, _, _ = _load_pipeline(args.cloud)
    geometry.estimate_frames(cloud)
    open_b = segmentation.extract_open_boundary(
        cloud, labeling, angle_threshold=args.threshold
    )
    if args.out:
        from .operators import ScalarField

        flags = np.zeros(cloud.point_count)
        for pts in open_b.values():
            flags[pts] = 1.0
        plyio.write_field(
            args.out, cloud, ScalarField(values=flags), labels=labeling.region_of
        )
    _summary(
        {
            "command": "boundaries",
            "open_boundary_counts": {int(r): len(v) for r, v in open_b.items()},
            "interfaces": sorted(
                f"{i}-{j}" for (i, j) in labeling.interface_boundaries
            ),
            "out": args.out,
        }
    )
    return EXIT_OK


def cmd_solve_values(args):
    cloud, labeling, spec, _ = _load_pipeline(args.cloud, args.spec)
    geometry.estimate_frames(cloud)
    t0 = time.perf_counter()
    fixture = build_value_fixture(cloud, labeling, spec)
    solve_ms = (time.perf_counter() - t0) * 1000
    plyio.write_field(args.out, cloud, fixture.field, labels=labeling.region_of)
    mask = fixture.field.domain_mask
    _summary(
        {
            "command": "solve-values",
            "out": args.out,
            "undefined_count": int((~mask).sum()),
            "min": float(fixture.field.values[mask].min()),
            "max": float(fixture.field.values[mask].max()),
            "solve_ms": solve_ms,
        }
    )
    return EXIT_OK


def cmd_solve_guidance(args):
    cloud, labeling, spec, options = _load_pipeline(args.cloud, args.spec)
    geometry.estimate_frames(cloud)
    t0 = time.perf_counter()
    op = assemble_laplacian(cloud, epsilon=options.epsilon)
    fixture = build_guidance_fixture(cloud, labeling, spec, operator=op)
    solve_ms = (time.perf_counter() - t0) * 1000
    plyio.write_field(args.out, cloud, fixture.free_field, labels=labeling.region_of)
    mask = fixture.free_field.defined_mask(cloud.point_count)
    free = labeling.region_of == 0
    _summary(
        {
            "command": "solve-guidance",
            "out": args.out,
            "undefined_count": int((free & ~mask).sum()),
            "targets": fixture.target_regions,
            "obstacles": fixture.obstacle_regions,
            "solve_ms": solve_ms,
        }
    )
    return EXIT_OK


def cmd_simulate(args):
    cloud, labeling, spec, options = _load_pipeline(args.cloud, args.spec)
    geometry.estimate_frames(cloud)
    op = assemble_laplacian(cloud, epsilon=options.epsilon)
    fixture = build_guidance_fixture(cloud, labeling, spec, operator=op)

    seed = args.seed if args.seed is not None else options.seed
    rng = np.random.default_rng(seed)
    free_points = np.flatnonzero(labeling.region_of == 0)
    n = min(args.starts, len(free_points))
    starts = rng.choice(free_points, size=n, replace=False)

    step = args.step if args.step else cloud.mean_spacing
    trajectories = simulate_agents(cloud, fixture, starts, step, args.max_steps)
    plyio.write_trajectories(args.out, trajectories)
    outcomes = {}
    for t in trajectories:
        outcomes[t.outcome] = outcomes.get(t.outcome, 0) + 1
    _summary(
        {
            "command": "simulate",
            "out": args.out,
            "agents": len(trajectories),
            "outcomes": outcomes,
            "step": step,
            "seed": seed,
        }
    )
    return EXIT_OK


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="surface-fixtures",
        description="Diffusion-based virtual fixtures on surface point clouds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_cloud(p):
        p.add_argument("--cloud", required=True, help="input PLY file")

    p = sub.add_parser("info", help="cloud statistics")
    add_cloud(p)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("boundaries", help="interface + open-boundary report")
    add_cloud(p)
    p.add_argument("--threshold", type=float, default=float(np.pi / 2))
    p.add_argument("--out", help="optional PLY with boundary flags")
    p.set_defaults(func=cmd_boundaries)

    p = sub.add_parser("solve-values", help="harmonic value fixture")
    add_cloud(p)
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_solve_values)

    p = sub.add_parser("solve-guidance", help="guidance flow fixture")
    add_cloud(p)
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_solve_guidance)

    p = sub.add_parser("simulate", help="run agents along a guidance fixture")
    add_cloud(p)
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True, help="trajectory CSV")
    p.add_argument("--starts", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--step", type=float, default=None, help="default: mean spacing h")
    p.add_argument("--max-steps", type=int, default=1000)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the HTTP annotation/solve service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8711)
    p.set_defaults(func=cmd_serve)

    return parser


def cli_main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecValidationError, NoTargetRegion) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverDivergence as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (SurfaceFixtureError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
