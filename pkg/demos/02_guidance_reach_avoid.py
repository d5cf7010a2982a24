"""Guide agents across a plate toward a target while steering around a hole.

A circular obstacle sits in the middle of the plate and a target strip on
the right edge. We build a guidance fixture (repulsive flow inside the
obstacle, attractive flow elsewhere), drop agents on the left side, and
march them along the field until they reach the target.

Run:  python3 demos/02_guidance_reach_avoid.py
"""

import numpy as np

import surface_fixtures as sf
from surface_fixtures.plyio import write_trajectories

rng = np.random.default_rng(7)

# --- plate with a central obstacle disk and a target strip ----------------
n = 60
xs, ys = np.meshgrid(np.linspace(0, 1, n), np.linspace(0, 1, n))
positions = np.column_stack([xs.ravel(), ys.ravel(), np.zeros(n * n)])

cloud = sf.build_cloud(positions, k=12)
sf.estimate_frames(cloud)
h = cloud.mean_spacing

labels = np.zeros(n * n, dtype=int)
labels[np.hypot(positions[:, 0] - 0.5, positions[:, 1] - 0.5) < 0.15] = 1  # obstacle
labels[positions[:, 0] > 0.92] = 2                                          # target
labeling = sf.apply_labels(cloud, labels)

spec = sf.FixtureSpec(
    kind="guidance",
    region_roles={1: sf.RegionRole("obstacle"), 2: sf.RegionRole("target")},
    params=sf.SolveParams(diffusion_time=h ** 2),
)
fixture = sf.build_guidance_fixture(cloud, labeling, spec)

# every free point carries a unit direction; obstacle interiors push outward
free = labeling.points_of(0)
defined = fixture.free_field.defined_mask(cloud.point_count)
print(f"free points with a defined direction: {defined[free].sum()}/{len(free)}")

# --- march agents from random free starts on the left half ----------------
candidates = free[positions[free, 0] < 0.3]
starts = rng.choice(candidates, size=12, replace=False)
trajectories = sf.simulate_agents(cloud, fixture, starts, step=1.5 * h, max_steps=400)

outcomes = [t.outcome for t in trajectories]
print(f"outcomes: {outcomes.count('success')} success, "
      f"{outcomes.count('stall')} stall, {outcomes.count('timeout')} timeout")

# none of the visited points may lie inside the obstacle
visited = np.concatenate([t.nearest_indices for t in trajectories])
print(f"obstacle-interior samples along trajectories: "
      f"{(labeling.region_of[visited] == 1).sum()} (expect 0)")

write_trajectories("trajectories.csv", trajectories)
print("wrote trajectories.csv (agent_id, step, x, y, z, outcome)")
