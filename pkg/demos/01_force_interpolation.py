"""Interpolate contact-force limits over a plate from two annotated strips.

A robot polishing a plate should press with 2 N near the fragile left edge
and 10 N near the sturdy right edge. We annotate the two edge strips,
solve the harmonic interpolation over the free region, and export the
resulting per-point force field.

Run:  python3 demos/01_force_interpolation.py
"""

import numpy as np

import surface_fixtures as sf
from surface_fixtures.plyio import write_field

# --- build a plate cloud -------------------------------------------------
n = 60
xs, ys = np.meshgrid(np.linspace(0, 1, n), np.linspace(0, 1, n))
positions = np.column_stack([xs.ravel(), ys.ravel(), np.zeros(n * n)])

cloud = sf.build_cloud(positions, k=12)
sf.estimate_frames(cloud)
print(f"cloud: {cloud.point_count} points, mean spacing h = {cloud.mean_spacing:.4f}")

# --- annotate the two edge strips ----------------------------------------
labels = np.zeros(n * n, dtype=int)
labels[positions[:, 0] < 0.03] = 1   # fragile strip
labels[positions[:, 0] > 0.97] = 2   # sturdy strip
labeling = sf.apply_labels(cloud, labels)

# --- solve the value fixture ----------------------------------------------
spec = sf.FixtureSpec(
    kind="value",
    region_roles={
        1: sf.RegionRole("value", 2.0),
        2: sf.RegionRole("value", 10.0),
    },
    params=sf.SolveParams(diffusion_time=cloud.mean_spacing ** 2),
)
fixture = sf.build_value_fixture(cloud, labeling, spec)

field = fixture.field.values
print(f"force range: [{field.min():.2f}, {field.max():.2f}] N")
print(f"value at plate center: {field[(n // 2) * n + n // 2]:.2f} N (expect ~6 N)")

# --- query arbitrary workspace positions ----------------------------------
for p in ([0.25, 0.5, 0.08], [0.75, 0.5, -0.02]):
    r = sf.query(fixture, np.array(p))
    print(f"query {p} -> region {r.region}, force {r.value:.2f} N")

write_field("force_field.ply", cloud, fixture.field, labels=labeling.region_of)
print("wrote force_field.ply (view the 'u' property in any PLY viewer)")
