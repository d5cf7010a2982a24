"""Detect the physical rim of an open surface without any annotations.

Open boundaries (the edge of a sheet, the rim of a bowl) matter because
diffusion must treat them as insulating walls. Detection is purely
geometric: project each point's neighbors into its tangent plane and flag
points whose neighbors leave a large angular gap.

We check a flat sheet (every perimeter point flagged, interior clean) and
a closed sphere (nothing flagged), then a hemisphere whose equator rim is
recovered.

Run:  python3 demos/03_open_boundaries.py
"""

import numpy as np

import surface_fixtures as sf


def fibonacci_sphere(count, radius=1.0):
    """Evenly distributed sphere samples via the golden-angle lattice."""
    i = np.arange(count, dtype=np.float64)
    z = 1.0 - 2.0 * (i + 0.5) / count
    theta = np.pi * (1.0 + np.sqrt(5.0)) * i
    r = np.sqrt(1.0 - z * z)
    return radius * np.column_stack([r * np.cos(theta), r * np.sin(theta), z])


def report(name, cloud):
    sf.estimate_frames(cloud)
    labeling = sf.apply_labels(cloud, np.zeros(cloud.point_count, dtype=int))
    rim = sf.extract_open_boundary(cloud, labeling)[0]  # everything is region 0
    print(f"{name}: {len(rim)} boundary points out of {cloud.point_count}")
    return rim


# flat sheet: the perimeter is an open boundary
n = 40
xs, ys = np.meshgrid(np.linspace(0, 1, n), np.linspace(0, 1, n))
sheet = sf.build_cloud(np.column_stack([xs.ravel(), ys.ravel(), np.zeros(n * n)]))
rim = report("sheet 40x40", sheet)
perimeter = ((xs.ravel() % 1 == 0) | (ys.ravel() % 1 == 0)).nonzero()[0]
print(f"  matches the true perimeter: {set(rim) == set(perimeter)}")

# closed sphere: no boundary anywhere
sphere = sf.build_cloud(fibonacci_sphere(4000))
report("closed sphere", sphere)

# hemisphere: the equator rim comes back
pts = fibonacci_sphere(4000)
hemi = sf.build_cloud(pts[pts[:, 2] >= 0.0])
rim = report("hemisphere", hemi)
print(f"  max |z| among flagged points: {np.abs(hemi.positions[rim, 2]).max():.3f} "
      "(rim sits near z = 0)")
