"""Region labeling, interface extraction, open-boundary detection.

Regions partition the cloud: id 0 is the free region, ids 1..N carry
annotated behaviors. Interfaces are point sets (not curves); a point of
region i is on the (i, j) interface iff one of its graph neighbors has
label j. Open boundaries are a property of the scan geometry alone and
are detected by the angular-gap test over ALL neighbors, label-blind.
"""

from dataclasses import dataclass

import numpy as np

from .errors import IsolatedBoundaryPoint, LengthMismatch, NonContiguousIds

DEFAULT_GAP_THRESHOLD = np.pi / 2


@dataclass
class BoundaryFrame:
    """Interface point together with its outward in-plane direction."""

    index: int
    outward_direction: np.ndarray


@dataclass
class RegionLabeling:
    """Per-point region ids plus derived boundary sets.

    Attributes:
        region_of: (n,) int array of region ids in 0..N.
        region_count: N + 1.
        interface_boundaries: dict (i, j) -> sorted int array of points of
            region i having at least one neighbor labeled j.
        open_boundaries: dict region id -> sorted int array of points of
            that region flagged as scan-boundary points (filled by
            extract_open_boundary; empty dict until then).
    """

    region_of: np.ndarray
    region_count: int
    interface_boundaries: dict
    open_boundaries: dict

    def points_of(self, region):
        return np.flatnonzero(self.region_of == region)

    def boundary_of(self, region):
        """All interface points of a region (union over exterior labels)."""
        sets = [
            pts
            for (i, _j), pts in self.interface_boundaries.items()
            if i == region
        ]
        if not sets:
            return np.array([], dtype=np.int64)
        return np.unique(np.concatenate(sets))


def apply_labels(cloud, labels):
    """Build a RegionLabeling from per-point region ids.

    Ids must form a contiguous range starting at 0. Interface sets are
    computed from the cloud's neighbor graph.

    Raises:
        LengthMismatch: labels length != point count.
        NonContiguousIds: ids skip values or do not start at 0.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != cloud.point_count:
        raise LengthMismatch(
            f"{len(labels)} labels for {cloud.point_count} points"
        )
    ids = np.unique(labels)
    n_regions = int(ids.max()) + 1 if len(ids) else 0
    if ids[0] != 0 or len(ids) != n_regions:
        raise NonContiguousIds(set(ids.tolist()))

    neighbor_labels = labels[cloud.neighbor_indices]  # (n, k)
    interface = {}
    for i in range(n_regions):
        in_region = labels == i
        for j in range(n_regions):
            if i == j:
                continue
            has_j_neighbor = (neighbor_labels == j).any(axis=1)
            pts = np.flatnonzero(in_region & has_j_neighbor)
            if len(pts):
                interface[(i, j)] = pts

    return RegionLabeling(
        region_of=labels,
        region_count=n_regions,
        interface_boundaries=interface,
        open_boundaries={},
    )


def max_angular_gap(cloud, index):
    """Largest angular gap (radians) between projected neighbor directions."""
    frame = cloud.require_frames()[index]
    offsets = cloud.positions[cloud.neighbor_indices[index]] - cloud.positions[index]
    u = offsets @ frame.e1
    v = offsets @ frame.e2
    angles = np.sort(np.arctan2(v, u))
    gaps = np.diff(angles)
    wrap = 2 * np.pi - (angles[-1] - angles[0])
    return float(max(gaps.max() if len(gaps) else 0.0, wrap))


def extract_open_boundary(cloud, labeling, angle_threshold=DEFAULT_GAP_THRESHOLD):
    """Flag scan-boundary points by the angular-gap test; fills the labeling.

    A point is an open-boundary point iff the maximum polar-angle gap
    between its tangent-plane-projected neighbors exceeds the threshold.
    All neighbors participate regardless of label. Returns the
    open_boundaries dict (region id -> point indices) and stores it on
    the labeling.
    """
    cloud.require_frames()
    n = cloud.point_count
    flagged = np.zeros(n, dtype=bool)
    for i in range(n):
        flagged[i] = max_angular_gap(cloud, i) > angle_threshold

    open_boundaries = {}
    for r in range(labeling.region_count):
        pts = np.flatnonzero(flagged & (labeling.region_of == r))
        open_boundaries[r] = pts
    labeling.open_boundaries = open_boundaries
    return open_boundaries


def outward_directions(cloud, labeling, region):
    """Outward in-plane unit directions at the interface points of a region.

    The raw direction at an interface point is the mean offset toward its
    neighbors outside the region. To suppress lattice staircase bias the
    raw directions are averaged over each point and its interface-point
    neighbors before projecting onto the tangent plane and normalizing.
    """
    frames = cloud.require_frames()
    rim = labeling.boundary_of(region)
    rim_set = set(rim.tolist())

    def raw(index):
        nbrs = cloud.neighbor_indices[index]
        outside = nbrs[labeling.region_of[nbrs] != region]
        if len(outside) == 0:
            raise IsolatedBoundaryPoint(int(index))
        offset = (cloud.positions[outside] - cloud.positions[index]).mean(axis=0)
        return offset / np.linalg.norm(offset)

    result = []
    for index in rim:
        votes = [raw(index)]
        for j in cloud.neighbor_indices[index]:
            if int(j) in rim_set:
                votes.append(raw(int(j)))
        mean_dir = np.mean(votes, axis=0)
        frame = frames[index]
        in_plane = mean_dir - np.dot(mean_dir, frame.normal) * frame.normal
        norm = np.linalg.norm(in_plane)
        if norm < 1e-300:
            raise IsolatedBoundaryPoint(int(index))
        result.append(BoundaryFrame(index=int(index), outward_direction=in_plane / norm))
    return result
