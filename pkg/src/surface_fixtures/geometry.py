"""Point-cloud container, neighbor queries, tangent frames, surface projection.

The cloud is immutable after construction: neighbor lists, mean spacing and
(once estimated) tangent frames are cached on the instance and safe to share
across threads.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial import cKDTree

from .errors import (
    DegenerateNeighborhood,
    EmptyCloud,
    FramesMissing,
    InsufficientPoints,
    NonFiniteCoordinate,
)

DUPLICATE_TOL = 1e-9


@dataclass
class TangentFrame:
    """Local orthonormal frame: two in-plane directions plus the normal.

    Satisfies e1 x e2 = normal (right-handed).
    """

    normal: np.ndarray
    e1: np.ndarray
    e2: np.ndarray


@dataclass
class PointCloud:
    """Surface sample with a k-NN graph and spacing statistics.

    Attributes:
        positions: (n, 3) float64 point positions in meters.
        colors: optional (n, 3) uint8 RGB, carried through untouched.
        neighbor_indices: (n, k) indices of the k nearest neighbors,
            self excluded, sorted by ascending distance.
        neighbor_distances: (n, k) matching Euclidean distances.
        mean_spacing: average nearest-neighbor distance h.
    """

    positions: np.ndarray
    colors: np.ndarray | None
    neighbor_indices: np.ndarray
    neighbor_distances: np.ndarray
    mean_spacing: float
    k: int
    _kdtree: cKDTree = field(repr=False)
    frames: list[TangentFrame] | None = field(default=None, repr=False)

    @property
    def point_count(self):
        return len(self.positions)

    def require_frames(self):
        if self.frames is None:
            raise FramesMissing("call estimate_frames(cloud) first")
        return self.frames

    def normals(self):
        """(n, 3) array of frame normals."""
        return np.array([f.normal for f in self.require_frames()])


def build_cloud(positions, colors=None, k=12):
    """Build an immutable PointCloud with a k-NN graph.

    Duplicate points (pairwise distance < 1e-9) are merged, keeping the
    first occurrence; colors are subset accordingly.

    Raises:
        EmptyCloud: no input points.
        NonFiniteCoordinate: NaN/inf in positions.
        InsufficientPoints: fewer than k+1 points after deduplication.
    """
    positions = np.asarray(positions, dtype=np.float64)
    if positions.size == 0:
        raise EmptyCloud("no points given")
    positions = positions.reshape(-1, 3)
    bad = ~np.isfinite(positions).all(axis=1)
    if bad.any():
        raise NonFiniteCoordinate(int(np.flatnonzero(bad)[0]))
    if colors is not None:
        colors = np.asarray(colors, dtype=np.uint8).reshape(-1, 3)
        if len(colors) != len(positions):
            raise ValueError("colors length does not match positions")

    keep = _dedup_mask(positions)
    positions = positions[keep]
    if colors is not None:
        colors = colors[keep]

    n = len(positions)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n < k + 1:
        raise InsufficientPoints(k, n)

    tree = cKDTree(positions)
    dists, idx = tree.query(positions, k=k + 1)
    # first column is the point itself (distance 0)
    neighbor_indices = idx[:, 1:].astype(np.int64)
    neighbor_distances = dists[:, 1:]
    mean_spacing = float(neighbor_distances[:, 0].mean())

    return PointCloud(
        positions=positions,
        colors=colors,
        neighbor_indices=neighbor_indices,
        neighbor_distances=neighbor_distances,
        mean_spacing=mean_spacing,
        k=k,
        _kdtree=tree,
    )


def _dedup_mask(positions):
    """Boolean keep-mask dropping points within DUPLICATE_TOL of an earlier one."""
    tree = cKDTree(positions)
    pairs = tree.query_pairs(DUPLICATE_TOL, output_type="ndarray")
    keep = np.ones(len(positions), dtype=bool)
    if len(pairs):
        # drop the later index of every close pair
        keep[pairs.max(axis=1)] = False
    return keep


def estimate_frames(cloud):
    """Per-point tangent frames from neighborhood PCA, globally oriented.

    The normal is the eigenvector of the smallest covariance eigenvalue.
    Orientation is made consistent by greedy propagation along a minimum
    spanning tree of the neighbor graph, seeded at the point of maximal z
    (seed normal flipped toward +z). Frames are cached on the cloud.

    Raises:
        DegenerateNeighborhood: the two largest covariance eigenvalues are
            not both above 1e-12 times the largest (collinear stencil).
    """
    if cloud.frames is not None:
        return cloud.frames

    n = cloud.point_count
    normals = np.empty((n, 3))
    e1s = np.empty((n, 3))
    for i in range(n):
        nbrs = cloud.positions[cloud.neighbor_indices[i]]
        pts = np.vstack([cloud.positions[i], nbrs])
        pts = pts - pts.mean(axis=0)
        cov = pts.T @ pts
        evals, evecs = np.linalg.eigh(cov)
        if evals[2] <= 0 or evals[1] <= 1e-12 * evals[2]:
            raise DegenerateNeighborhood(i)
        normals[i] = evecs[:, 0]
        e1s[i] = evecs[:, 2]

    _orient_normals(cloud, normals)

    frames = []
    for i in range(n):
        nrm = normals[i]
        e1 = e1s[i] - np.dot(e1s[i], nrm) * nrm
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(nrm, e1)
        frames.append(TangentFrame(normal=nrm, e1=e1, e2=e2))
    cloud.frames = frames
    return frames


def _orient_normals(cloud, normals):
    """Flip normals in place for global consistency via MST propagation."""
    n = len(normals)
    rows = np.repeat(np.arange(n), cloud.k)
    cols = cloud.neighbor_indices.ravel()
    dists = cloud.neighbor_distances.ravel()
    graph = coo_matrix((dists + 1e-300, (rows, cols)), shape=(n, n))
    mst = minimum_spanning_tree(graph)
    mst = mst + mst.T
    indptr, indices = mst.indptr, mst.indices

    seed = int(np.argmax(cloud.positions[:, 2]))
    if normals[seed, 2] < 0:
        normals[seed] = -normals[seed]

    visited = np.zeros(n, dtype=bool)
    stack = [seed]
    visited[seed] = True
    while stack:
        u = stack.pop()
        for v in indices[indptr[u] : indptr[u + 1]]:
            if not visited[v]:
                visited[v] = True
                if np.dot(normals[v], normals[u]) < 0:
                    normals[v] = -normals[v]
                stack.append(v)
    # disconnected leftovers (rare): orient each remaining point by itself
    for i in np.flatnonzero(~visited):
        if normals[i, 2] < 0:
            normals[i] = -normals[i]


def project_to_surface(cloud, query):
    """Nearest cloud point and the query projected onto its tangent plane.

    Returns (index, footpoint). Idempotent on cloud points.
    """
    frames = cloud.require_frames()
    query = np.asarray(query, dtype=np.float64)
    _, i = cloud._kdtree.query(query)
    i = int(i)
    nrm = frames[i].normal
    offset = query - cloud.positions[i]
    footpoint = query - np.dot(offset, nrm) * nrm
    return i, footpoint
