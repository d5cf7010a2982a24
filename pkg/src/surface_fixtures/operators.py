"""Discrete Laplace-Beltrami assembly and tangent-plane gradients.

Sign convention: the stored stiffness L_pos is positive semidefinite with
zero row sums (off-diagonals <= 0), i.e. the NEGATIVE of the diffusion
generator. Transient diffusion is u' = -M^{-1} L_pos u; both the Laplace
and backward-Euler systems built from L_pos are SPD after constraint
elimination.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import RankDeficientStencil

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e8


@dataclass
class ScalarField:
    """Per-point real values; domain_mask marks where the field is defined."""

    values: np.ndarray
    domain_mask: np.ndarray | None = None

    def defined_mask(self, n=None):
        if self.domain_mask is not None:
            return self.domain_mask
        return np.ones(n if n is not None else len(self.values), dtype=bool)


@dataclass
class TangentVectorField:
    """Per-point 3-vectors lying in the local tangent planes."""

    vectors: np.ndarray
    domain_mask: np.ndarray | None = None

    def defined_mask(self, n=None):
        if self.domain_mask is not None:
            return self.domain_mask
        return np.ones(n if n is not None else len(self.vectors), dtype=bool)


@dataclass
class SparseOperator:
    """Graph-Laplacian stiffness + diagonal mass over the whole cloud.

    Attributes:
        stiffness: (n, n) CSR, symmetric PSD, zero row sums.
        mass: (n,) positive diagonal entries.
        kernel_bandwidth: Gaussian bandwidth epsilon (meters^2).
        component_of: (n,) connected-component label of the symmetrized graph.
        n_components: number of graph components (> 1 is reported, not fatal).
    """

    stiffness: sparse.csr_matrix
    mass: np.ndarray
    kernel_bandwidth: float
    component_of: np.ndarray
    n_components: int

    @property
    def size(self):
        return self.stiffness.shape[0]

    def submatrix(self, domain):
        """Sub-operator on the masked points with a zero-Neumann closure.

        The sub-block diagonal is rebuilt so row sums stay zero: edges
        leaving the mask are dropped entirely, so no information crosses
        the mask boundary.

        Returns (L_sub, mass_sub, global_indices).
        """
        domain = np.asarray(domain, dtype=bool)
        idx = np.flatnonzero(domain)
        L = self.stiffness[idx][:, idx].tolil()
        L.setdiag(0.0)
        L = L.tocsr()
        L = L - sparse.diags(np.asarray(L.sum(axis=1)).ravel())
        return L.tocsr(), self.mass[idx], idx


def assemble_laplacian(cloud, epsilon=None, density_corrected_mass=False):
    """Gaussian-kernel graph Laplacian over the symmetrized k-NN graph.

    Edges: union of directed k-NN edges. Weight w_ij = exp(-|pi-pj|^2/(4 eps)),
    eps defaulting to h^2. Mass: uniform h^2 per point, or the inverse-degree
    density-corrected variant when requested.
    """
    n = cloud.point_count
    h = cloud.mean_spacing
    if epsilon is None:
        epsilon = h * h

    rows = np.repeat(np.arange(n), cloud.k)
    cols = cloud.neighbor_indices.ravel()
    d2 = (cloud.neighbor_distances.ravel()) ** 2
    w = np.exp(-d2 / (4.0 * epsilon))
    W = sparse.coo_matrix((w, (rows, cols)), shape=(n, n)).tocsr()
    W = W.maximum(W.T)  # union symmetrization

    degree = np.asarray(W.sum(axis=1)).ravel()
    L = sparse.diags(degree) - W

    if density_corrected_mass:
        mass = h * h * degree.mean() / degree
    else:
        mass = np.full(n, h * h)

    n_components, component_of = connected_components(W, directed=False)
    if n_components > 1:
        logger.warning("neighbor graph has %d disconnected components", n_components)

    return SparseOperator(
        stiffness=L.tocsr(),
        mass=mass,
        kernel_bandwidth=float(epsilon),
        component_of=component_of,
        n_components=int(n_components),
    )


def gradient(cloud, field, index, epsilon=None):
    """In-plane gradient of a scalar field at one point, lifted to R^3.

    Weighted least-squares affine fit a + g . (q - p) over the tangent-plane
    coordinates of usable neighbors (Gaussian weights, bandwidth epsilon,
    default h^2). Neighbors outside the field's domain mask are skipped.

    Raises:
        RankDeficientStencil: fewer than 3 usable neighbors, or the normal
            matrix condition number exceeds 1e8.
    """
    frames = cloud.require_frames()
    if epsilon is None:
        epsilon = cloud.mean_spacing ** 2
    mask = field.defined_mask(cloud.point_count)
    if not mask[index]:
        raise RankDeficientStencil(index)

    nbrs = cloud.neighbor_indices[index]
    usable = nbrs[mask[nbrs]]
    if len(usable) < 3:
        raise RankDeficientStencil(index)

    frame = frames[index]
    offsets = cloud.positions[usable] - cloud.positions[index]
    u = offsets @ frame.e1
    v = offsets @ frame.e2
    d2 = (offsets ** 2).sum(axis=1)
    w = np.exp(-d2 / (4.0 * epsilon))

    # center row anchors the constant term
    A = np.column_stack([np.ones(len(usable) + 1),
                         np.concatenate([[0.0], u]),
                         np.concatenate([[0.0], v])])
    rhs = np.concatenate([[field.values[index]], field.values[usable]])
    sw = np.sqrt(np.concatenate([[1.0], w]))
    Aw = A * sw[:, None]
    N = Aw.T @ Aw
    if np.linalg.cond(N) > CONDITION_LIMIT:
        raise RankDeficientStencil(index)
    coeffs = np.linalg.solve(N, Aw.T @ (rhs * sw))
    return coeffs[1] * frame.e1 + coeffs[2] * frame.e2


def gradient_field(cloud, field, epsilon=None, normalize=False, zero_tol=1e-280):
    """Gradients at every defined point, as a TangentVectorField.

    Points with a rank-deficient stencil, or (when normalizing) with a
    gradient magnitude at or below zero_tol (a numerical-zero plateau),
    are marked undefined rather than given a fabricated direction.
    """
    n = cloud.point_count
    vectors = np.zeros((n, 3))
    defined = np.zeros(n, dtype=bool)
    mask = field.defined_mask(n)
    for i in np.flatnonzero(mask):
        try:
            vectors[i] = gradient(cloud, field, i, epsilon=epsilon)
            defined[i] = True
        except RankDeficientStencil:
            pass

    if normalize:
        norms = np.linalg.norm(vectors, axis=1)
        ok = defined & (norms > zero_tol)
        vectors[ok] /= norms[ok, None]
        vectors[~ok] = 0.0
        defined = ok

    return TangentVectorField(vectors=vectors, domain_mask=defined)
