"""Laplace and implicit-heat solves under mixed boundary conditions.

Dirichlet data is enforced by row/column elimination, keeping the reduced
system SPD and making the discrete maximum principle exact. Zero-Neumann
boundaries need no action: the graph Laplacian's natural boundary behavior
is zero flux, so a masked sub-operator already behaves as an insulating
wall at its rim.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import splu

from .errors import SolverDivergence
from .operators import ScalarField

RESIDUAL_GUARD = 1e-6


@dataclass
class BoundaryConditions:
    """Dirichlet values plus (zero-valued) Neumann point sets.

    dirichlet maps point index -> prescribed value. neumann_zero is kept
    for documentation/validation; zero flux is the natural behavior and
    requires no equations.
    """

    dirichlet: dict = field(default_factory=dict)
    neumann_zero: set = field(default_factory=set)

    def __post_init__(self):
        overlap = set(self.dirichlet) & set(self.neumann_zero)
        if overlap:
            raise ValueError(f"points {sorted(overlap)} are both Dirichlet and Neumann")


@dataclass
class SolveParams:
    diffusion_time: float
    tolerance: float = 1e-9
    max_iterations: int = 5000
    steps: int = 1

    def __post_init__(self):
        if self.diffusion_time <= 0:
            raise ValueError("diffusion_time must be > 0")
        if not (0 < self.tolerance <= 1e-3):
            raise ValueError("tolerance must be in (0, 1e-3]")


def _setup(op, bc, domain):
    """Common reduction: sub-operator, local index maps, Dirichlet split."""
    n = op.size
    if domain is None:
        domain = np.ones(n, dtype=bool)
    else:
        domain = np.asarray(domain, dtype=bool)

    for i in list(bc.dirichlet) + list(bc.neumann_zero):
        if not domain[i]:
            raise ValueError(f"boundary point {i} lies outside the solve domain")

    L, mass, idx = op.submatrix(domain)
    local_of = np.full(n, -1, dtype=np.int64)
    local_of[idx] = np.arange(len(idx))

    m = len(idx)
    is_dirichlet = np.zeros(m, dtype=bool)
    g = np.zeros(m)
    for i, value in bc.dirichlet.items():
        is_dirichlet[local_of[i]] = True
        g[local_of[i]] = value
    return domain, L, mass, idx, is_dirichlet, g


def _solve_spd(A, b, tolerance):
    """Direct sparse solve with a residual guard."""
    if A.shape[0] == 0:
        return np.zeros(0)
    lu = splu(A.tocsc())
    x = lu.solve(b)
    scale = np.linalg.norm(b)
    if scale > 0:
        residual = np.linalg.norm(A @ x - b) / scale
        if residual > max(RESIDUAL_GUARD, tolerance):
            raise SolverDivergence(residual, 1)
    return x


def solve_laplace(op, bc, domain=None, tolerance=1e-9):
    """Harmonic interpolation of Dirichlet data over the masked domain.

    Connected components of the masked graph without any Dirichlet point
    get no equation; their points are left out of the result's domain
    mask (undefined) rather than filled with zeros.
    """
    domain, L, mass, idx, is_dirichlet, g = _setup(op, bc, domain)
    m = len(idx)

    n_comp, comp = connected_components(_pattern(L), directed=False)
    has_dirichlet = np.zeros(n_comp, dtype=bool)
    has_dirichlet[comp[is_dirichlet]] = True
    defined = has_dirichlet[comp]

    free = defined & ~is_dirichlet
    u = np.zeros(m)
    u[is_dirichlet] = g[is_dirichlet]
    if free.any():
        A = L[free][:, free]
        b = -(L[free][:, is_dirichlet] @ g[is_dirichlet])
        u[free] = _solve_spd(A, b, tolerance)
    # bit-exact Dirichlet rows
    u[is_dirichlet] = g[is_dirichlet]

    values = np.zeros(op.size)
    values[idx] = u
    mask = np.zeros(op.size, dtype=bool)
    mask[idx[defined]] = True
    return ScalarField(values=values, domain_mask=mask)


def heat_step(op, initial, bc, params, domain=None):
    """Backward-Euler diffusion step(s): (M + t L) u = M u0, Dirichlet pinned.

    Runs params.steps implicit steps of size params.diffusion_time.
    Dirichlet may be empty (pure decay of the initial data).
    """
    domain, L, mass, idx, is_dirichlet, g = _setup(op, bc, domain)
    t = params.diffusion_time
    M = sparse.diags(mass)

    free = ~is_dirichlet
    A = (M + t * L)[free][:, free]
    coupling = t * L[free][:, is_dirichlet]
    lu = splu(A.tocsc()) if A.shape[0] else None

    u = np.asarray(initial.values, dtype=np.float64)[idx].copy()
    u[is_dirichlet] = g[is_dirichlet]
    for _ in range(params.steps):
        b = mass[free] * u[free] - coupling @ g[is_dirichlet]
        if lu is not None:
            x = lu.solve(b)
            scale = np.linalg.norm(b)
            if scale > 0:
                residual = np.linalg.norm(A @ x - b) / scale
                if residual > max(RESIDUAL_GUARD, params.tolerance):
                    raise SolverDivergence(residual, 1)
            u[free] = x
        u[is_dirichlet] = g[is_dirichlet]

    values = np.zeros(op.size)
    values[idx] = u
    mask = np.zeros(op.size, dtype=bool)
    mask[idx] = True
    return ScalarField(values=values, domain_mask=mask)


def _pattern(L):
    """Adjacency pattern of the stiffness matrix (off-diagonal support)."""
    C = L.tocoo()
    keep = C.row != C.col
    return sparse.coo_matrix(
        (np.ones(keep.sum()), (C.row[keep], C.col[keep])), shape=L.shape
    )
