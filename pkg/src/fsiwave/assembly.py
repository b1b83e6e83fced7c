"""Finite element assembly of the coupled fluid-solid system at fixed s.

The discrete unknown is the stacked vector (p, u) of fluid pressure nodal
values and solid displacement nodal values (bottom-boundary nodes removed).
All s-independent blocks are real sparse matrices assembled once; the
transparent boundary condition on the truncation plane is applied
matrix-free through lateral FFTs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from .dtn import beta
from .geometry import (GAUSS_WEIGHTS_3D, QUAD_SHAPE_VALS,
                       SHAPE_GRADS, SHAPE_VALS, MappedMesh)
from .physics import MaterialParams, SourceTerm
from .spectral import SpectralTrace


def _physical_gradients(inv: np.ndarray) -> np.ndarray:
    """Basis gradients in physical coordinates, (cells, qp, node, dim)."""
    return np.einsum("cqji,qaj->cqai", inv, SHAPE_GRADS)


def _scatter(rows, cols, vals, shape):
    mat = sp.coo_matrix((vals.ravel(), (rows.ravel(), cols.ravel())),
                        shape=shape)
    return mat.tocsr()


def _scalar_matrices(cells, det, inv, n_nodes):
    """Scalar stiffness and mass over one slab."""
    grads = _physical_gradients(inv)
    w = det * GAUSS_WEIGHTS_3D                       # (c, q)
    k_loc = np.einsum("cqai,cqbi,cq->cab", grads, grads, w)
    m_loc = np.einsum("qa,qb,cq->cab", SHAPE_VALS, SHAPE_VALS, w)
    rows = np.broadcast_to(cells[:, :, None], k_loc.shape)
    cols = np.broadcast_to(cells[:, None, :], k_loc.shape)
    shape = (n_nodes, n_nodes)
    return _scatter(rows, cols, k_loc, shape), _scatter(rows, cols, m_loc, shape)


def _div_matrix(cells, det, inv, n_nodes):
    """Vector matrix with entries int (d_i N_a)(d_j N_b), dofs 3*node+comp."""
    grads = _physical_gradients(inv)
    w = det * GAUSS_WEIGHTS_3D
    loc = np.einsum("cqai,cqbj,cq->caibj", grads, grads, w)
    dofs = 3 * cells[:, :, None] + np.arange(3)[None, None, :]  # (c, 8, 3)
    rows = np.broadcast_to(dofs[:, :, :, None, None], loc.shape)
    cols = np.broadcast_to(dofs[:, None, None, :, :], loc.shape)
    return _scatter(rows, cols, loc, (3 * n_nodes, 3 * n_nodes))


def _lateral_cells(n):
    """Corner lateral indices of the N x N interface cells."""
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    i = i.ravel()
    j = j.ravel()
    ip = (i + 1) % n
    jp = (j + 1) % n
    ids = np.stack([j * n + i, j * n + ip, jp * n + ip, jp * n + i], axis=1)
    ci = np.stack([i, ip, ip, i], axis=1)
    cj = np.stack([j, j, jp, jp], axis=1)
    # unwrapped corner coordinates for quadrature-point positions
    iu = np.stack([i, i + 1, i + 1, i], axis=1)
    ju = np.stack([j, j, j + 1, j + 1], axis=1)
    return ids, ci, cj, iu, ju


def _interface_quadrature(mesh: MappedMesh):
    """Quadrature data on the interface: corner lateral ids, physical
    quadrature points, interpolated covector, and the area scale."""
    n = mesh.n_lateral
    dx = mesh.period / n
    ids, ci, cj, iu, ju = _lateral_cells(n)
    fvals = mesh.surfaces.f_samples[ci, cj]          # (nc, 4)
    cov = mesh.covector[ci, cj]                      # (nc, 4, 3)
    xc = iu * dx
    yc = ju * dx
    q = QUAD_SHAPE_VALS                              # (4 qp, 4 corners)
    pts = np.empty((ids.shape[0], 4, 3))
    pts[..., 0] = np.einsum("qa,ca->cq", q, xc)
    pts[..., 1] = np.einsum("qa,ca->cq", q, yc)
    pts[..., 2] = np.einsum("qa,ca->cq", q, fvals)
    covq = np.einsum("qa,cak->cqk", q, cov)
    scale = (dx / 2.0) ** 2                          # reference-square Jacobian
    return ids, pts, covq, scale


def _coupling_matrix(mesh: MappedMesh, n_p, n_u):
    """C[i, 3*b+k] = int_Gamma0 phi_i phi_b ncov_k dr over the interface."""
    n = mesh.n_lateral
    ids, _, covq, scale = _interface_quadrature(mesh)
    q = QUAD_SHAPE_VALS
    loc = scale * np.einsum("qa,qb,cqk->cabk", q, q, covq)
    p_rows = ids                                     # fluid layer 0 node ids
    solid_nodes = mesh.nz_solid * n * n + ids
    u_cols = 3 * (solid_nodes - n * n)               # bottom layer removed
    rows = np.broadcast_to(p_rows[:, :, None, None], loc.shape)
    cols = np.broadcast_to(u_cols[:, None, :, None], loc.shape) \
        + np.arange(3)[None, None, None, :]
    return _scatter(rows, cols, loc, (n_p, n_u))


@dataclass(frozen=True)
class SystemBlocks:
    """The s-independent real sparse building blocks."""

    k1: sp.csr_matrix        # fluid stiffness
    m1: sp.csr_matrix        # fluid mass
    k2mu: sp.csr_matrix      # solid component-wise stiffness
    k2div: sp.csr_matrix     # solid grad-div matrix
    m2: sp.csr_matrix        # solid vector mass
    c: sp.csr_matrix         # interface coupling, (n_p, n_u)

    @property
    def n_p(self) -> int:
        return self.k1.shape[0]

    @property
    def n_u(self) -> int:
        return self.m2.shape[0]


def assemble_blocks(mesh: MappedMesh) -> SystemBlocks:
    n = mesh.n_lateral
    n_p = mesh.n_fluid_nodes
    k1, m1 = _scalar_matrices(mesh.fluid_cells, mesh.fluid_jac_det,
                              mesh.fluid_jac_inv, n_p)
    ks, ms = _scalar_matrices(mesh.solid_cells, mesh.solid_jac_det,
                              mesh.solid_jac_inv, mesh.n_solid_nodes)
    kdiv = _div_matrix(mesh.solid_cells, mesh.solid_jac_det,
                       mesh.solid_jac_inv, mesh.n_solid_nodes)
    cut = 3 * n * n                                  # bottom-layer dofs
    k2mu = sp.kron(ks, sp.eye(3), format="csr")[cut:, cut:]
    m2 = sp.kron(ms, sp.eye(3), format="csr")[cut:, cut:]
    k2div = kdiv[cut:, cut:].tocsr()
    n_u = k2mu.shape[0]
    c = _coupling_matrix(mesh, n_p, n_u)
    return SystemBlocks(k1, m1, k2mu.tocsr(), k2div, m2.tocsr(), c)


class SystemMatrix:
    """System operator at a fixed Laplace parameter s (Re s > 0).

    The sparse part collects the volume and interface terms; the transparent
    boundary condition acts matrix-free on the truncation-plane pressure
    nodes through lateral FFTs.
    """

    def __init__(self, mesh: MappedMesh, mat: MaterialParams, s: complex,
                 blocks: SystemBlocks | None = None):
        if np.real(s) <= 0:
            raise ValueError("Laplace parameter must satisfy Re s > 0")
        self.mesh = mesh
        self.mat = mat
        self.s = complex(s)
        self.blocks = blocks if blocks is not None else assemble_blocks(mesh)
        b = self.blocks
        sb = np.conj(self.s)
        app = (1.0 / self.s) * b.k1 + (self.s / mat.c**2) * b.m1
        auu = (mat.rho1 * sb) * (mat.mu * b.k2mu + (mat.lam + mat.mu) * b.k2div) \
            + (mat.rho1 * mat.rho2 * self.s * abs(self.s) ** 2) * b.m2
        apu = (-mat.rho1 * self.s) * b.c
        aup = (mat.rho1 * sb) * b.c.conj().T
        self.sparse = sp.bmat([[app, apu], [aup, auu]], format="csr")
        n = mesh.n_lateral
        xi_sq = SpectralTrace(np.zeros((n, n)), mesh.period).xi_sq
        self.beta_grid = beta(xi_sq, self.s, mat.c)
        self.node_measure = (mesh.period / n) ** 2
        self.gamma_h = mesh.gamma_h_nodes

    @property
    def shape(self):
        return self.sparse.shape

    @property
    def n_p(self) -> int:
        return self.blocks.n_p

    def _tbc_apply(self, p_full: np.ndarray) -> np.ndarray:
        """-(1/s) <B p, .> pairing contribution on the plane nodes."""
        n = self.mesh.n_lateral
        grid = p_full[self.gamma_h].reshape(n, n)
        bp = np.fft.ifft2(-self.beta_grid * np.fft.fft2(grid))
        return (-1.0 / self.s) * self.node_measure * bp.ravel()

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        y = self.sparse @ x
        y[self.gamma_h] += self._tbc_apply(x[: self.n_p])
        return y

    def quadratic_form(self, v: np.ndarray) -> complex:
        """a(v; v) including the transparent boundary term."""
        return complex(np.vdot(v, self.matvec(v)))

    def as_linear_operator(self) -> LinearOperator:
        return LinearOperator(self.shape, matvec=self.matvec, dtype=complex)

    @cached_property
    def tbc_dense(self) -> np.ndarray:
        """Dense nodal matrix of the boundary term (small N only)."""
        n = self.mesh.n_lateral
        eye = np.eye(n * n, dtype=complex).reshape(n * n, n, n)
        cols = np.fft.ifft2(-self.beta_grid[None] * np.fft.fft2(eye,
                                                                axes=(1, 2)),
                            axes=(1, 2))
        return (-1.0 / self.s) * self.node_measure * cols.reshape(n * n, -1).T

    def dense_matrix(self) -> np.ndarray:
        full = np.asarray(self.sparse.todense(), dtype=complex)
        idx = self.gamma_h
        full[np.ix_(idx, idx)] += self.tbc_dense
        return full


def assemble_system(mesh: MappedMesh, mat: MaterialParams, s: complex,
                    blocks: SystemBlocks | None = None) -> SystemMatrix:
    return SystemMatrix(mesh, mat, s, blocks)


# ---------------------------------------------------------------------------
# load vectors
# ---------------------------------------------------------------------------

def _volume_points(cell_coords):
    return np.einsum("qa,cai->cqi", SHAPE_VALS, cell_coords)


def fluid_volume_load(mesh: MappedMesh, func) -> np.ndarray:
    """int_Omega1 func * phi_i for the fluid scalar basis."""
    pts = _volume_points(mesh.fluid_cell_coords)
    nc = pts.shape[0]
    vals = np.asarray(func(pts.reshape(-1, 3))).reshape(nc, 8)
    w = mesh.fluid_jac_det * GAUSS_WEIGHTS_3D
    loc = np.einsum("qa,cq,cq->ca", SHAPE_VALS, vals, w)
    out = np.zeros(mesh.n_fluid_nodes, dtype=complex)
    np.add.at(out, mesh.fluid_cells, loc)
    return out


def solid_volume_load(mesh: MappedMesh, func) -> np.ndarray:
    """int_Omega2 func . psi_i for the solid vector basis (free dofs)."""
    pts = _volume_points(mesh.solid_cell_coords)
    nc = pts.shape[0]
    vals = np.asarray(func(pts.reshape(-1, 3))).reshape(nc, 8, 3)
    w = mesh.solid_jac_det * GAUSS_WEIGHTS_3D
    loc = np.einsum("qa,cqk,cq->cak", SHAPE_VALS, vals, w)
    n2 = mesh.n_lateral ** 2
    out = np.zeros(3 * (mesh.n_solid_nodes - n2), dtype=complex)
    nodes = mesh.solid_cells
    free = nodes >= n2
    dofs = 3 * (nodes - n2)
    for comp in range(3):
        np.add.at(out, dofs[free] + comp, loc[..., comp][free])
    return out


def interface_scalar_load(mesh: MappedMesh, func) -> np.ndarray:
    """int_Gamma0 func(point, covector) * phi_i dr on fluid interface nodes.

    ``func(points, covectors)`` receives flattened (n, 3) arrays and returns
    (n,) complex values; surface-measure factors must be folded into the
    covector by the caller.
    """
    ids, pts, covq, scale = _interface_quadrature(mesh)
    nc = ids.shape[0]
    vals = np.asarray(func(pts.reshape(-1, 3), covq.reshape(-1, 3))).reshape(nc, 4)
    loc = scale * np.einsum("qa,cq->ca", QUAD_SHAPE_VALS, vals)
    out = np.zeros(mesh.n_fluid_nodes, dtype=complex)
    np.add.at(out, ids, loc)
    return out


def interface_vector_load(mesh: MappedMesh, func) -> np.ndarray:
    """int_Gamma0 func(point, covector) . psi_i dr on solid interface dofs."""
    ids, pts, covq, scale = _interface_quadrature(mesh)
    nc = ids.shape[0]
    vals = np.asarray(func(pts.reshape(-1, 3), covq.reshape(-1, 3))).reshape(nc, 4, 3)
    loc = scale * np.einsum("qa,cqk->cak", QUAD_SHAPE_VALS, vals)
    n2 = mesh.n_lateral ** 2
    out = np.zeros(3 * (mesh.n_solid_nodes - n2), dtype=complex)
    solid_nodes = mesh.nz_solid * n2 + ids
    dofs = 3 * (solid_nodes - n2)
    for comp in range(3):
        np.add.at(out, dofs + comp, loc[..., comp])
    return out


def assemble_rhs(mesh: MappedMesh, mat: MaterialParams, s: complex,
                 source: SourceTerm) -> np.ndarray:
    """Right-hand side -rho1 conj(s) int j(s) . psi_i on the solid."""
    mult, spatial = source.transform(s)
    load = solid_volume_load(mesh, spatial)
    b = np.zeros(mesh.n_fluid_nodes + load.size, dtype=complex)
    b[mesh.n_fluid_nodes:] = -mat.rho1 * np.conj(s) * mult * load
    return b


# ---------------------------------------------------------------------------
# coercivity
# ---------------------------------------------------------------------------

def coercivity_gap(matrix: SystemMatrix, v: np.ndarray) -> dict:
    """Re a(v; v) minus its theoretical lower bound, with both sides."""
    b = matrix.blocks
    mat = matrix.mat
    s = matrix.s
    s1 = np.real(s)
    p = v[: b.n_p]
    u = v[b.n_p:]
    grad_p = np.real(np.vdot(p, b.k1 @ p))
    mass_p = np.real(np.vdot(p, b.m1 @ p))
    frob_u = np.real(np.vdot(u, b.k2mu @ u))
    div_u = np.real(np.vdot(u, b.k2div @ u))
    mass_u = np.real(np.vdot(u, b.m2 @ u))
    s_sq = abs(s) ** 2
    kappa = min(1.0, 1.0 / mat.c**2)
    m = min(mat.rho1 * mat.mu, mat.rho1 * (mat.lam + mat.mu),
            mat.rho1 * mat.rho2)
    bound = kappa * (s1 / s_sq * (grad_p + s_sq * mass_p)
                     + s1 * m * (frob_u + div_u + s_sq * mass_u))
    value = np.real(matrix.quadratic_form(v))
    return {"re_a": value, "bound": bound, "gap": value - bound}
