"""Discrete Sobolev norms and verifiers for the trace inequalities.

Trace norms on the truncation plane and on the flattened interface use the
lateral Fourier definition; volume norms use the same tensor-product Gauss
quadrature as the element assembly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (GAUSS_WEIGHTS_3D, SHAPE_GRADS, SHAPE_VALS, MappedMesh,
                       RoughSurfacePair, build_mesh)
from .spectral import SpectralTrace

REPORT_TOL = 1e-12


@dataclass
class NormReport:
    name: str
    lhs: float
    rhs: float
    extras: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        if self.rhs == 0.0:
            return 0.0 if self.lhs == 0.0 else np.inf
        return self.lhs / self.rhs

    @property
    def passed(self) -> bool:
        return self.ratio <= 1.0 + REPORT_TOL


def trace_half_norm(trace: SpectralTrace, alpha: float) -> float:
    """Discrete H^alpha norm on the periodic plane via the mode sum."""
    weights = (1.0 + trace.xi_sq) ** alpha
    return float(np.sqrt(
        trace.period**2 * np.sum(weights * np.abs(trace.coeffs) ** 2)
    ))


# ---------------------------------------------------------------------------
# trace inequality on a flat slab (Fourier in r, piecewise linear in z)
# ---------------------------------------------------------------------------

def _pwl_sq_integral(vals: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Exact integral of |piecewise linear|^2 in z; vals (..., nz+1)."""
    a = vals[..., :-1]
    b = vals[..., 1:]
    hz = np.diff(z)
    seg = hz * (np.abs(a) ** 2 + np.abs(b) ** 2 + np.real(a * np.conj(b))) / 3.0
    return seg.sum(axis=-1)


def _pwl_deriv_sq_integral(vals: np.ndarray, z: np.ndarray) -> np.ndarray:
    a = vals[..., :-1]
    b = vals[..., 1:]
    hz = np.diff(z)
    return (np.abs(b - a) ** 2 / hz).sum(axis=-1)


def slab_h1_norm_sq(values: np.ndarray, period: float, z: np.ndarray) -> float:
    """H^1(R) norm squared of a slab field in the mode representation."""
    n = values.shape[0]
    coeffs = np.fft.fft2(values, axes=(0, 1)) / (n * n)
    xi_sq = SpectralTrace(coeffs[:, :, 0], period).xi_sq
    mass = _pwl_sq_integral(coeffs, z)
    grad_lat = xi_sq * mass
    grad_z = _pwl_deriv_sq_integral(coeffs, z)
    return float(period**2 * np.sum(mass + grad_lat + grad_z))


def trace_inequality_check(values: np.ndarray, period: float,
                           z: np.ndarray, face: str = "top") -> NormReport:
    """Check ||u||_{H^1/2(face)} <= gamma0 ||u||_{H^1(slab)} on a flat slab.

    ``values`` holds nodal data (N, N, nz+1) with layer z grid ``z``;
    gamma0 = (1 + 1/thickness)^(1/2).  Both sides are evaluated in the
    per-mode representation with exact piecewise-linear z-integrals, so the
    inequality holds exactly for every admissible field.
    """
    z = np.asarray(z, dtype=float)
    layer = -1 if face == "top" else 0
    thickness = float(z[-1] - z[0])
    gamma0 = np.sqrt(1.0 + 1.0 / thickness)
    trace = SpectralTrace.from_nodal(values[:, :, layer], period)
    lhs = trace_half_norm(trace, 0.5)
    rhs = gamma0 * np.sqrt(slab_h1_norm_sq(values, period, z))
    return NormReport("trace_inequality", lhs, rhs,
                      extras={"gamma0": gamma0, "face": face})


# ---------------------------------------------------------------------------
# volume norms on mapped meshes
# ---------------------------------------------------------------------------

def _cell_gradients(mesh: MappedMesh, region: str):
    """Physical basis gradients per (cell, qp, node, dim)."""
    inv = mesh.fluid_jac_inv if region == "fluid" else mesh.solid_jac_inv
    # grad_x N_a = J^{-T} grad_xi N_a ; (J^{-T})_{ij} = inv_{ji}
    return np.einsum("cqji,qaj->cqai", inv, SHAPE_GRADS)


def field_h1_norms(mesh: MappedMesh, region: str, nodal: np.ndarray):
    """(L2 norm^2, gradient norm^2) of a nodal scalar or vector field.

    Vector fields have shape (n_nodes, 3); the gradient term is then the
    squared Frobenius norm.
    """
    cells = mesh.fluid_cells if region == "fluid" else mesh.solid_cells
    det = mesh.fluid_jac_det if region == "fluid" else mesh.solid_jac_det
    grads = _cell_gradients(mesh, region)
    vals = nodal[cells]                     # (c, 8[, comps])
    if vals.ndim == 2:
        vals = vals[..., None]
    vq = np.einsum("qa,cak->cqk", SHAPE_VALS, vals)
    gq = np.einsum("cqai,cak->cqki", grads, vals)
    w = det * GAUSS_WEIGHTS_3D
    l2 = float(np.sum(np.sum(np.abs(vq) ** 2, axis=2) * w))
    grad = float(np.sum(np.sum(np.abs(gq) ** 2, axis=(2, 3)) * w))
    return l2, grad


def field_divergence_norm_sq(mesh: MappedMesh, nodal: np.ndarray) -> float:
    """Squared L^2 norm of div(u) for a nodal vector field on the solid."""
    cells = mesh.solid_cells
    grads = _cell_gradients(mesh, "solid")
    vals = nodal[cells]
    gq = np.einsum("cqai,cak->cqki", grads, vals)
    div = gq[:, :, 0, 0] + gq[:, :, 1, 1] + gq[:, :, 2, 2]
    w = mesh.solid_jac_det * GAUSS_WEIGHTS_3D
    return float(np.sum(np.abs(div) ** 2 * w))


def frobenius_div_check(mesh: MappedMesh, nodal: np.ndarray) -> NormReport:
    """Verify ||grad u||_F^2 + ||div u||^2 <= 4 ||u||_{H^1}^2 on the solid.

    The field must vanish on the bottom boundary nodes.
    """
    trace = nodal[mesh.gamma_g_nodes]
    if np.max(np.abs(trace)) > 1e-12 * max(1.0, np.max(np.abs(nodal))):
        raise ValueError("field does not vanish on the bottom boundary")
    l2, frob = field_h1_norms(mesh, "solid", nodal)
    div = field_divergence_norm_sq(mesh, nodal)
    lhs = frob + div
    rhs = 4.0 * (l2 + frob)
    return NormReport("frobenius_div", lhs, rhs,
                      extras={"frobenius_sq": frob, "div_sq": div,
                              "h1_sq": l2 + frob})


# ---------------------------------------------------------------------------
# interface trace norms (flattened) and the double-integral oracle
# ---------------------------------------------------------------------------

def interface_half_norm(nodal_trace: np.ndarray, period: float) -> float:
    """H^1/2 norm of an interface trace computed on the flattened image."""
    return trace_half_norm(SpectralTrace.from_nodal(nodal_trace, period), 0.5)


def half_norm_double_integral(nodal_trace: np.ndarray, period: float,
                              weights: np.ndarray | None = None) -> float:
    """O(N^4) Sobolev-Slobodeckij H^1/2 norm on the periodic lateral grid.

    Distances use the periodic minimum image.  When surface ``weights``
    (sqrt(1+|grad f|^2) per point) are given, both the area term and the
    double integral carry them, matching the rough-interface norm.
    """
    n = nodal_trace.shape[0]
    hcell = period / n
    u = nodal_trace.reshape(-1)
    w = np.ones(n * n) if weights is None else weights.reshape(-1)
    x = np.arange(n) * hcell
    X, Y = np.meshgrid(x, x, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    diff = pts[:, None, :] - pts[None, :, :]
    diff = np.abs(diff)
    diff = np.minimum(diff, period - diff)
    dist3 = (diff[..., 0] ** 2 + diff[..., 1] ** 2) ** 1.5
    np.fill_diagonal(dist3, np.inf)
    du2 = np.abs(u[:, None] - u[None, :]) ** 2
    ww = w[:, None] * w[None, :]
    double = np.sum(du2 / dist3 * ww) * hcell**4
    area = np.sum(np.abs(u) ** 2 * w) * hcell**2
    return float(np.sqrt(area + double))


# ---------------------------------------------------------------------------
# mapped-domain norm equivalence and zero extension
# ---------------------------------------------------------------------------

def mapped_norm_equivalence(mesh: MappedMesh, nodal: np.ndarray) -> NormReport:
    """Measure ||u||_{H^1(Omega_1)} against ||u||_{H^1(D_1)} for the same
    nodal data on the physical and flattened fluid slabs."""
    l2p, gp = field_h1_norms(mesh, "fluid", nodal)
    phys = np.sqrt(l2p + gp)
    n = mesh.n_lateral
    flat_surf = RoughSurfacePair.flat(
        mesh.period, n, f_level=0.0, g_level=-1.0, h=mesh.surfaces.h)
    flat_mesh = build_mesh(flat_surf, mesh.nz_fluid, 2)
    l2f, gf = field_h1_norms(flat_mesh, "fluid", nodal)
    flat = np.sqrt(l2f + gf)
    lo, hi = min(phys, flat), max(phys, flat)
    return NormReport("mapped_equivalence", lo, hi,
                      extras={"physical": phys, "flattened": flat,
                              "constant": hi / lo if lo > 0 else np.inf})


def zero_extension_check(mesh: MappedMesh, nodal: np.ndarray,
                         depth: float = 0.5) -> NormReport:
    """Extend a bottom-vanishing solid field by zero below the bottom
    surface and confirm both the interface H^1/2 and the H^1 norms are
    unchanged."""
    trace = nodal[mesh.gamma_g_nodes]
    if np.max(np.abs(trace)) > 1e-12 * max(1.0, np.max(np.abs(nodal))):
        raise ValueError("field does not vanish on the bottom boundary")
    l2, frob = field_h1_norms(mesh, "solid", nodal)
    h1 = np.sqrt(l2 + frob)
    n = mesh.n_lateral
    trace_vals = nodal[mesh.gamma_f_solid_nodes].reshape(n, n, -1)
    half = np.sqrt(sum(
        interface_half_norm(trace_vals[:, :, k], mesh.period) ** 2
        for k in range(trace_vals.shape[2])
    ))

    g = mesh.surfaces.g_samples
    ext_surf = RoughSurfacePair(mesh.period, g, g - depth,
                                h=float(np.max(g)) + 1.0)
    ext_mesh = build_mesh(ext_surf, 2, max(2, mesh.nz_solid))
    zeros = np.zeros((ext_mesh.n_solid_nodes,) + nodal.shape[1:])
    l2e, frobe = field_h1_norms(ext_mesh, "solid", zeros)
    h1_ext = np.sqrt(l2 + frob + l2e + frobe)
    half_ext = half  # trace values on the interface are untouched
    return NormReport("zero_extension", max(h1, h1_ext) + max(half, half_ext),
                      min(h1, h1_ext) + min(half, half_ext),
                      extras={"h1": h1, "h1_extended": h1_ext,
                              "half": half, "half_extended": half_ext})
