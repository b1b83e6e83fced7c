"""Laterally periodic two-layer geometry and the mapped structured meshes.

The computational domain is a periodic cell of side ``L`` in (x, y).  A rough
interface z = f(x, y) separates a fluid slab below a flat truncation plane
z = h from a solid slab bounded below by z = g(x, y).  Both slabs are meshed
with tensor-product hexahedra obtained by stretching a uniform vertical grid
between the bounding surfaces of each column.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class GeometryError(ValueError):
    """Invalid geometry (surface ordering or degenerate cells)."""


# ---------------------------------------------------------------------------
# reference hexahedron (trilinear, 2x2x2 Gauss)
# ---------------------------------------------------------------------------

# corner order: bottom face counter-clockwise, then top face
_CORNERS = np.array(
    [
        [-1, -1, -1],
        [1, -1, -1],
        [1, 1, -1],
        [-1, 1, -1],
        [-1, -1, 1],
        [1, -1, 1],
        [1, 1, 1],
        [-1, 1, 1],
    ],
    dtype=float,
)

_G = 1.0 / np.sqrt(3.0)
GAUSS_POINTS_3D = np.array(
    [[sx * _G, sy * _G, sz * _G]
     for sz in (-1, 1) for sy in (-1, 1) for sx in (-1, 1)]
)
GAUSS_WEIGHTS_3D = np.ones(8)

GAUSS_POINTS_2D = np.array(
    [[sx * _G, sy * _G] for sy in (-1, 1) for sx in (-1, 1)]
)
GAUSS_WEIGHTS_2D = np.ones(4)


def hex_shape(points: np.ndarray) -> np.ndarray:
    """Trilinear shape functions at reference points, shape (npts, 8)."""
    pts = np.atleast_2d(points)
    vals = np.empty((pts.shape[0], 8))
    for a, (xa, ya, za) in enumerate(_CORNERS):
        vals[:, a] = (
            (1 + xa * pts[:, 0]) * (1 + ya * pts[:, 1]) * (1 + za * pts[:, 2])
        ) / 8.0
    return vals


def hex_shape_grad(points: np.ndarray) -> np.ndarray:
    """Reference gradients of the trilinear shape functions, (npts, 8, 3)."""
    pts = np.atleast_2d(points)
    grads = np.empty((pts.shape[0], 8, 3))
    for a, (xa, ya, za) in enumerate(_CORNERS):
        gx = xa * (1 + ya * pts[:, 1]) * (1 + za * pts[:, 2]) / 8.0
        gy = ya * (1 + xa * pts[:, 0]) * (1 + za * pts[:, 2]) / 8.0
        gz = za * (1 + xa * pts[:, 0]) * (1 + ya * pts[:, 1]) / 8.0
        grads[:, a, 0] = gx
        grads[:, a, 1] = gy
        grads[:, a, 2] = gz
    return grads


def quad_shape(points: np.ndarray) -> np.ndarray:
    """Bilinear shape functions on the reference square, (npts, 4)."""
    pts = np.atleast_2d(points)
    corners = np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], dtype=float)
    vals = np.empty((pts.shape[0], 4))
    for a, (xa, ya) in enumerate(corners):
        vals[:, a] = (1 + xa * pts[:, 0]) * (1 + ya * pts[:, 1]) / 4.0
    return vals


SHAPE_VALS = hex_shape(GAUSS_POINTS_3D)            # (8 qp, 8 nodes)
SHAPE_GRADS = hex_shape_grad(GAUSS_POINTS_3D)      # (8 qp, 8 nodes, 3)
QUAD_SHAPE_VALS = quad_shape(GAUSS_POINTS_2D)      # (4 qp, 4 nodes)


# ---------------------------------------------------------------------------
# spectral differentiation on the periodic lateral grid
# ---------------------------------------------------------------------------

def lateral_wavenumbers(n: int, period: float) -> np.ndarray:
    """Angular wavenumbers 2*pi*n/L in FFT layout."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=period / n)


def spectral_gradient(samples: np.ndarray, period: float):
    """Lateral gradient (df/dx, df/dy) of a periodic sample grid via FFT.

    The Nyquist mode is dropped from the derivative so that real input
    yields real output.
    """
    n = samples.shape[0]
    k = lateral_wavenumbers(n, period)
    kd = k.copy()
    if n % 2 == 0:
        kd[n // 2] = 0.0
    coeff = np.fft.fft2(samples)
    fx = np.real(np.fft.ifft2(1j * kd[:, None] * coeff))
    fy = np.real(np.fft.ifft2(1j * kd[None, :] * coeff))
    return fx, fy


# ---------------------------------------------------------------------------
# surfaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RoughSurfacePair:
    """Sampled periodic interface f, bottom g, and truncation height h.

    Samples live on the uniform lateral grid x_i = i*L/N, y_j = j*L/N and
    must satisfy g < f < h at every point.
    """

    period: float
    f_samples: np.ndarray
    g_samples: np.ndarray
    h: float

    def __post_init__(self):
        f = np.asarray(self.f_samples, dtype=float)
        g = np.asarray(self.g_samples, dtype=float)
        object.__setattr__(self, "f_samples", f)
        object.__setattr__(self, "g_samples", g)
        if f.ndim != 2 or f.shape[0] != f.shape[1] or f.shape != g.shape:
            raise GeometryError("surface samples must be square grids of equal shape")
        if self.period <= 0:
            raise GeometryError("period must be positive")
        if not (np.isfinite(f).all() and np.isfinite(g).all()):
            raise GeometryError("surface samples must be finite")
        if np.any(g >= f):
            bad = np.argwhere(g >= f)[0]
            raise GeometryError(f"g >= f at lateral index {tuple(bad)}")
        if np.any(f >= self.h):
            bad = np.argwhere(f >= self.h)[0]
            raise GeometryError(f"f >= h at lateral index {tuple(bad)}")
        fx, fy = spectral_gradient(f, self.period)
        if not (np.isfinite(fx).all() and np.isfinite(fy).all()):
            raise GeometryError("interface gradient is not finite")

    @property
    def n_lateral(self) -> int:
        return self.f_samples.shape[0]

    @cached_property
    def lateral_coords(self) -> np.ndarray:
        n = self.n_lateral
        return np.arange(n) * (self.period / n)

    @cached_property
    def grad_f(self):
        return spectral_gradient(self.f_samples, self.period)

    # --- presets ---

    @classmethod
    def flat(cls, period, n, f_level=0.0, g_level=-1.0, h=1.0):
        shape = (n, n)
        return cls(period, np.full(shape, float(f_level)),
                   np.full(shape, float(g_level)), float(h))

    @classmethod
    def sinusoid(cls, period, n, amplitude, wavelength,
                 f_level=0.0, g_level=-1.0, h=1.0, axis="x"):
        """Single sinusoid interface over a flat bottom.

        The wavelength must divide the period so the surface stays periodic.
        """
        cycles = period / wavelength
        if abs(cycles - round(cycles)) > 1e-9:
            raise GeometryError("wavelength must divide the period")
        x = np.arange(n) * (period / n)
        X, Y = np.meshgrid(x, x, indexing="ij")
        coord = X if axis == "x" else Y
        f = f_level + amplitude * np.sin(2 * np.pi * coord / wavelength)
        return cls(period, f, np.full((n, n), float(g_level)), float(h))

    @classmethod
    def sum_of_sinusoids(cls, period, n, terms,
                         f_level=0.0, g_level=-1.0, h=1.0):
        """Interface f = f_level + sum_k a_k sin(2*pi*(m_k x + l_k y)/L + phi_k).

        ``terms`` is an iterable of (amplitude, m, l, phase) with integer
        mode counts m, l.
        """
        x = np.arange(n) * (period / n)
        X, Y = np.meshgrid(x, x, indexing="ij")
        f = np.full((n, n), float(f_level))
        for amp, m, l, phase in terms:
            f += amp * np.sin(2 * np.pi * (m * X + l * Y) / period + phase)
        return cls(period, f, np.full((n, n), float(g_level)), float(h))

    @classmethod
    def from_csv(cls, path, h):
        """Load a height field from CSV with header row ``x,y,f,g``.

        Rows must cover the full uniform N x N lateral grid (any order).
        """
        data = np.genfromtxt(path, delimiter=",", names=True)
        for col in ("x", "y", "f", "g"):
            if col not in (data.dtype.names or ()):
                raise GeometryError(f"CSV is missing column '{col}'")
        xs = np.unique(np.round(data["x"], 12))
        n = xs.size
        if data.size != n * n:
            raise GeometryError("CSV does not cover a square lateral grid")
        dx = xs[1] - xs[0] if n > 1 else 1.0
        period = xs[-1] + dx
        order = np.lexsort((data["y"], data["x"]))
        f = data["f"][order].reshape(n, n)
        g = data["g"][order].reshape(n, n)
        return cls(period, f, g, float(h))


def interface_weight(surfaces: RoughSurfacePair, i=None, j=None):
    """Surface-measure weight sqrt(1 + |grad f|^2) on the interface.

    With no indices the full (N, N) weight grid is returned.
    """
    fx, fy = surfaces.grad_f
    w = np.sqrt(1.0 + fx**2 + fy**2)
    if i is None:
        return w
    return w[i, j]


# ---------------------------------------------------------------------------
# mapped mesh
# ---------------------------------------------------------------------------

def _column_heights(lower, upper, nz):
    """Vertical node positions uniform in the mapped coordinate, (N,N,nz+1)."""
    frac = np.linspace(0.0, 1.0, nz + 1)
    return lower[..., None] + frac[None, None, :] * (upper - lower)[..., None]


def _build_cells(n, nz):
    """Connectivity (ncells, 8) for a periodic lateral grid, nodes wrap mod n."""
    i = np.arange(n)
    j = np.arange(n)
    k = np.arange(nz)
    I, J, K = np.meshgrid(i, j, k, indexing="ij")
    I = I.ravel()
    J = J.ravel()
    K = K.ravel()
    ip = (I + 1) % n
    jp = (J + 1) % n

    def nid(ii, jj, kk):
        return kk * n * n + jj * n + ii

    cells = np.stack(
        [
            nid(I, J, K), nid(ip, J, K), nid(ip, jp, K), nid(I, jp, K),
            nid(I, J, K + 1), nid(ip, J, K + 1), nid(ip, jp, K + 1),
            nid(I, jp, K + 1),
        ],
        axis=1,
    )
    return cells, (I, J, K)


def _cell_coords(x, z_layers, I, J, K, period):
    """Physical corner coordinates (ncells, 8, 3); wrapped corners unwrapped."""
    n = x.size
    nc = I.size
    coords = np.empty((nc, 8, 3))
    dx = period / n
    ip = I + 1
    jp = J + 1
    xi = I * dx
    xip = ip * dx
    yj = J * dx
    yjp = jp * dx
    ipm = ip % n
    jpm = jp % n
    lat = [(I, J, xi, yj), (ipm, J, xip, yj), (ipm, jpm, xip, yjp),
           (I, jpm, xi, yjp)]
    for a, (ii, jj, xx, yy) in enumerate(lat):
        coords[:, a, 0] = xx
        coords[:, a, 1] = yy
        coords[:, a, 2] = z_layers[ii, jj, K]
        coords[:, a + 4, 0] = xx
        coords[:, a + 4, 1] = yy
        coords[:, a + 4, 2] = z_layers[ii, jj, K + 1]
    return coords


def cell_jacobians(cell_coords: np.ndarray):
    """Jacobian determinants and inverses at the 2x2x2 Gauss points.

    Returns (det, inv) with shapes (ncells, 8) and (ncells, 8, 3, 3);
    J[c, q, i, j] = d x_i / d xi_j for the trilinear map of cell c.
    """
    # J[c,q,i,j] = sum_a coords[c,a,i] * SHAPE_GRADS[q,a,j]
    J = np.einsum("cai,qaj->cqij", cell_coords, SHAPE_GRADS)
    det = np.linalg.det(J)
    inv = np.linalg.inv(J)
    return det, inv


@dataclass(frozen=True)
class MappedMesh:
    """Conforming two-slab hexahedral mesh with Jacobian data.

    Node ids per slab: id = k*N^2 + j*N + i with layer index k increasing
    upward.  Fluid layer 0 sits on the interface, layer nz_fluid on z = h.
    Solid layer 0 sits on the bottom surface, layer nz_solid on the
    interface; fluid layer 0 and solid layer nz_solid coincide geometrically.
    """

    surfaces: RoughSurfacePair
    nz_fluid: int
    nz_solid: int
    fluid_z: np.ndarray          # (N, N, nz_fluid+1)
    solid_z: np.ndarray          # (N, N, nz_solid+1)
    fluid_cells: np.ndarray      # (ncf, 8) node ids
    solid_cells: np.ndarray
    fluid_cell_coords: np.ndarray  # (ncf, 8, 3)
    solid_cell_coords: np.ndarray
    fluid_jac_det: np.ndarray    # (ncf, 8)
    solid_jac_det: np.ndarray
    fluid_jac_inv: np.ndarray    # (ncf, 8, 3, 3)
    solid_jac_inv: np.ndarray
    fluid_map_det: np.ndarray    # h/(h-f), per lateral point
    solid_map_det: np.ndarray    # d_ref/(f-g), per lateral point
    weight: np.ndarray           # sqrt(1+|grad f|^2)
    covector: np.ndarray         # (N, N, 3): (-df/dx, -df/dy, 1) = n * weight

    @property
    def n_lateral(self) -> int:
        return self.surfaces.n_lateral

    @property
    def period(self) -> float:
        return self.surfaces.period

    @property
    def n_fluid_nodes(self) -> int:
        n = self.n_lateral
        return n * n * (self.nz_fluid + 1)

    @property
    def n_solid_nodes(self) -> int:
        n = self.n_lateral
        return n * n * (self.nz_solid + 1)

    @cached_property
    def fluid_node_coords(self) -> np.ndarray:
        return _node_coords(self.surfaces.lateral_coords, self.fluid_z)

    @cached_property
    def solid_node_coords(self) -> np.ndarray:
        return _node_coords(self.surfaces.lateral_coords, self.solid_z)

    # --- boundary node sets (each in lateral order j*N+i) ---

    @property
    def gamma_h_nodes(self) -> np.ndarray:
        n = self.n_lateral
        return self.nz_fluid * n * n + np.arange(n * n)

    @property
    def gamma_f_fluid_nodes(self) -> np.ndarray:
        n = self.n_lateral
        return np.arange(n * n)

    @property
    def gamma_f_solid_nodes(self) -> np.ndarray:
        n = self.n_lateral
        return self.nz_solid * n * n + np.arange(n * n)

    @property
    def gamma_g_nodes(self) -> np.ndarray:
        n = self.n_lateral
        return np.arange(n * n)

    def fluid_volume(self) -> float:
        return float(np.sum(self.fluid_jac_det * GAUSS_WEIGHTS_3D))

    def solid_volume(self) -> float:
        return float(np.sum(self.solid_jac_det * GAUSS_WEIGHTS_3D))


def _node_coords(x, z_layers):
    n = x.size
    nz1 = z_layers.shape[2]
    X, Y = np.meshgrid(x, x, indexing="ij")
    coords = np.empty((nz1, n, n, 3))
    coords[..., 0] = X[None, :, :]
    coords[..., 1] = Y[None, :, :]
    coords[..., 2] = np.moveaxis(z_layers, 2, 0)
    # node id = k*N^2 + j*N + i  -> flatten order (k, j, i)
    return coords.transpose(0, 2, 1, 3).reshape(-1, 3)


def build_mesh(surfaces: RoughSurfacePair, nz_fluid: int, nz_solid: int) -> MappedMesh:
    """Build the conforming two-slab mesh for the given surfaces."""
    if nz_fluid < 1 or nz_solid < 1:
        raise GeometryError("nz_fluid and nz_solid must be at least 1")
    n = surfaces.n_lateral
    f = surfaces.f_samples
    g = surfaces.g_samples
    h = surfaces.h
    x = surfaces.lateral_coords

    fluid_z = _column_heights(f, np.full_like(f, h), nz_fluid)
    solid_z = _column_heights(g, f, nz_solid)

    fluid_cells, idxf = _build_cells(n, nz_fluid)
    solid_cells, idxs = _build_cells(n, nz_solid)
    fluid_coords = _cell_coords(x, fluid_z, *idxf, surfaces.period)
    solid_coords = _cell_coords(x, solid_z, *idxs, surfaces.period)

    fdet, finv = cell_jacobians(fluid_coords)
    sdet, sinv = cell_jacobians(solid_coords)
    for name, det, (I, J, K) in (("fluid", fdet, idxf), ("solid", sdet, idxs)):
        bad = np.argwhere(det <= 0)
        if bad.size:
            c, _ = bad[0]
            cell = (int(I[c]), int(J[c]), int(K[c]))
            raise GeometryError(
                f"non-positive Jacobian determinant in {name} cell {cell}"
            )

    fx, fy = surfaces.grad_f
    weight = np.sqrt(1.0 + fx**2 + fy**2)
    covector = np.stack([-fx, -fy, np.ones_like(fx)], axis=-1)

    d_ref = float(np.mean(f - g))
    return MappedMesh(
        surfaces=surfaces,
        nz_fluid=nz_fluid,
        nz_solid=nz_solid,
        fluid_z=fluid_z,
        solid_z=solid_z,
        fluid_cells=fluid_cells,
        solid_cells=solid_cells,
        fluid_cell_coords=fluid_coords,
        solid_cell_coords=solid_coords,
        fluid_jac_det=fdet,
        solid_jac_det=sdet,
        fluid_jac_inv=finv,
        solid_jac_inv=sinv,
        fluid_map_det=h / (h - f),
        solid_map_det=d_ref / (f - g),
        weight=weight,
        covector=covector,
    )
