"""Material parameters and the body force driving the solid.

The source is separable, j(x, t) = spatial(x) * amplitude(t), with the
spatial factor compactly supported inside the solid slab and the temporal
amplitude vanishing at t = 0 with a square-integrable derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class SourceValidationError(ValueError):
    pass


@dataclass(frozen=True)
class MaterialParams:
    """Fluid density/sound speed and solid density plus Lame moduli."""

    rho1: float
    c: float
    rho2: float
    mu: float
    lam: float

    def __post_init__(self):
        if self.rho1 <= 0:
            raise ValueError("fluid density must satisfy rho1 > 0")
        if self.c <= 0:
            raise ValueError("sound speed must satisfy c > 0")
        if self.rho2 <= 0:
            raise ValueError("solid density must satisfy rho2 > 0")
        if self.mu <= 0:
            raise ValueError("Lame parameters must satisfy mu > 0")
        if self.lam + self.mu <= 0:
            raise ValueError("Lame parameters must satisfy lambda + mu > 0")


# ---------------------------------------------------------------------------
# temporal profiles
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(192)


class TemporalProfile:
    """Scalar amplitude a(t) with a(0) = 0 and a Laplace transform."""

    def amplitude(self, t):
        raise NotImplementedError

    def amplitude_dt(self, t):
        raise NotImplementedError

    def laplace(self, s):
        raise NotImplementedError

    #: end of support when compactly supported, else None
    support_end = None


@dataclass(frozen=True)
class ZeroProfile(TemporalProfile):
    def amplitude(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def amplitude_dt(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def laplace(self, s):
        return 0.0 * s


@dataclass(frozen=True)
class RampedSine(TemporalProfile):
    """a(t) = t^2 e^(-t) sin(omega t): smooth start, closed-form transform."""

    omega: float = 1.5

    def amplitude(self, t):
        t = np.asarray(t, dtype=float)
        return t**2 * np.exp(-t) * np.sin(self.omega * t)

    def amplitude_dt(self, t):
        t = np.asarray(t, dtype=float)
        w = self.omega
        return np.exp(-t) * (
            (2 * t - t**2) * np.sin(w * t) + w * t**2 * np.cos(w * t)
        )

    def laplace(self, s):
        # second s-derivative of  omega / ((s+1)^2 + omega^2)
        w = self.omega
        d = (s + 1) ** 2 + w * w
        return 2 * w * (3 * (s + 1) ** 2 - w * w) / d**3


@dataclass(frozen=True)
class CompactBump(TemporalProfile):
    """a(t) = A t^2 (T0 - t)^2 sin(omega t) on [0, T0], zero outside.

    The transform is evaluated by Gauss-Legendre quadrature over the
    support; the integrand is entire so the rule converges spectrally.
    """

    duration: float = 0.5
    omega: float = 20.0
    scale: float = 1.0

    @property
    def support_end(self):
        return self.duration

    def amplitude(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= 0) & (t <= self.duration)
        out = np.where(
            inside,
            self.scale * t**2 * (self.duration - t) ** 2
            * np.sin(self.omega * t),
            0.0,
        )
        return out

    def amplitude_dt(self, t):
        t = np.asarray(t, dtype=float)
        T0, w, A = self.duration, self.omega, self.scale
        poly = t**2 * (T0 - t) ** 2
        dpoly = 2 * t * (T0 - t) ** 2 - 2 * t**2 * (T0 - t)
        val = A * (dpoly * np.sin(w * t) + w * poly * np.cos(w * t))
        return np.where((t >= 0) & (t <= self.duration), val, 0.0)

    def laplace(self, s):
        tq = 0.5 * self.duration * (_GL_NODES + 1.0)
        wq = 0.5 * self.duration * _GL_WEIGHTS
        vals = self.amplitude(tq)
        return np.sum(wq * vals * np.exp(-s * tq))


@dataclass(frozen=True)
class SampledProfile(TemporalProfile):
    """Amplitude given as a sampled time series; trapezoid quadrature
    transform damped by e^(-Re(s) t), tail truncated at the last sample."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise ValueError("need matching 1-d time/value arrays")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def support_end(self):
        return float(self.times[-1])

    def amplitude(self, t):
        return np.interp(np.asarray(t, dtype=float), self.times, self.values,
                         left=0.0, right=0.0)

    def amplitude_dt(self, t):
        deriv = np.gradient(self.values, self.times)
        return np.interp(np.asarray(t, dtype=float), self.times, deriv,
                         left=0.0, right=0.0)

    def laplace(self, s):
        integrand = self.values * np.exp(-s * self.times)
        return np.trapezoid(integrand, self.times)


# ---------------------------------------------------------------------------
# spatial profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CosineBump:
    """C^2 product-of-raised-cosines bump times a constant direction.

    value(x) = direction * prod_i cos^2(pi (x_i - center_i) / (2 width_i))
    inside the box |x_i - center_i| < width_i, zero outside.
    """

    center: tuple
    widths: tuple
    direction: tuple = (0.0, 0.0, 1.0)

    def scalar(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        out = np.ones(pts.shape[0])
        for i in range(3):
            d = pts[:, i] - self.center[i]
            w = self.widths[i]
            inside = np.abs(d) < w
            out = out * np.where(inside, np.cos(np.pi * d / (2 * w)) ** 2, 0.0)
        return out

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.scalar(points)[:, None] * np.asarray(self.direction)

    @property
    def z_extent(self):
        return (self.center[2] - self.widths[2],
                self.center[2] + self.widths[2])


@dataclass(frozen=True)
class SourceTerm:
    """Separable body force j(x, t) = spatial(x) * amplitude(t)."""

    spatial: CosineBump
    temporal: TemporalProfile

    def transform(self, s: complex):
        """Laplace transform at s: returns (multiplier, spatial profile)."""
        if np.real(s) <= 0:
            raise ValueError("Laplace parameter must satisfy Re s > 0")
        return self.temporal.laplace(s), self.spatial

    def evaluate_transform(self, s: complex, points: np.ndarray) -> np.ndarray:
        mult, spatial = self.transform(s)
        return mult * spatial(points)


def transform_source(source: SourceTerm, s: complex, points: np.ndarray):
    """Laplace-transformed source field at the given points, shape (n, 3)."""
    return source.evaluate_transform(s, points)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class SourceReport:
    valid: bool
    initial_value: float
    h1_time_norm: float
    dj_l1l2: float       # || d/dt j ||_{L^1(0,T; L^2)}
    spatial_l2: float
    margin_f: float
    margin_g: float
    messages: list = field(default_factory=list)


def spatial_l2_norm(spatial, mesh) -> float:
    """L^2(Omega_2) norm of the spatial profile by mesh quadrature."""
    from .geometry import SHAPE_VALS, GAUSS_WEIGHTS_3D

    qp = np.einsum("qa,cai->cqi", SHAPE_VALS, mesh.solid_cell_coords)
    vals = spatial(qp.reshape(-1, 3)).reshape(qp.shape[0], qp.shape[1], 3)
    dens = np.sum(np.abs(vals) ** 2, axis=2)
    return float(np.sqrt(np.sum(dens * mesh.solid_jac_det * GAUSS_WEIGHTS_3D)))


def validate_source(source: SourceTerm, mesh, horizon: float,
                    n_quad: int = 2048) -> SourceReport:
    """Check the compatibility conditions and report the data norms.

    Raises SourceValidationError if the initial value is nonzero, the
    temporal profile fails square-integrability of its derivative, or the
    spatial support comes within one cell layer of the interface or bottom.
    """
    msgs = []
    t = np.linspace(0.0, horizon, n_quad)
    amp = source.temporal.amplitude(t)
    damp = source.temporal.amplitude_dt(t)
    peak = float(np.max(np.abs(amp))) if np.any(amp) else 0.0
    a0 = float(abs(source.temporal.amplitude(0.0)))
    if peak > 0 and a0 > 1e-12 * peak or (peak == 0 and a0 > 0):
        raise SourceValidationError(
            "initial compatibility violated: amplitude(0) != 0")
    h1 = float(np.sqrt(np.trapezoid(amp**2 + damp**2, t)))
    if not np.isfinite(h1):
        raise SourceValidationError("temporal profile is not H^1 on [0, T]")

    sp_norm = spatial_l2_norm(source.spatial, mesh)
    dj = float(np.trapezoid(np.abs(damp), t)) * sp_norm

    zlo, zhi = source.spatial.z_extent
    f = mesh.surfaces.f_samples
    g = mesh.surfaces.g_samples
    dz_solid = np.max(f - g) / mesh.nz_solid
    margin_f = float(np.min(f) - zhi)
    margin_g = float(zlo - np.max(g))
    if sp_norm > 0:
        if margin_f < dz_solid:
            raise SourceValidationError(
                "spatial support too close to the interface "
                f"(margin {margin_f:.3g} < cell layer {dz_solid:.3g})")
        if margin_g < dz_solid:
            raise SourceValidationError(
                "spatial support too close to the bottom surface "
                f"(margin {margin_g:.3g} < cell layer {dz_solid:.3g})")

    return SourceReport(
        valid=True,
        initial_value=a0,
        h1_time_norm=h1,
        dj_l1l2=dj,
        spatial_l2=sp_norm,
        margin_f=margin_f,
        margin_g=margin_g,
        messages=msgs,
    )
