"""Lateral Fourier traces and Bromwich-line Laplace inversion.

The inverse Laplace transform is evaluated literally as a Fourier integral
in the imaginary part s2 along the vertical line Re s = s1 > 0, discretized
with a symmetric midpoint grid on [-s2_max, s2_max].
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import lateral_wavenumbers

#: default relative L2 tolerance for line inversion
DEFAULT_INVERSION_TOL = 1e-4


@dataclass(frozen=True)
class LaplaceLine:
    """Discretization of the inversion line s = s1 + i*s2.

    ``s2`` runs over an even midpoint grid symmetric about the real axis,
    so every sample has a conjugate partner and 0 is excluded.
    """

    s1: float
    s2_max: float
    n_s: int

    def __post_init__(self):
        if self.s1 <= 0:
            raise ValueError("shift s1 must be positive")
        if self.n_s < 2 or self.n_s % 2:
            raise ValueError("n_s must be even and at least 2")
        if self.s2_max <= 0:
            raise ValueError("s2_max must be positive")

    @property
    def delta_s2(self) -> float:
        return 2.0 * self.s2_max / self.n_s

    @cached_property
    def s2_grid(self) -> np.ndarray:
        k = np.arange(self.n_s)
        return -self.s2_max + (k + 0.5) * self.delta_s2

    @cached_property
    def samples(self) -> np.ndarray:
        return self.s1 + 1j * self.s2_grid

    @property
    def upper_half(self) -> np.ndarray:
        """Indices of the samples with Im s > 0."""
        return np.nonzero(self.s2_grid > 0)[0]

    def conjugate_index(self, k: int) -> int:
        """Index of the sample conjugate to sample k."""
        return self.n_s - 1 - k

    @classmethod
    def default(cls, horizon: float, bandwidth: float, s1=None):
        """Line sized by the sampling rules: delta_s2 <= pi/T and
        s2_max = 4 * bandwidth.  The default shift is 6/T."""
        if s1 is None:
            s1 = 6.0 / horizon
        s2_max = 4.0 * bandwidth
        n_min = int(np.ceil(2.0 * s2_max * horizon / np.pi))
        n_s = 2
        while n_s < n_min:
            n_s *= 2
        return cls(s1=s1, s2_max=s2_max, n_s=n_s)


def invert_laplace_line(samples: np.ndarray, line: LaplaceLine,
                        times: np.ndarray) -> np.ndarray:
    """Invert line samples F(s_k) to a real time series.

    ``samples`` has shape (n_s, ...); the result has shape (n_t, ...).
    u(t) = Re[ e^(s1 t) * (delta_s2 / 2 pi) * sum_k F_k e^(i s2_k t) ].
    """
    samples = np.asarray(samples)
    if samples.shape[0] != line.n_s:
        raise ValueError(
            f"expected {line.n_s} line samples, got {samples.shape[0]}"
        )
    times = np.asarray(times, dtype=float)
    phases = np.exp(1j * np.outer(times, line.s2_grid))  # (n_t, n_s)
    flat = samples.reshape(line.n_s, -1)
    acc = phases @ flat
    out = np.real(acc) * (line.delta_s2 / (2.0 * np.pi))
    out *= np.exp(line.s1 * times)[:, None]
    return out.reshape((times.size,) + samples.shape[1:])


def forward_laplace_line(values: np.ndarray, times: np.ndarray,
                         line: LaplaceLine) -> np.ndarray:
    """Trapezoid-quadrature Laplace transform of a sampled signal at the
    line samples.  ``values`` has shape (n_t, ...)."""
    values = np.asarray(values)
    times = np.asarray(times, dtype=float)
    damp = np.exp(-np.outer(line.samples, times))  # (n_s, n_t)
    flat = values.reshape(times.size, -1)
    # trapezoid weights
    w = np.empty_like(times)
    w[1:-1] = (times[2:] - times[:-2]) / 2.0
    w[0] = (times[1] - times[0]) / 2.0
    w[-1] = (times[-1] - times[-2]) / 2.0
    acc = damp @ (flat * w[:, None])
    return acc.reshape((line.n_s,) + values.shape[1:])


def parseval_residual(values: np.ndarray, times: np.ndarray,
                      samples: np.ndarray, line: LaplaceLine) -> float:
    """Relative mismatch of the line-sum and time-integral energies.

    Compares (1/2 pi) sum |F(s_k)|^2 delta_s2 against the quadrature of
    integral_0^inf e^(-2 s1 t) |u(t)|^2 dt on the supplied time grid.
    """
    samples = np.asarray(samples)
    if samples.shape[0] != line.n_s:
        raise ValueError("sample count inconsistent with the line")
    lhs = float(np.sum(np.abs(samples) ** 2) * line.delta_s2 / (2.0 * np.pi))
    integrand = np.exp(-2.0 * line.s1 * times) * np.abs(values) ** 2
    if integrand.ndim > 1:
        integrand = integrand.reshape(times.size, -1).sum(axis=1)
    rhs = float(np.trapezoid(integrand, times))
    scale = max(lhs, rhs)
    if scale == 0.0:
        return 0.0
    return abs(lhs - rhs) / scale


# ---------------------------------------------------------------------------
# lateral Fourier traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralTrace:
    """Fourier coefficients of a trace on the periodic lateral grid.

    Coefficients follow numpy FFT layout and are normalized so that
    u(r) = sum_n coeffs[n] exp(i xi_n . r) with xi_n = 2 pi n / L.
    """

    coeffs: np.ndarray
    period: float

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        object.__setattr__(self, "coeffs", c)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("coefficient array must be square")

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    @classmethod
    def from_nodal(cls, values: np.ndarray, period: float) -> "SpectralTrace":
        values = np.asarray(values)
        n = values.shape[0]
        return cls(np.fft.fft2(values) / (n * n), period)

    def to_nodal(self) -> np.ndarray:
        n = self.n
        return np.fft.ifft2(self.coeffs) * (n * n)

    @cached_property
    def xi_sq(self) -> np.ndarray:
        """|xi_n|^2 on the coefficient grid."""
        k = lateral_wavenumbers(self.n, self.period)
        return k[:, None] ** 2 + k[None, :] ** 2

    def norm_sq(self) -> float:
        """Discrete L2(Gamma_h) norm squared: L^2 sum |c_n|^2."""
        return float(self.period**2 * np.sum(np.abs(self.coeffs) ** 2))
