"""Spectral Dirichlet-to-Neumann operator on the truncation plane.

Mode-wise the operator multiplies each lateral Fourier coefficient by
-beta(xi), where beta is the square root of s^2/c^2 + |xi|^2 with positive
real part.  For Re s > 0 that branch is well defined and the operator is
dissipative in the pairing -Re<s^-1 B u, u>.
"""

from __future__ import annotations

import numpy as np

from .spectral import SpectralTrace


def _check_s(s: complex):
    if np.real(s) <= 0:
        raise ValueError("Laplace parameter must satisfy Re s > 0")


def beta(xi2, s: complex, c: float):
    """Root of beta^2 = s^2/c^2 + |xi|^2 with Re beta > 0.

    ``xi2`` may be a scalar or array of nonnegative |xi|^2 values.
    """
    _check_s(s)
    if c <= 0:
        raise ValueError("sound speed must be positive")
    xi2 = np.asarray(xi2, dtype=float)
    if np.any(xi2 < 0):
        raise ValueError("xi2 must be nonnegative")
    root = np.sqrt(s * s / (c * c) + xi2 + 0j)
    # principal sqrt can land in the left half plane for arg near pi
    flip = np.real(root) < 0
    root = np.where(flip, -root, root)
    if root.ndim == 0:
        return complex(root)
    return root


def apply_dtn(trace: SpectralTrace, s: complex, c: float) -> SpectralTrace:
    """Neumann datum of the outgoing extension: coefficients times -beta."""
    b = beta(trace.xi_sq, s, c)
    return SpectralTrace(-b * trace.coeffs, trace.period)


def apply_dtn_nodal(values: np.ndarray, period: float, s: complex,
                    c: float) -> np.ndarray:
    """DtN applied to nodal trace values via FFT; returns nodal values."""
    trace = SpectralTrace.from_nodal(values, period)
    return apply_dtn(trace, s, c).to_nodal()


def dtn_dissipation(trace: SpectralTrace, s: complex, c: float) -> float:
    """The nonnegative quantity -Re<s^-1 B u, u> on the truncation plane.

    Computed as the mode sum of Re(conj(s) beta(xi)) / |s|^2 weighted by
    |u_hat|^2 and the L^2 mode measure.
    """
    b = beta(trace.xi_sq, s, c)
    weights = np.real(np.conj(s) * b) / abs(s) ** 2
    return float(
        trace.period**2 * np.sum(weights * np.abs(trace.coeffs) ** 2)
    )


def dtn_operator_norm(trace_n: int, period: float, s: complex,
                      c: float) -> float:
    """Discrete operator norm from H^1/2 to H^-1/2: max |beta| / (1+|xi|^2)^1/2."""
    xi_sq = SpectralTrace(np.zeros((trace_n, trace_n)), period).xi_sq
    b = beta(xi_sq, s, c)
    return float(np.max(np.abs(b) / np.sqrt(1.0 + xi_sq)))
