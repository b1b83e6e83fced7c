"""Time-domain reconstruction, energy functional, and horizon scaling.

Fields are recovered from the Bromwich-line sweep by the damped Fourier
inversion; time derivatives come from inverting s- and s^2-multiplied
transforms, which is exact for causal data with homogeneous initial
conditions.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .assembly import SystemBlocks, assemble_blocks
from .dtn import beta
from .geometry import MappedMesh
from .physics import MaterialParams, SourceTerm, validate_source
from .solve import SweepResult, sweep_line
from .spectral import (LaplaceLine, SpectralTrace,
                       invert_laplace_line)


@dataclass
class TimeSeriesField:
    """Real nodal fields on a uniform time grid."""

    times: np.ndarray
    p: np.ndarray        # (n_t, n_p)
    u: np.ndarray        # (n_t, n_u)
    dp: np.ndarray
    du: np.ndarray
    d2u: np.ndarray


def reconstruct_time_fields(sweep: SweepResult, line: LaplaceLine,
                            times: np.ndarray) -> TimeSeriesField:
    """Invert the sweep to p, u and the time derivatives dp, du, d2u."""
    if len(sweep.fields) != line.n_s:
        raise ValueError(
            f"sweep holds {len(sweep.fields)} samples, line needs {line.n_s}")
    times = np.asarray(times, dtype=float)
    p_hat, u_hat = sweep.stacked()
    s = line.samples[:, None]
    return TimeSeriesField(
        times=times,
        p=invert_laplace_line(p_hat, line, times),
        u=invert_laplace_line(u_hat, line, times),
        dp=invert_laplace_line(s * p_hat, line, times),
        du=invert_laplace_line(s * u_hat, line, times),
        d2u=invert_laplace_line(s**2 * u_hat, line, times),
    )


@dataclass
class EnergyTrace:
    times: np.ndarray
    e1: np.ndarray
    e2: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.e1 + self.e2

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "e1", "e2", "E"])
            for t, a, b in zip(self.times, self.e1, self.e2):
                writer.writerow([f"{t:.16e}", f"{a:.16e}", f"{b:.16e}",
                                 f"{a + b:.16e}"])


def _qform_rows(block, rows):
    """Real quadratic form of each row of a (n_t, n) array."""
    return np.real(np.einsum("ti,ti->t", np.conj(rows), (block @ rows.T).T))


def energy_series(fields: TimeSeriesField, blocks: SystemBlocks,
                  mat: MaterialParams) -> EnergyTrace:
    """e1 = ||dp/c||^2 + ||grad p||^2;
    e2 = rho1 rho2 ||d2u||^2 + rho1(lam+mu)||div du||^2 + rho1 mu ||grad du||_F^2."""
    e1 = _qform_rows(blocks.m1, fields.dp) / mat.c**2 \
        + _qform_rows(blocks.k1, fields.p)
    e2 = mat.rho1 * mat.rho2 * _qform_rows(blocks.m2, fields.d2u) \
        + mat.rho1 * (mat.lam + mat.mu) * _qform_rows(blocks.k2div, fields.du) \
        + mat.rho1 * mat.mu * _qform_rows(blocks.k2mu, fields.du)
    return EnergyTrace(fields.times, e1, e2)


def energy_bound_report(trace: EnergyTrace, fields: TimeSeriesField,
                        blocks: SystemBlocks, mat: MaterialParams,
                        dj_l1l2: float, slack: float = 1e-2):
    """Check E(t) <= 2 rho1 max_t ||d2u|| * ||dj||_{L1 L2} (1 + slack)."""
    d2u_norm = np.sqrt(np.maximum(_qform_rows(blocks.m2, fields.d2u), 0.0))
    bound = 2.0 * mat.rho1 * float(np.max(d2u_norm)) * dj_l1l2 * (1.0 + slack)
    return {"max_energy": float(np.max(trace.total)), "bound": bound,
            "passed": bool(np.max(trace.total) <= bound)}


def horizon_norms(fields: TimeSeriesField, blocks: SystemBlocks) -> dict:
    """Space-time norms entering the horizon-scaling estimates."""
    t = fields.times
    p_l2 = np.sqrt(np.maximum(_qform_rows(blocks.m1, fields.p), 0.0))
    u_l2 = np.sqrt(np.maximum(_qform_rows(blocks.m2, fields.u), 0.0))
    dp_l2 = np.sqrt(np.maximum(_qform_rows(blocks.m1, fields.dp), 0.0))
    gp_l2 = np.sqrt(np.maximum(_qform_rows(blocks.k1, fields.p), 0.0))
    du_l2 = np.sqrt(np.maximum(_qform_rows(blocks.m2, fields.du), 0.0))
    divu = np.sqrt(np.maximum(_qform_rows(blocks.k2div, fields.u), 0.0))
    gradu = np.sqrt(np.maximum(_qform_rows(blocks.k2mu, fields.u), 0.0))
    return {
        "p_linf_l2": float(np.max(p_l2)),
        "u_linf_l2": float(np.max(u_l2)),
        "p_l2_l2": float(np.sqrt(np.trapezoid(p_l2**2, t))),
        "u_l2_l2": float(np.sqrt(np.trapezoid(u_l2**2, t))),
        "p_sup_energy": float(np.max(dp_l2 + gp_l2)),
        "u_sup_energy": float(np.max(du_l2 + divu + gradu)),
    }


def initial_condition_residuals(fields: TimeSeriesField,
                                blocks: SystemBlocks) -> dict:
    """Norms of p, u, du at t = 0; all should sit below inversion tolerance."""
    return {
        "p0": float(np.sqrt(max(np.real(
            np.vdot(fields.p[0], blocks.m1 @ fields.p[0])), 0.0))),
        "u0": float(np.sqrt(max(np.real(
            np.vdot(fields.u[0], blocks.m2 @ fields.u[0])), 0.0))),
        "du0": float(np.sqrt(max(np.real(
            np.vdot(fields.du[0], blocks.m2 @ fields.du[0])), 0.0))),
    }


def mode_dissipation_minimum(line: LaplaceLine, n: int, period: float,
                             c: float) -> float:
    """min over line samples and lateral modes of Re(conj(s) beta) / |s|^2.

    Nonnegativity of this quantity is the mode-wise content of the
    time-integrated boundary dissipation inequality.
    """
    xi_sq = SpectralTrace(np.zeros((n, n)), period).xi_sq
    worst = np.inf
    for s in line.samples:
        b = beta(xi_sq, s, c)
        worst = min(worst, float(np.min(np.real(np.conj(s) * b)) / abs(s) ** 2))
    return worst


# ---------------------------------------------------------------------------
# full pipeline and horizon scaling
# ---------------------------------------------------------------------------

def run_pipeline(mesh: MappedMesh, mat: MaterialParams, source: SourceTerm,
                 horizon: float, line: LaplaceLine | None = None,
                 bandwidth: float = 25.0, blocks: SystemBlocks | None = None,
                 n_t: int | None = None, workers: int | None = None,
                 solver_tol: float = 1e-10):
    """Sweep, reconstruct, and evaluate energies for one horizon.

    Returns (sweep, fields, energy trace, norms dict, source report).
    """
    if blocks is None:
        blocks = assemble_blocks(mesh)
    if line is None:
        line = LaplaceLine.default(horizon, bandwidth)
    report = validate_source(source, mesh, horizon)
    sweep = sweep_line(mesh, mat, source, line, blocks=blocks,
                       workers=workers, tol=solver_tol)
    n_t = n_t if n_t is not None else line.n_s
    times = np.linspace(0.0, horizon, n_t)
    fields = reconstruct_time_fields(sweep, line, times)
    energy = energy_series(fields, blocks, mat)
    norms = horizon_norms(fields, blocks)
    return sweep, fields, energy, norms, report


APRIORI_BOUNDS = {
    "p_linf_l2": 1.0,
    "u_linf_l2": 2.0,
    "p_l2_l2": 1.5,
    "u_l2_l2": 2.5,
}

SLOPE_TOLERANCE = 0.25


def apriori_exponents(mesh: MappedMesh, mat: MaterialParams,
                      source: SourceTerm, horizons,
                      bandwidth: float = 25.0, workers: int | None = None,
                      solver_tol: float = 1e-10) -> dict:
    """Fit log-norm vs log-T slopes over a set of horizons.

    The source must be compactly supported in time within min(horizons) so
    its derivative norm is identical for every run.
    """
    horizons = sorted(float(t) for t in horizons)
    if len(horizons) < 3:
        raise ValueError("need at least 3 horizons to fit growth slopes")
    support = source.temporal.support_end
    if support is None or support > horizons[0]:
        raise ValueError(
            "temporal profile must be compactly supported within the "
            "shortest horizon")
    blocks = assemble_blocks(mesh)
    per_horizon = {}
    dj = None
    for t_end in horizons:
        _, _, _, norms, rep = run_pipeline(
            mesh, mat, source, t_end, bandwidth=bandwidth, blocks=blocks,
            workers=workers, solver_tol=solver_tol)
        per_horizon[t_end] = norms
        dj = rep.dj_l1l2

    if dj == 0.0:
        return {"zero_source": True, "horizons": horizons, "slopes": {},
                "norms": per_horizon, "all_passed": True}

    log_t = np.log(np.asarray(horizons))
    slopes = {}
    for name, bound in APRIORI_BOUNDS.items():
        vals = np.array([per_horizon[t_end][name] for t_end in horizons])
        slope = float(np.polyfit(log_t, np.log(vals), 1)[0])
        slopes[name] = {"slope": slope, "bound": bound + SLOPE_TOLERANCE,
                        "passed": slope <= bound + SLOPE_TOLERANCE}

    spreads = {}
    for name in ("p_sup_energy", "u_sup_energy"):
        vals = np.array([per_horizon[t_end][name] for t_end in horizons])
        spread = float(np.max(vals) / np.min(vals)) if np.min(vals) > 0 else np.inf
        spreads[name] = spread

    all_passed = all(v["passed"] for v in slopes.values())
    return {"zero_source": False, "horizons": horizons, "slopes": slopes,
            "spreads": spreads, "norms": per_horizon, "dj_l1l2": dj,
            "all_passed": all_passed}


def write_norms_csv(path, per_horizon: dict):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["T", "norm name", "value"])
        for t_end in sorted(per_horizon):
            for name, value in per_horizon[t_end].items():
                writer.writerow([f"{t_end:.10g}", name, f"{value:.16e}"])


def write_exponents_csv(path, report: dict):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["norm name", "fitted slope", "bound", "pass"])
        for name, row in report.get("slopes", {}).items():
            writer.writerow([name, f"{row['slope']:.6f}",
                             f"{row['bound']:.6f}", str(row["passed"])])
