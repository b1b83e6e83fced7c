"""Per-s complex linear solves and the Bromwich-line frequency sweep."""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres, splu

from .assembly import SystemBlocks, SystemMatrix, assemble_blocks, assemble_rhs
from .geometry import MappedMesh
from .norms import NormReport
from .physics import MaterialParams, SourceTerm, spatial_l2_norm
from .spectral import LaplaceLine

DEFAULT_SOLVER_TOL = 1e-10


class SolverError(RuntimeError):
    """Iteration failed to reach the requested residual."""

    def __init__(self, message, s=None, residual=None):
        super().__init__(message)
        self.s = s
        self.residual = residual


@dataclass
class ComplexFieldS:
    """Nodal complex solution (p, u) at one Laplace parameter."""

    s: complex
    p: np.ndarray
    u: np.ndarray
    residual: float
    iterations: int = 0

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.p, self.u])


def solve_at_s(matrix: SystemMatrix, rhs: np.ndarray,
               tol: float = DEFAULT_SOLVER_TOL,
               maxiter: int = 2000) -> ComplexFieldS:
    """Solve the coupled system, preconditioned by the sparse part."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    n_p = matrix.n_p
    rhs = np.asarray(rhs, dtype=complex)
    b_norm = np.linalg.norm(rhs)
    if b_norm == 0.0:
        z = np.zeros_like(rhs)
        return ComplexFieldS(matrix.s, z[:n_p], z[n_p:], 0.0)

    lu = splu(matrix.sparse.tocsc())
    precond = LinearOperator(matrix.shape, matvec=lu.solve, dtype=complex)
    counter = {"n": 0}

    def _count(_):
        counter["n"] += 1

    try:
        x, info = gmres(matrix.as_linear_operator(), rhs, rtol=tol, atol=0.0,
                        M=precond, maxiter=maxiter, callback=_count,
                        callback_type="pr_norm")
    except TypeError:  # older scipy spells the tolerance differently
        x, info = gmres(matrix.as_linear_operator(), rhs, tol=tol, atol=0.0,
                        M=precond, maxiter=maxiter, callback=_count)
    residual = float(np.linalg.norm(matrix.matvec(x) - rhs) / b_norm)
    if info != 0 or residual > 10 * tol:
        raise SolverError(
            f"solver did not converge at s={matrix.s}: residual {residual:.3e}",
            s=matrix.s, residual=residual)
    return ComplexFieldS(matrix.s, x[:n_p], x[n_p:], residual, counter["n"])


def s_domain_estimate_report(sol: ComplexFieldS, blocks: SystemBlocks,
                             j_norm: float) -> NormReport:
    """Stability ratios R_p, R_u of the solution norms to the source norm."""
    s_abs = abs(sol.s)
    p, u = sol.p, sol.u
    grad_p = np.sqrt(max(np.real(np.vdot(p, blocks.k1 @ p)), 0.0))
    mass_p = np.sqrt(max(np.real(np.vdot(p, blocks.m1 @ p)), 0.0))
    frob_u = np.sqrt(max(np.real(np.vdot(u, blocks.k2mu @ u)), 0.0))
    div_u = np.sqrt(max(np.real(np.vdot(u, blocks.k2div @ u)), 0.0))
    mass_u = np.sqrt(max(np.real(np.vdot(u, blocks.m2 @ u)), 0.0))
    if j_norm == 0.0:
        return NormReport("s_domain_estimate", 0.0, 1.0,
                          extras={"R_p": 0.0, "R_u": 0.0, "zero_source": True})
    r_p = (grad_p + s_abs * mass_p) / j_norm
    r_u = s_abs * (frob_u + div_u + s_abs * mass_u) / j_norm
    return NormReport("s_domain_estimate", max(r_p, r_u), np.inf,
                      extras={"R_p": r_p, "R_u": r_u, "zero_source": False})


@dataclass
class SweepResult:
    """Solutions along the Bromwich line, in line sample order."""

    line: LaplaceLine
    fields: list = field(default_factory=list)
    reports: list = field(default_factory=list)

    def stacked(self):
        """(p_samples, u_samples) arrays of shape (n_s, n_dof)."""
        p = np.stack([f.p for f in self.fields])
        u = np.stack([f.u for f in self.fields])
        return p, u

    def max_residual(self) -> float:
        return max((f.residual for f in self.fields), default=0.0)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re_s", "im_s", "residual", "R_p", "R_u"])
            for sol, rep in zip(self.fields, self.reports):
                writer.writerow([
                    f"{sol.s.real:.16e}", f"{sol.s.imag:.16e}",
                    f"{sol.residual:.6e}",
                    f"{rep.extras['R_p']:.6e}", f"{rep.extras['R_u']:.6e}",
                ])


def _conjugate_field(sol: ComplexFieldS) -> ComplexFieldS:
    return ComplexFieldS(np.conj(sol.s), np.conj(sol.p), np.conj(sol.u),
                         sol.residual, sol.iterations)


def sweep_line(mesh: MappedMesh, mat: MaterialParams, source: SourceTerm,
               line: LaplaceLine, blocks: SystemBlocks | None = None,
               tol: float = DEFAULT_SOLVER_TOL, workers: int | None = None,
               conjugate_symmetry: bool = True,
               csv_path=None) -> SweepResult:
    """Solve at every line sample.

    Real sources satisfy F(conj(s)) = conj(F(s)), so only Im s > 0 samples
    are solved and the rest filled by conjugation.
    """
    if blocks is None:
        blocks = assemble_blocks(mesh)
    indices = line.upper_half if conjugate_symmetry else range(line.n_s)
    indices = list(indices)

    def _solve_one(k):
        s = line.samples[k]
        matrix = SystemMatrix(mesh, mat, s, blocks)
        rhs = assemble_rhs(mesh, mat, s, source)
        try:
            return solve_at_s(matrix, rhs, tol=tol)
        except SolverError:
            raise
        except Exception as exc:  # attach the offending s
            raise SolverError(f"solve failed at s={s}: {exc}", s=s) from exc

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            solved = list(pool.map(_solve_one, indices))
    else:
        solved = [_solve_one(k) for k in indices]

    by_index = dict(zip(indices, solved))
    if conjugate_symmetry:
        for k in indices:
            by_index[line.conjugate_index(k)] = _conjugate_field(by_index[k])
    fields = [by_index[k] for k in range(line.n_s)]

    mult_cache = {}
    reports = []
    spatial_norm = None
    for sol in fields:
        mult, spatial = source.transform(sol.s)
        if spatial_norm is None:
            spatial_norm = spatial_l2_norm(spatial, mesh)
        mult_cache[sol.s] = abs(mult) * spatial_norm
        reports.append(s_domain_estimate_report(sol, blocks, mult_cache[sol.s]))

    result = SweepResult(line, fields, reports)
    if csv_path is not None:
        result.write_csv(csv_path)
    return result
