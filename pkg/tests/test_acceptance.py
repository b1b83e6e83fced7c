"""End-to-end acceptance checks for the coupled solver.

Each test states one verifiable property of the implementation: operator
dissipativity, branch and transform identities, oracle agreement, discrete
coercivity, manufactured convergence, stability ratios along the inversion
line, initial-condition recovery, the energy bound, and horizon scaling.
"""

import time

import numpy as np
import pytest

from fsiwave.assembly import (assemble_blocks, assemble_rhs, assemble_system,
                              coercivity_gap)
from fsiwave.config import RunConfig, _DEFAULTS
from fsiwave.dtn import apply_dtn_nodal, beta, dtn_dissipation
from fsiwave.geometry import RoughSurfacePair, build_mesh
from fsiwave.mms import convergence_study
from fsiwave.norms import trace_inequality_check
from fsiwave.physics import spatial_l2_norm
from fsiwave.solve import s_domain_estimate_report, solve_at_s
from fsiwave.spectral import LaplaceLine, SpectralTrace, parseval_residual
from fsiwave.timedomain import (energy_bound_report, apriori_exponents,
                                initial_condition_residuals, run_pipeline)

from oracles import dense_rhs_oracle, dense_system_oracle


@pytest.fixture(scope="module")
def default_cfg():
    return RunConfig(raw={sec: dict(v) for sec, v in _DEFAULTS.items()})


@pytest.fixture(scope="module")
def default_run(default_cfg):
    """One full default pipeline run shared by the reconstruction checks."""
    cfg = default_cfg
    mesh = cfg.mesh()
    mat = cfg.materials()
    source = cfg.source()
    blocks = assemble_blocks(mesh)
    t0 = time.monotonic()
    sweep, fields, energy, norms, report = run_pipeline(
        mesh, mat, source, cfg.horizon, line=cfg.line(), blocks=blocks,
        workers=4, solver_tol=cfg.solver_tol)
    elapsed = time.monotonic() - t0
    return {"cfg": cfg, "mesh": mesh, "mat": mat, "blocks": blocks,
            "sweep": sweep, "fields": fields, "energy": energy,
            "norms": norms, "report": report, "elapsed": elapsed}


def test_01_dtn_dissipativity_random_traces(rng):
    n, period, c = 16, 1.0, 1.5
    t0 = time.monotonic()
    for _ in range(10_000):
        s = complex(10 ** rng.uniform(-2, 2), rng.uniform(-100.0, 100.0))
        vals = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        trace = SpectralTrace.from_nodal(vals, period)
        assert dtn_dissipation(trace, s, c) >= -1e-12 * trace.norm_sq()
    assert time.monotonic() - t0 < 10.0


def test_02_branch_choice_random_parameters(rng):
    for _ in range(10_000):
        s = complex(10 ** rng.uniform(-2, 2), rng.uniform(-200.0, 200.0))
        c = 10 ** rng.uniform(-1, 1)
        xi2 = rng.uniform(0.0, 1e4)
        b = beta(xi2, s, c)
        assert np.real(b) > 0.0
        target = s * s / (c * c) + xi2
        assert abs(b * b - target) <= 1e-12 * max(abs(target), 1.0)


def test_03_fft_application_matches_dense_dft(rng):
    from oracles import dft_dtn_oracle
    n, period, c = 8, 1.0, 1.0
    for _ in range(100):
        s = complex(10 ** rng.uniform(-1, 1), rng.uniform(-20.0, 20.0))
        vals = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        got = apply_dtn_nodal(vals, period, s, c)
        want = dft_dtn_oracle(vals, period, s, c)
        assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(want))


def test_04_trace_inequality_band_limited_fields(rng):
    n, nz = 8, 6
    t0 = time.monotonic()
    for thickness, gamma0 in ((1.0, np.sqrt(2.0)), (0.5, np.sqrt(3.0))):
        z = np.linspace(-thickness, 0.0, nz + 1)
        for _ in range(100):
            coeffs = np.zeros((n, n, nz + 1), dtype=complex)
            for a in range(-2, 3):
                for b in range(-2, 3):
                    amp = rng.standard_normal() + 1j * rng.standard_normal()
                    coeffs[a % n, b % n, :] = amp * rng.standard_normal(nz + 1)
            rev = (-np.arange(n)) % n
            sym = 0.5 * (coeffs + np.conj(coeffs[rev][:, rev]))
            field = np.real(np.fft.ifft2(sym, axes=(0, 1)) * n * n)
            rep = trace_inequality_check(field, 1.0, z, face="top")
            assert rep.extras["gamma0"] == pytest.approx(gamma0)
            assert rep.ratio <= 1.0 + 1e-12, rep.ratio
    assert time.monotonic() - t0 < 10.0


def test_05_coercivity_gap_random_vectors(default_cfg, rng):
    surf = RoughSurfacePair.sinusoid(1.0, 8, 0.05, 1.0, g_level=-0.7, h=0.5)
    mesh = build_mesh(surf, 4, 4)
    mat = default_cfg.materials()
    blocks = assemble_blocks(mesh)
    n = blocks.n_p + blocks.n_u
    for s in (1.0 + 0j, 1.0 + 3.0j, 0.3 + 10.0j):
        system = assemble_system(mesh, mat, s, blocks)
        for _ in range(200):
            v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            rep = coercivity_gap(system, v)
            assert rep["gap"] >= -1e-10 * np.real(np.vdot(v, v))


def test_06_assembly_matches_dense_quadrature_oracle(default_cfg,
                                                     bump_source):
    surf = RoughSurfacePair.sinusoid(1.0, 2, 0.05, 1.0, g_level=-0.7, h=0.5)
    mesh = build_mesh(surf, 1, 1)
    mat = default_cfg.materials()
    for s in (1.0 + 0j, 0.7 + 4.0j):
        got = assemble_system(mesh, mat, s).dense_matrix()
        want = dense_system_oracle(mesh, mat, s)
        scale = np.max(np.abs(want))
        assert np.max(np.abs(got - want)) <= 1e-12 * scale
        got_b = assemble_rhs(mesh, mat, s, bump_source)
        want_b = dense_rhs_oracle(mesh, mat, s, bump_source)
        b_scale = max(np.max(np.abs(want_b)), 1e-300)
        assert np.max(np.abs(got_b - want_b)) <= 1e-12 * b_scale


def test_07_parseval_identity_on_reference_pair():
    line = LaplaceLine.default(8.0, 50.0)
    times = np.linspace(0.0, 8.0, 4001)
    values = times * np.exp(-times)
    samples = 1.0 / (line.samples + 1.0) ** 2
    assert parseval_residual(values, times, samples, line) < 1e-6


def test_08_manufactured_convergence_order(default_cfg):
    t0 = time.monotonic()
    study = convergence_study(default_cfg.materials(), s=2.0 + 2.0j)
    assert study["order_p"] >= 1.8, study
    assert study["order_u"] >= 1.8, study
    assert time.monotonic() - t0 < 300.0


def test_09_stability_ratios_bounded_spread(small_mesh, small_blocks,
                                            bump_source):
    # heavy, compliant solid: strong low-frequency response keeps the
    # transfer ratios within one order of magnitude along the line
    from fsiwave.physics import MaterialParams
    mat = MaterialParams(rho1=1.0, c=1.0, rho2=4.0, mu=0.25, lam=0.25)
    ratios_p, ratios_u = [], []
    spatial_norm = None
    for k in range(21):
        s = 1.0 + 1.0j * k
        system = assemble_system(small_mesh, mat, s, small_blocks)
        rhs = assemble_rhs(small_mesh, mat, s, bump_source)
        sol = solve_at_s(system, rhs, tol=1e-10)
        mult, spatial = bump_source.transform(s)
        if spatial_norm is None:
            spatial_norm = spatial_l2_norm(spatial, small_mesh)
        rep = s_domain_estimate_report(sol, small_blocks,
                                       abs(mult) * spatial_norm)
        ratios_p.append(rep.extras["R_p"])
        ratios_u.append(rep.extras["R_u"])
    for vals in (np.array(ratios_p), np.array(ratios_u)):
        assert np.all(vals > 0)
        assert np.max(vals) / np.min(vals) < 50.0, vals


def test_10_initial_conditions_recovered(default_run):
    cfg = default_run["cfg"]
    ic = initial_condition_residuals(default_run["fields"],
                                     default_run["blocks"])
    scale = max(default_run["norms"]["p_linf_l2"],
                default_run["norms"]["u_linf_l2"])
    for name, value in ic.items():
        assert value <= cfg.inversion_tolerance * max(scale, 1.0), (name, value)


def test_11_energy_bound_on_default_run(default_run):
    rep = energy_bound_report(default_run["energy"], default_run["fields"],
                              default_run["blocks"], default_run["mat"],
                              default_run["report"].dj_l1l2)
    assert rep["passed"], rep
    assert default_run["sweep"].max_residual() < 1e-8
    assert default_run["elapsed"] < 600.0


def test_12_horizon_scaling_exponents(mat, bump_source):
    surf = RoughSurfacePair.sinusoid(1.0, 8, 0.05, 1.0, g_level=-0.7, h=0.5)
    mesh = build_mesh(surf, 4, 5)
    t0 = time.monotonic()
    out = apriori_exponents(mesh, mat, bump_source, [0.5, 1.0, 2.0, 4.0],
                            workers=4)
    assert not out["zero_source"]
    assert out["all_passed"], out["slopes"]
    for name, row in out["slopes"].items():
        assert row["slope"] <= row["bound"], (name, row)
    for name, spread in out["spreads"].items():
        assert spread < 3.0, (name, spread)
    assert time.monotonic() - t0 < 1800.0
