import csv

import numpy as np
import pytest

from fsiwave.physics import CompactBump, CosineBump, SourceTerm
from fsiwave.solve import ComplexFieldS, SweepResult
from fsiwave.spectral import LaplaceLine
from fsiwave.timedomain import (APRIORI_BOUNDS, EnergyTrace, TimeSeriesField,
                                apriori_exponents, energy_bound_report,
                                energy_series,
                                initial_condition_residuals,
                                mode_dissipation_minimum,
                                reconstruct_time_fields, run_pipeline,
                                write_exponents_csv, write_norms_csv)


def _analytic_sweep(line, n_p, n_u, rng):
    """Sweep whose transforms are 1/(s+1)^4 times fixed spatial vectors."""
    vp = rng.standard_normal(n_p)
    vu = rng.standard_normal(n_u)
    fields = []
    for s in line.samples:
        g = 1.0 / (s + 1.0) ** 4
        fields.append(ComplexFieldS(s, g * vp, g * vu, 0.0))
    return SweepResult(line, fields), vp, vu


def _profile(t):
    # inverse transform of 1/(s+1)^4 and its first two derivatives;
    # f, f', f'' all vanish at t = 0, so s f and s^2 f transform the
    # derivatives exactly and the line truncation error stays small
    f = t**3 * np.exp(-t) / 6.0
    df = (0.5 * t**2 - t**3 / 6.0) * np.exp(-t)
    d2f = (t - t**2 + t**3 / 6.0) * np.exp(-t)
    return f, df, d2f


def test_reconstruct_zero_sweep():
    line = LaplaceLine(s1=2.0, s2_max=10.0, n_s=8)
    fields = [ComplexFieldS(s, np.zeros(3, dtype=complex),
                            np.zeros(6, dtype=complex), 0.0)
              for s in line.samples]
    out = reconstruct_time_fields(SweepResult(line, fields), line,
                                  np.linspace(0, 1, 5))
    for arr in (out.p, out.u, out.dp, out.du, out.d2u):
        assert np.allclose(arr, 0.0)


def test_reconstruct_analytic_pair(rng):
    horizon = 4.0
    line = LaplaceLine.default(horizon, 150.0)
    sweep, vp, vu = _analytic_sweep(line, 3, 4, rng)
    times = np.linspace(0.0, horizon, 801)
    out = reconstruct_time_fields(sweep, line, times)
    f, df, d2f = _profile(times)
    for got, profile, v in ((out.p, f, vp), (out.u, f, vu),
                            (out.dp, df, vp), (out.du, df, vu),
                            (out.d2u, d2f, vu)):
        want = profile[:, None] * v
        err = np.linalg.norm(got - want) / np.linalg.norm(want)
        assert err < 1e-3


def test_reconstruct_sample_mismatch():
    line = LaplaceLine(s1=2.0, s2_max=10.0, n_s=8)
    with pytest.raises(ValueError, match="samples"):
        reconstruct_time_fields(SweepResult(line, []), line,
                                np.linspace(0, 1, 3))


def test_energy_series_closed_form(small_blocks, mat, rng):
    times = np.linspace(0.0, 2.0, 9)
    f, df, d2f = _profile(times)
    vp = rng.standard_normal(small_blocks.n_p)
    vu = rng.standard_normal(small_blocks.n_u)
    fields = TimeSeriesField(times, f[:, None] * vp, f[:, None] * vu,
                             df[:, None] * vp, df[:, None] * vu,
                             d2f[:, None] * vu)
    trace = energy_series(fields, small_blocks, mat)
    m1 = float(vp @ (small_blocks.m1 @ vp))
    k1 = float(vp @ (small_blocks.k1 @ vp))
    want_e1 = df**2 * m1 / mat.c**2 + f**2 * k1
    assert np.allclose(trace.e1, want_e1, rtol=1e-12)
    assert np.all(trace.e2 >= 0)
    assert trace.total[0] == pytest.approx(trace.e1[0] + trace.e2[0])


def test_energy_zero_at_start(small_blocks, mat, rng):
    times = np.linspace(0.0, 1.0, 5)
    f, df, d2f = _profile(times)
    vp = rng.standard_normal(small_blocks.n_p)
    vu = rng.standard_normal(small_blocks.n_u)
    fields = TimeSeriesField(times, f[:, None] * vp, f[:, None] * vu,
                             df[:, None] * vp, df[:, None] * vu,
                             d2f[:, None] * vu)
    trace = energy_series(fields, small_blocks, mat)
    assert trace.e1[0] == pytest.approx(0.0, abs=1e-14)


def test_initial_condition_residuals_small(small_blocks, rng):
    times = np.linspace(0.0, 1.0, 5)
    f, df, d2f = _profile(times)
    vp = rng.standard_normal(small_blocks.n_p)
    vu = rng.standard_normal(small_blocks.n_u)
    fields = TimeSeriesField(times, f[:, None] * vp, f[:, None] * vu,
                             df[:, None] * vp, df[:, None] * vu,
                             d2f[:, None] * vu)
    res = initial_condition_residuals(fields, small_blocks)
    assert res["p0"] == 0.0 and res["u0"] == 0.0 and res["du0"] == 0.0


def test_mode_dissipation_minimum_nonnegative():
    for horizon in (0.5, 1.0, 4.0):
        line = LaplaceLine.default(horizon, 25.0)
        assert mode_dissipation_minimum(line, 8, 1.0, 1.0) >= 0.0
        assert mode_dissipation_minimum(line, 8, 2.0, 0.5) >= 0.0


def test_energy_csv_schema(tmp_path):
    trace = EnergyTrace(np.array([0.0, 0.5]), np.array([0.0, 1.0]),
                        np.array([0.0, 2.0]))
    path = tmp_path / "energy.csv"
    trace.write_csv(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "e1", "e2", "E"]
    assert float(rows[2][3]) == pytest.approx(3.0)


def test_pipeline_smoke(small_mesh, small_blocks, mat, bump_source):
    line = LaplaceLine(s1=6.0, s2_max=40.0, n_s=32)
    sweep, fields, energy, norms, report = run_pipeline(
        small_mesh, mat, bump_source, horizon=1.0, line=line,
        blocks=small_blocks, n_t=33)
    assert report.valid
    assert sweep.max_residual() < 1e-8
    assert np.all(energy.total >= -1e-14)
    for name in APRIORI_BOUNDS:
        assert norms[name] > 0.0
    field_scale = float(np.max(np.abs(fields.p)))
    ic = initial_condition_residuals(fields, small_blocks)
    assert ic["p0"] < 1e-2 * field_scale
    rep = energy_bound_report(energy, fields, small_blocks, mat,
                              report.dj_l1l2)
    assert rep["passed"], rep


def test_apriori_requires_three_horizons(small_mesh, mat, bump_source):
    with pytest.raises(ValueError, match="3 horizons"):
        apriori_exponents(small_mesh, mat, bump_source, [0.5, 1.0])


def test_apriori_requires_compact_support(small_mesh, mat, bump_source):
    # the bump lasts 0.5, so a 0.25 shortest horizon cuts it off
    with pytest.raises(ValueError, match="compactly supported"):
        apriori_exponents(small_mesh, mat, bump_source, [0.25, 0.5, 1.0])


def test_apriori_zero_source(small_mesh, mat):
    spatial = CosineBump(center=(0.5, 0.5, -0.35), widths=(0.25, 0.25, 0.12))
    silent = SourceTerm(spatial, CompactBump(duration=0.5, omega=20.0,
                                             scale=0.0))
    out = apriori_exponents(small_mesh, mat, silent, [0.6, 1.0, 1.5],
                            bandwidth=5.0)
    assert out["zero_source"] and out["all_passed"]


def test_norms_and_exponents_csv(tmp_path):
    per_horizon = {1.0: {"p_linf_l2": 0.5}, 2.0: {"p_linf_l2": 0.7}}
    npath = tmp_path / "norms.csv"
    write_norms_csv(npath, per_horizon)
    with open(npath, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["T", "norm name", "value"]
    assert rows[1][:2] == ["1", "p_linf_l2"]

    report = {"slopes": {"p_linf_l2": {"slope": 0.1, "bound": 1.25,
                                       "passed": True}}}
    epath = tmp_path / "exponents.csv"
    write_exponents_csv(epath, report)
    with open(epath, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["norm name", "fitted slope", "bound", "pass"]
    assert rows[1] == ["p_linf_l2", "0.100000", "1.250000", "True"]
