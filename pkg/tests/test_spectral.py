import numpy as np
import pytest

from fsiwave.spectral import (LaplaceLine, SpectralTrace, forward_laplace_line,
                              invert_laplace_line, parseval_residual)


def test_line_grid_symmetric_about_real_axis():
    line = LaplaceLine(s1=1.0, s2_max=10.0, n_s=8)
    assert np.allclose(np.sort(line.s2_grid), np.sort(-line.s2_grid))
    assert np.all(line.samples.real == 1.0)
    for k in range(line.n_s):
        kc = line.conjugate_index(k)
        assert line.samples[kc] == np.conj(line.samples[k])


def test_line_default_rule():
    line = LaplaceLine.default(horizon=2.0, bandwidth=25.0)
    assert line.s1 == pytest.approx(3.0)
    assert line.s2_max == pytest.approx(100.0)
    assert line.delta_s2 <= np.pi / 2.0
    assert line.n_s % 2 == 0


def test_line_invariants_enforced():
    with pytest.raises(ValueError):
        LaplaceLine(s1=-1.0, s2_max=10.0, n_s=8)
    with pytest.raises(ValueError):
        LaplaceLine(s1=1.0, s2_max=10.0, n_s=7)


def test_invert_zero_samples():
    line = LaplaceLine(s1=1.0, s2_max=10.0, n_s=16)
    times = np.linspace(0.0, 1.0, 11)
    out = invert_laplace_line(np.zeros(line.n_s, dtype=complex), line, times)
    assert np.allclose(out, 0.0)


def test_invert_t_exp_pair():
    horizon = 8.0
    line = LaplaceLine.default(horizon, 200.0)
    times = np.linspace(0.0, horizon, 2001)
    rec = invert_laplace_line(1.0 / (line.samples + 1) ** 2, line, times)
    want = times * np.exp(-times)
    assert np.linalg.norm(rec - want) / np.linalg.norm(want) < 1e-4


def test_invert_ramp_pair():
    horizon = 4.0
    line = LaplaceLine.default(horizon, 400.0)
    times = np.linspace(0.0, horizon, 1001)
    rec = invert_laplace_line(1.0 / line.samples**2, line, times)
    assert np.linalg.norm(rec - times) / np.linalg.norm(times) < 1e-3


def test_invert_sine_pair():
    horizon = 6.0
    line = LaplaceLine.default(horizon, 300.0)
    times = np.linspace(0.0, horizon, 1501)
    rec = invert_laplace_line(1.0 / (line.samples**2 + 1), line, times)
    want = np.sin(times)
    assert np.linalg.norm(rec - want) / np.linalg.norm(want) < 1e-3


def test_inversion_linearity():
    line = LaplaceLine.default(2.0, 50.0)
    times = np.linspace(0.0, 2.0, 101)
    f1 = 1.0 / (line.samples + 1) ** 2
    f2 = 1.0 / (line.samples + 2) ** 2
    lhs = invert_laplace_line(2 * f1 - 3 * f2, line, times)
    rhs = 2 * invert_laplace_line(f1, line, times) \
        - 3 * invert_laplace_line(f2, line, times)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_shape_mismatch_raises():
    line = LaplaceLine(s1=1.0, s2_max=10.0, n_s=16)
    with pytest.raises(ValueError, match="sample"):
        invert_laplace_line(np.zeros(8, dtype=complex), line,
                            np.linspace(0, 1, 5))


def test_forward_invert_round_trip():
    horizon = 1.0
    line = LaplaceLine.default(horizon, 60.0)
    times = np.linspace(0.0, horizon, 4001)
    signal = np.sin(4 * np.pi * times) ** 2 * (times * (horizon - times)) ** 2
    samples = forward_laplace_line(signal, times, line)
    rec = invert_laplace_line(samples, line, times)
    assert np.linalg.norm(rec - signal) / np.linalg.norm(signal) < 1e-4


def test_causality_of_inverted_transform():
    horizon = 2.0
    line = LaplaceLine.default(horizon, 100.0)
    times = np.linspace(-horizon, horizon, 2001)
    rec = invert_laplace_line(1.0 / (line.samples + 1) ** 2, line, times)
    pre = rec[times < -0.05]
    post = rec[times >= 0.0]
    assert np.linalg.norm(pre) / np.linalg.norm(post) < 1e-3


def test_parseval_pair_and_mismatch():
    horizon = 8.0
    line = LaplaceLine.default(horizon, 50.0)
    times = np.linspace(0.0, horizon, 4001)
    u = times * np.exp(-times)
    good = parseval_residual(u, times, 1.0 / (line.samples + 1) ** 2, line)
    assert good < 1e-4
    bad = parseval_residual(u, times, 1.0 / line.samples, line)
    assert bad > 1e-2


def test_trace_round_trip_and_hermitian_symmetry(rng):
    vals = rng.standard_normal((8, 8))
    trace = SpectralTrace.from_nodal(vals, 2.0)
    assert np.allclose(trace.to_nodal().real, vals)
    c = trace.coeffs
    for a in range(8):
        for b in range(8):
            assert c[-a % 8, -b % 8] == pytest.approx(np.conj(c[a, b]))


def test_trace_norm_is_grid_l2(rng):
    n, L = 8, 2.0
    vals = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    trace = SpectralTrace.from_nodal(vals, L)
    want = (L / n) ** 2 * np.sum(np.abs(vals) ** 2)
    assert trace.norm_sq() == pytest.approx(want, rel=1e-12)
