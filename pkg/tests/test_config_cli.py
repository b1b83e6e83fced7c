import csv
import json

import pytest

from fsiwave.cli import main
from fsiwave.config import ConfigError, load_config
from fsiwave.physics import CompactBump, RampedSine, ZeroProfile


SMALL_RUN = """
[geometry]
n = 8
nz_fluid = 4
nz_solid = 5

[laplace]
horizon = 1.0
s1 = 6.0
s2_max = 40.0
n_s = 32
"""


def _write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_defaults_round_trip(tmp_path):
    cfg = load_config(_write(tmp_path, ""))
    assert cfg.horizon == 1.0
    assert cfg.bandwidth == 25.0
    assert cfg.workers == 1
    assert cfg.seed == 0
    mesh = cfg.mesh()
    assert mesh.n_lateral == 16
    mat = cfg.materials()
    assert mat.c == 1.0 and mat.lam == 1.0
    source = cfg.source()
    assert isinstance(source.temporal, CompactBump)
    line = cfg.line()
    assert line.s1 == pytest.approx(6.0)
    assert line.s2_max == pytest.approx(100.0)


def test_explicit_line_and_kinds(tmp_path):
    cfg = load_config(_write(tmp_path, SMALL_RUN))
    line = cfg.line()
    assert (line.s1, line.s2_max, line.n_s) == (6.0, 40.0, 32)
    cfg2 = load_config(_write(tmp_path, "[source]\nkind = ramped_sine\n",
                              "r.ini"))
    assert isinstance(cfg2.source().temporal, RampedSine)
    cfg3 = load_config(_write(tmp_path, "[source]\nkind = zero\n", "z.ini"))
    assert isinstance(cfg3.source().temporal, ZeroProfile)


def test_unknown_key_and_section(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(_write(tmp_path, "[geometry]\nbogus = 1\n"))
    with pytest.raises(ConfigError, match="unknown section"):
        load_config(_write(tmp_path, "[nonsense]\na = 1\n"))


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_config("/no/such/file.ini")


def test_odd_n_s_rejected(tmp_path):
    with pytest.raises(ConfigError, match="even"):
        load_config(_write(tmp_path, "[laplace]\nn_s = 7\n"))


def test_worker_env_override(tmp_path, monkeypatch):
    cfg = load_config(_write(tmp_path, "[solver]\nworkers = 2\n"))
    assert cfg.workers == 2
    monkeypatch.setenv("FSIWAVE_WORKERS", "5")
    assert cfg.workers == 5


def test_cli_missing_config_exits_2(capsys):
    assert main(["simulate", "--config", "/no/such/file.ini"]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_bad_materials_exits_2(tmp_path, capsys):
    path = _write(tmp_path, "[materials]\nmu = 2.0\nlambda = -3.0\n")
    assert main(["simulate", "--config", path]) == 2
    assert "lambda + mu" in capsys.readouterr().err


def test_cli_unknown_suite_exits_2(tmp_path, capsys):
    path = _write(tmp_path, "")
    assert main(["verify", "--config", path, "--suite", "bogus"]) == 2


def test_cli_simulate_smoke(tmp_path, capsys):
    outdir = tmp_path / "out"
    path = _write(tmp_path, SMALL_RUN + f"\n[output]\ndirectory = {outdir}\n")
    assert main(["simulate", "--config", path]) == 0
    for name in ("sweep.csv", "energy.csv", "norms.csv", "metadata.json"):
        assert (outdir / name).exists()
    with open(outdir / "sweep.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["re_s", "im_s", "residual", "R_p", "R_u"]
    assert len(rows) == 33
    meta = json.loads((outdir / "metadata.json").read_text())
    assert meta["max_solver_residual"] < 1e-8
    assert set(meta["initial_condition_residuals"]) == {"p0", "u0", "du0"}


def test_cli_verify_fast_suites(tmp_path, capsys):
    outdir = tmp_path / "out"
    for suite in ("dtn", "traces", "parseval"):
        path = _write(tmp_path, f"[output]\ndirectory = {outdir}\n",
                      f"{suite}.ini")
        assert main(["verify", "--config", path, "--suite", suite]) == 0
        out = capsys.readouterr().out
        assert f"{suite}: PASS" in out
    report = (outdir / "verify_report.txt").read_text()
    assert "PASS" in report


def test_cli_verify_coercivity(tmp_path, capsys):
    outdir = tmp_path / "out"
    path = _write(tmp_path, SMALL_RUN + f"\n[output]\ndirectory = {outdir}\n")
    assert main(["verify", "--config", path, "--suite", "coercivity"]) == 0
    assert "coercivity: PASS" in capsys.readouterr().out


def test_cli_simulate_deterministic(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    for outdir in (out1, out2):
        path = _write(tmp_path, SMALL_RUN + f"\n[output]\ndirectory = {outdir}\n",
                      f"{outdir.name}.ini")
        assert main(["simulate", "--config", path]) == 0
    for name in ("sweep.csv", "energy.csv", "norms.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
