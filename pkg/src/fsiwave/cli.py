"""Command-line pipeline: simulate, verify, and sweep-T subcommands."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .assembly import SystemMatrix, assemble_blocks, coercivity_gap
from .config import ConfigError, load_config
from .dtn import dtn_dissipation
from .geometry import GeometryError
from .mms import convergence_study
from .norms import trace_inequality_check
from .physics import RampedSine, SourceValidationError
from .solve import SolverError
from .spectral import LaplaceLine, SpectralTrace, parseval_residual
from .timedomain import (apriori_exponents, initial_condition_residuals,
                         run_pipeline, write_exponents_csv, write_norms_csv)


def _write_metadata(outdir, cfg, extra=None):
    meta = {"version": __version__, "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "config_path": cfg.path, "config": cfg.as_dict()}
    if extra:
        meta.update(extra)
    with open(os.path.join(outdir, "metadata.json"), "w") as fh:
        json.dump(meta, fh, indent=2)


def _cmd_simulate(cfg) -> int:
    mesh = cfg.mesh()
    mat = cfg.materials()
    source = cfg.source()
    blocks = assemble_blocks(mesh)
    line = cfg.line()
    sweep, fields, energy, norms, report = run_pipeline(
        mesh, mat, source, cfg.horizon, line=line, blocks=blocks,
        workers=cfg.workers, solver_tol=cfg.solver_tol)
    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    sweep.write_csv(os.path.join(outdir, "sweep.csv"))
    energy.write_csv(os.path.join(outdir, "energy.csv"))
    write_norms_csv(os.path.join(outdir, "norms.csv"), {cfg.horizon: norms})

    ic = initial_condition_residuals(fields, blocks)
    scale = max(norms["p_linf_l2"], norms["u_linf_l2"], 1e-300)
    ic_ok = all(v <= cfg.inversion_tolerance * max(scale, 1.0)
                for v in ic.values())
    _write_metadata(outdir, cfg, {
        "initial_condition_residuals": ic,
        "max_solver_residual": sweep.max_residual(),
        "source_dj_l1l2": report.dj_l1l2,
    })
    print(f"simulate: wrote {outdir}/sweep.csv, energy.csv, norms.csv")
    print(f"simulate: initial-condition residuals {ic}")
    return 0 if ic_ok else 1


def _verify_dtn(cfg):
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(200):
        n = 8
        trace = SpectralTrace(
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)),
            1.0)
        s = complex(10 ** rng.uniform(-2, 3), rng.uniform(-100, 100))
        worst = min(worst, dtn_dissipation(trace, s, 1.5) / trace.norm_sq())
    return worst >= -1e-12, f"min scaled dissipation {worst:.3e}"


def _verify_traces(cfg):
    rng = np.random.default_rng(cfg.seed)
    ok = True
    worst = 0.0
    for thickness in (1.0, 0.5):
        for _ in range(50):
            n, nz = 8, 6
            field = rng.standard_normal((n, n, nz + 1))
            z = np.linspace(-thickness, 0.0, nz + 1)
            rep = trace_inequality_check(field, 1.0, z, face="top")
            worst = max(worst, rep.ratio)
            ok = ok and rep.passed
    return ok, f"max trace ratio {worst:.6f}"


def _verify_coercivity(cfg):
    mesh = cfg.mesh()
    mat = cfg.materials()
    blocks = assemble_blocks(mesh)
    rng = np.random.default_rng(cfg.seed)
    worst = np.inf
    for s in (1 + 0j, 1 + 3j, 0.3 + 10j):
        matrix = SystemMatrix(mesh, mat, s, blocks)
        for _ in range(50):
            v = rng.standard_normal(matrix.shape[0]) \
                + 1j * rng.standard_normal(matrix.shape[0])
            gap = coercivity_gap(matrix, v)["gap"]
            worst = min(worst, gap / np.vdot(v, v).real)
    return worst >= -1e-10, f"min scaled gap {worst:.3e}"


def _verify_parseval(cfg):
    profile = RampedSine()
    horizon = 4.0
    line = LaplaceLine.default(horizon, 40.0)
    times = np.linspace(0.0, horizon, 2001)
    res = parseval_residual(profile.amplitude(times), times,
                            np.array([profile.laplace(s)
                                      for s in line.samples]), line)
    return res < 1e-4, f"parseval residual {res:.3e}"


def _verify_convergence(cfg):
    study = convergence_study(cfg.materials())
    ok = study["order_p"] >= 1.8 and study["order_u"] >= 1.8
    return ok, (f"orders p={study['order_p']:.2f} u={study['order_u']:.2f}")


_SUITES = {
    "dtn": _verify_dtn,
    "traces": _verify_traces,
    "coercivity": _verify_coercivity,
    "parseval": _verify_parseval,
    "convergence": _verify_convergence,
}


def _cmd_verify(cfg, suite=None) -> int:
    names = [suite] if suite else list(_SUITES)
    if suite and suite not in _SUITES:
        print(f"unknown suite '{suite}'; available: {', '.join(_SUITES)}",
              file=sys.stderr)
        return 2
    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    all_ok = True
    lines = []
    for name in names:
        ok, detail = _SUITES[name](cfg)
        all_ok = all_ok and ok
        line = f"{name}: {'PASS' if ok else 'FAIL'} ({detail})"
        lines.append(line)
        print(line)
    with open(os.path.join(outdir, "verify_report.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    _write_metadata(outdir, cfg, {"verify": lines})
    return 0 if all_ok else 1


def _cmd_sweep_t(cfg, horizons) -> int:
    mesh = cfg.mesh()
    mat = cfg.materials()
    source = cfg.source()
    report = apriori_exponents(mesh, mat, source, horizons,
                               bandwidth=cfg.bandwidth, workers=cfg.workers,
                               solver_tol=cfg.solver_tol)
    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    write_norms_csv(os.path.join(outdir, "norms.csv"), report["norms"])
    write_exponents_csv(os.path.join(outdir, "exponents.csv"), report)
    _write_metadata(outdir, cfg, {"spreads": report.get("spreads", {})})
    for name, row in report.get("slopes", {}).items():
        print(f"{name}: slope {row['slope']:.3f} bound {row['bound']:.3f} "
              f"{'PASS' if row['passed'] else 'FAIL'}")
    return 0 if report["all_passed"] else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fsiwave",
        description="Coupled acoustic-elastic wave simulation across a rough "
                    "fluid-solid interface.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="sweep, reconstruct, energies")
    p_sim.add_argument("--config", required=True)

    p_ver = sub.add_parser("verify", help="run the property/lemma suite")
    p_ver.add_argument("--config", required=True)
    p_ver.add_argument("--suite", default=None)

    p_swt = sub.add_parser("sweep-T", help="horizon-scaling study")
    p_swt.add_argument("--config", required=True)
    p_swt.add_argument("--horizons", required=True,
                       help="comma-separated horizons, e.g. 0.5,1,2,4")

    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "simulate":
            return _cmd_simulate(cfg)
        if args.command == "verify":
            return _cmd_verify(cfg, args.suite)
        horizons = [float(v) for v in args.horizons.split(",")]
        return _cmd_sweep_t(cfg, horizons)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, GeometryError, SourceValidationError,
            ValueError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
