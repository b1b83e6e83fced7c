"""Run configuration: INI-style sections mapped to solver inputs.

Grammar: standard INI as read by ``configparser``, with sections
``[geometry]``, ``[materials]``, ``[source]``, ``[laplace]``, ``[solver]``,
``[output]``.  Unknown keys are rejected so typos fail loudly.  See the
repository README for the full key list and defaults.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

from .geometry import MappedMesh, RoughSurfacePair, build_mesh
from .physics import (CompactBump, CosineBump, MaterialParams, RampedSine,
                      SourceTerm, ZeroProfile)
from .spectral import DEFAULT_INVERSION_TOL, LaplaceLine

WORKER_ENV_VAR = "FSIWAVE_WORKERS"


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


_DEFAULTS = {
    "geometry": {
        "preset": "sinusoid",
        "period": "1.0",
        "n": "16",
        "nz_fluid": "6",
        "nz_solid": "5",
        "h": "0.5",
        "f_level": "0.0",
        "g_level": "-0.7",
        "amplitude": "0.05",
        "wavelength": "1.0",
        "axis": "x",
        "csv_path": "",
    },
    "materials": {
        "rho1": "1.0",
        "c": "1.0",
        "rho2": "1.0",
        "mu": "1.0",
        "lambda": "1.0",
    },
    "source": {
        "kind": "compact_bump",
        "duration": "0.5",
        "omega": "20.0",
        "scale": "1.0",
        "center": "0.5,0.5,-0.35",
        "widths": "0.25,0.25,0.12",
    },
    "laplace": {
        "horizon": "1.0",
        "bandwidth": "25.0",
        "s1": "",
        "s2_max": "",
        "n_s": "",
        "tolerance": str(DEFAULT_INVERSION_TOL),
    },
    "solver": {
        "tol": "1e-10",
        "workers": "1",
    },
    "output": {
        "directory": "out",
        "seed": "0",
    },
}


@dataclass
class RunConfig:
    """Parsed configuration with typed accessors for each pipeline stage."""

    raw: dict = field(default_factory=dict)
    path: str = ""

    # --- geometry ---

    def surfaces(self) -> RoughSurfacePair:
        g = self.raw["geometry"]
        preset = g["preset"]
        n = int(g["n"])
        period = float(g["period"])
        kw = dict(f_level=float(g["f_level"]), g_level=float(g["g_level"]),
                  h=float(g["h"]))
        if preset == "flat":
            return RoughSurfacePair.flat(period, n, **kw)
        if preset == "sinusoid":
            return RoughSurfacePair.sinusoid(
                period, n, float(g["amplitude"]), float(g["wavelength"]),
                axis=g["axis"], **kw)
        if preset == "csv":
            if not g["csv_path"]:
                raise ConfigError("geometry preset 'csv' needs csv_path")
            return RoughSurfacePair.from_csv(g["csv_path"], float(g["h"]))
        raise ConfigError(f"unknown geometry preset '{preset}'")

    def mesh(self) -> MappedMesh:
        g = self.raw["geometry"]
        return build_mesh(self.surfaces(), int(g["nz_fluid"]),
                          int(g["nz_solid"]))

    # --- materials ---

    def materials(self) -> MaterialParams:
        m = self.raw["materials"]
        return MaterialParams(rho1=float(m["rho1"]), c=float(m["c"]),
                              rho2=float(m["rho2"]), mu=float(m["mu"]),
                              lam=float(m["lambda"]))

    # --- source ---

    def source(self) -> SourceTerm:
        s = self.raw["source"]
        center = tuple(float(v) for v in s["center"].split(","))
        widths = tuple(float(v) for v in s["widths"].split(","))
        if len(center) != 3 or len(widths) != 3:
            raise ConfigError("source center and widths need 3 components")
        spatial = CosineBump(center=center, widths=widths)
        kind = s["kind"]
        if kind == "compact_bump":
            temporal = CompactBump(duration=float(s["duration"]),
                                   omega=float(s["omega"]),
                                   scale=float(s["scale"]))
        elif kind == "ramped_sine":
            temporal = RampedSine(omega=float(s["omega"]))
        elif kind == "zero":
            temporal = ZeroProfile()
        else:
            raise ConfigError(f"unknown source kind '{kind}'")
        return SourceTerm(spatial=spatial, temporal=temporal)

    # --- laplace line ---

    @property
    def horizon(self) -> float:
        return float(self.raw["laplace"]["horizon"])

    @property
    def bandwidth(self) -> float:
        return float(self.raw["laplace"]["bandwidth"])

    @property
    def inversion_tolerance(self) -> float:
        return float(self.raw["laplace"]["tolerance"])

    def line(self) -> LaplaceLine:
        lp = self.raw["laplace"]
        if lp["s1"] and lp["s2_max"] and lp["n_s"]:
            return LaplaceLine(s1=float(lp["s1"]), s2_max=float(lp["s2_max"]),
                               n_s=int(lp["n_s"]))
        s1 = float(lp["s1"]) if lp["s1"] else None
        return LaplaceLine.default(self.horizon, self.bandwidth, s1=s1)

    # --- solver / output ---

    @property
    def solver_tol(self) -> float:
        return float(self.raw["solver"]["tol"])

    @property
    def workers(self) -> int:
        env = os.environ.get(WORKER_ENV_VAR)
        if env:
            return int(env)
        return int(self.raw["solver"]["workers"])

    @property
    def output_dir(self) -> str:
        return self.raw["output"]["directory"]

    @property
    def seed(self) -> int:
        return int(self.raw["output"]["seed"])

    def as_dict(self) -> dict:
        return {sec: dict(vals) for sec, vals in self.raw.items()}


def load_config(path) -> RunConfig:
    if not os.path.exists(path):
        raise FileNotFoundError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    raw = {}
    for section, defaults in _DEFAULTS.items():
        raw[section] = dict(defaults)
        if parser.has_section(section):
            for key, value in parser.items(section):
                if key not in defaults:
                    raise ConfigError(
                        f"unknown key '{key}' in section [{section}]")
                raw[section][key] = value
    for section in parser.sections():
        if section not in _DEFAULTS:
            raise ConfigError(f"unknown section [{section}]")
    cfg = RunConfig(raw=raw, path=str(path))
    if int(raw["laplace"]["n_s"] or 2) % 2 != 0:
        raise ConfigError("laplace n_s must be even")
    return cfg
