"""Growth of space-time solution norms with the time horizon T.

With the source held fixed (it switches off at t = 0.5), the solution's
L^infinity-in-time and L^2-in-time norms can grow at most polynomially in
the horizon; this script runs the full pipeline at T in {0.5, 1, 2, 4},
fits log-log slopes, and compares them with the expected exponents.  The
energy-type sup norms should stay T-uniformly bounded (small spread).

Run:  python demos/horizon_scaling.py
"""

from fsiwave import (CompactBump, CosineBump, MaterialParams,
                     RoughSurfacePair, SourceTerm, build_mesh)
from fsiwave.timedomain import apriori_exponents, write_exponents_csv

surfaces = RoughSurfacePair.sinusoid(period=1.0, n=8, amplitude=0.05,
                                     wavelength=1.0, g_level=-0.7, h=0.5)
mesh = build_mesh(surfaces, nz_fluid=4, nz_solid=5)
mat = MaterialParams(rho1=1.0, c=1.0, rho2=1.0, mu=1.0, lam=1.0)
source = SourceTerm(
    spatial=CosineBump(center=(0.5, 0.5, -0.35), widths=(0.25, 0.25, 0.12)),
    temporal=CompactBump(duration=0.5, omega=20.0),
)

report = apriori_exponents(mesh, mat, source, [0.5, 1.0, 2.0, 4.0],
                           workers=4)

print(f"{'norm':>12} {'slope':>8} {'bound':>8} {'pass':>6}")
for name, row in report["slopes"].items():
    print(f"{name:>12} {row['slope']:8.3f} {row['bound']:8.3f} "
          f"{str(row['passed']):>6}")
print("\nT-uniform energy-norm spreads (should be close to 1):")
for name, spread in report["spreads"].items():
    print(f"  {name}: {spread:.3f}")

write_exponents_csv("exponents.csv", report)
print("wrote exponents.csv")
