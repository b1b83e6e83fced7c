import numpy as np
import pytest

from fsiwave import (CompactBump, CosineBump, MaterialParams,
                     RoughSurfacePair, SourceTerm, build_mesh)
from fsiwave.assembly import assemble_blocks


@pytest.fixture(scope="session")
def mat():
    return MaterialParams(rho1=1.0, c=1.0, rho2=1.0, mu=1.0, lam=1.0)


@pytest.fixture(scope="session")
def small_surfaces():
    return RoughSurfacePair.sinusoid(1.0, 8, 0.05, 1.0,
                                     g_level=-0.7, h=0.5)


@pytest.fixture(scope="session")
def small_mesh(small_surfaces):
    return build_mesh(small_surfaces, 4, 5)


@pytest.fixture(scope="session")
def small_blocks(small_mesh):
    return assemble_blocks(small_mesh)


@pytest.fixture(scope="session")
def bump_source():
    return SourceTerm(
        spatial=CosineBump(center=(0.5, 0.5, -0.35),
                           widths=(0.25, 0.25, 0.12)),
        temporal=CompactBump(duration=0.5, omega=20.0),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
