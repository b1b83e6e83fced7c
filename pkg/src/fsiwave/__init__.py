"""Coupled acoustic-elastic wave propagation across a rough fluid-solid
interface: Laplace-domain solves with a spectral transparent boundary
condition, Bromwich-line time reconstruction, and stability verification."""

__version__ = "0.1.0"

from .geometry import (GeometryError, MappedMesh, RoughSurfacePair,
                       build_mesh, interface_weight)
from .physics import (CompactBump, CosineBump, MaterialParams, RampedSine,
                      SampledProfile, SourceTerm, SourceValidationError,
                      ZeroProfile, transform_source, validate_source)
from .spectral import (LaplaceLine, SpectralTrace, forward_laplace_line,
                       invert_laplace_line, parseval_residual)
from .dtn import apply_dtn, apply_dtn_nodal, beta, dtn_dissipation
from .norms import (NormReport, frobenius_div_check, interface_half_norm,
                    trace_half_norm, trace_inequality_check)
from .assembly import (SystemBlocks, SystemMatrix, assemble_blocks,
                       assemble_rhs, assemble_system, coercivity_gap)
from .solve import (ComplexFieldS, SolverError, SweepResult,
                    s_domain_estimate_report, solve_at_s, sweep_line)
from .timedomain import (EnergyTrace, TimeSeriesField, apriori_exponents,
                         energy_bound_report, energy_series, horizon_norms,
                         initial_condition_residuals, reconstruct_time_fields,
                         run_pipeline)
from .mms import convergence_study, make_manufactured_solution
from .config import ConfigError, RunConfig, load_config

__all__ = [name for name in dir() if not name.startswith("_")]
