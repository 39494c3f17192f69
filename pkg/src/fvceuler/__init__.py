"""1D compressible Euler solvers: the finite volume characteristics (FVC)
scheme, Rusanov / HLL / Roe reference schemes and an exact Riemann solver."""
from .gas_dynamics import (
    ConservedState,
    EulerDomainError,
    GasModel,
    PositivityError,
    PrimitiveState,
    to_conserved,
    to_primitive,
)
from .mesh import CflError, CflMode, CflRule, Field, Mesh, init_riemann, l1_error
from .fvc import ADAPTIVE, AlphaMode, LimiterKind, fvc_step
from .classic_schemes import NumericalFlux, RoeAverageError, godunov_type_step
from .exact_riemann import exact_profile, solve_star
from .config import SchemeConfig
from .harness import Benchmark, RunResult, builtin_benchmarks, run_benchmark

__version__ = "0.1.0"
