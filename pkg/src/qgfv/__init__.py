"""Finite-volume solver for the barotropic vorticity equation with linear
and nonlinear differential low-pass filters, plus the double-gyre
benchmark harness."""

__version__ = "0.1.0"

from .config import (BENCHMARK_BOUNDS, BENCHMARK_CASES, ModelKind,
                     SimulationConfig, benchmark_case, parse_model)
from .diagnostics import (DiagnosticsRecord, gyre_count, kinetic_energy,
                          recover_vorticity, update_means)
from .fields import CellField, DirichletBC, FaceFluxes, planetary_bc
from .io import ConfigError, parse_config
from .linalg import (BreakdownError, LinearSolverError, NonConvergenceError,
                     SolveResult, SolverConfig, SparseMatrix, bicgstab_solve,
                     cg_solve, jacobi_preconditioner)
from .mesh import Face, StructuredMesh, build_mesh, cell_centroid
from .operators import (cell_flux_divergence, face_interpolate, gauss_gradient,
                        indicator_function, indicator_face_values,
                        streamfunction_fluxes)
from .solver import (PhysicalParams, RunResult, Simulation, SimulationError,
                     State, TimeParams, double_gyre_forcing, munk_scale, run)

__all__ = [
    "BENCHMARK_BOUNDS", "BENCHMARK_CASES", "BreakdownError", "CellField",
    "ConfigError", "DiagnosticsRecord", "DirichletBC", "Face", "FaceFluxes",
    "LinearSolverError", "ModelKind", "NonConvergenceError", "PhysicalParams",
    "RunResult", "Simulation", "SimulationConfig", "SimulationError",
    "SolveResult", "SolverConfig", "SparseMatrix", "State", "StructuredMesh",
    "TimeParams", "benchmark_case", "bicgstab_solve", "build_mesh",
    "cell_centroid", "cell_flux_divergence", "cg_solve", "double_gyre_forcing",
    "face_interpolate", "gauss_gradient", "gyre_count", "indicator_face_values",
    "indicator_function", "jacobi_preconditioner", "kinetic_energy",
    "munk_scale", "parse_config", "parse_model", "planetary_bc",
    "recover_vorticity", "run", "streamfunction_fluxes", "update_means",
]
