"""Manufactured-solution convergence studies for the two elliptic
operators. Used by the `convergence` CLI command and the acceptance suite.

The manufactured field sin(pi x) sin(pi y) vanishes on the boundary of
the benchmark rectangle [0,1] x [-1,1], so both studies run with the
solver's own boundary treatment exercised end to end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import assemble_helmholtz_filter, assemble_poisson
from .config import BENCHMARK_BOUNDS
from .fields import CellField, DirichletBC
from .linalg import SolverConfig, cg_solve
from .mesh import build_mesh

DEFAULT_MESHES = ((16, 32), (32, 64), (64, 128))
_TIGHT = SolverConfig(rel_tol=1e-12, abs_tol=1e-14)


def _exact(x, y):
    return np.sin(np.pi * x) * np.sin(np.pi * y)


def _l2_error(mesh, solution, exact_values) -> float:
    return float(np.sqrt(mesh.cell_volume * np.sum((solution - exact_values) ** 2)))


@dataclass
class ConvergenceResult:
    kind: str
    mesh_sizes: list[float]
    errors: list[float]
    rates: list[float]

    def table(self) -> str:
        lines = [f"{self.kind} manufactured-solution study",
                 f"{'h':>10} {'L2 error':>14} {'rate':>8}"]
        for k, (h, e) in enumerate(zip(self.mesh_sizes, self.errors)):
            rate = f"{self.rates[k - 1]:.3f}" if k > 0 else "-"
            lines.append(f"{h:10.5f} {e:14.6e} {rate:>8}")
        return "\n".join(lines)


def _study(kind: str, solve_one, meshes) -> ConvergenceResult:
    hs, errors = [], []
    for nx, ny in meshes:
        mesh = build_mesh(nx, ny, BENCHMARK_BOUNDS)
        exact = _exact(mesh.cell_x, mesh.cell_y)
        solution = solve_one(mesh, exact)
        hs.append(mesh.dx)
        errors.append(_l2_error(mesh, solution, exact))
    rates = [float(np.log2(errors[k - 1] / errors[k])) for k in range(1, len(errors))]
    return ConvergenceResult(kind, hs, errors, rates)


def poisson_convergence(meshes=DEFAULT_MESHES, ro: float = 1.0) -> ConvergenceResult:
    """Solve -Ro lap(psi) + y = qbar with qbar = 2 pi^2 Ro psi* + y."""
    def solve_one(mesh, exact):
        qbar = CellField(mesh, 2.0 * np.pi ** 2 * ro * exact + mesh.cell_y)
        system = assemble_poisson(mesh, ro, qbar, DirichletBC(0.0))
        return cg_solve(system.matrix, system.rhs, cfg=_TIGHT).x

    return _study("poisson", solve_one, meshes)


def filter_convergence(meshes=DEFAULT_MESHES, alpha: float = 0.25) -> ConvergenceResult:
    """Solve -alpha^2 lap(qbar) + qbar = q (indicator one) with
    q = (2 pi^2 alpha^2 + 1) qbar*."""
    def solve_one(mesh, exact):
        q = CellField(mesh, (2.0 * np.pi ** 2 * alpha ** 2 + 1.0) * exact)
        a_face = np.ones(mesh.n_faces)
        system = assemble_helmholtz_filter(mesh, a_face, alpha, q, DirichletBC(0.0))
        return cg_solve(system.matrix, system.rhs, cfg=_TIGHT).x

    return _study("filter", solve_one, meshes)
