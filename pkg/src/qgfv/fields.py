"""Cell-centered scalar fields and Dirichlet boundary data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import StructuredMesh


class DirichletBC:
    """Dirichlet boundary data g(x, y), evaluated at boundary-face centroids.

    g may be a constant or a vectorized callable of (x, y) arrays.
    """

    def __init__(self, g):
        self.g = g

    def evaluate(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if callable(self.g):
            return np.broadcast_to(np.asarray(self.g(x, y), dtype=float), x.shape).copy()
        return np.full(x.shape, float(self.g))


def planetary_bc() -> DirichletBC:
    """Boundary data g(x, y) = y, used for q and the filtered vorticity."""
    return DirichletBC(lambda x, y: y)


class CellField:
    """One scalar per cell plus optional Dirichlet boundary data.

    Values must stay finite; non-finite input is rejected outright.
    """

    def __init__(self, mesh: StructuredMesh, values, bc: DirichletBC | None = None):
        values = np.ascontiguousarray(values, dtype=float)
        if values.shape != (mesh.n_cells,):
            raise ValueError(f"expected {mesh.n_cells} values, got shape {values.shape}")
        if not np.isfinite(values).all():
            raise ValueError("field contains non-finite values")
        self.mesh = mesh
        self.values = values
        self.bc = bc

    @classmethod
    def from_function(cls, mesh: StructuredMesh, fn, bc: DirichletBC | None = None) -> "CellField":
        return cls(mesh, fn(mesh.cell_x, mesh.cell_y), bc)

    @classmethod
    def constant(cls, mesh: StructuredMesh, value: float, bc: DirichletBC | None = None) -> "CellField":
        return cls(mesh, np.full(mesh.n_cells, float(value)), bc)

    def copy(self) -> "CellField":
        return CellField(self.mesh, self.values.copy(), self.bc)

    def require_bc(self) -> DirichletBC:
        if self.bc is None:
            raise ValueError("operation requires a field with boundary conditions")
        return self.bc


@dataclass
class FaceFluxes:
    """Signed volumetric flux per face, positive in the owner-to-neighbor
    direction (outward at the boundary)."""

    mesh: StructuredMesh
    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.n_faces,):
            raise ValueError(f"expected {self.mesh.n_faces} face values, "
                             f"got shape {self.values.shape}")
