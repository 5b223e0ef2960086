"""Uniform structured rectangular meshes and their face connectivity.

Cells are numbered row by row from the bottom-left corner: cell (i, j)
has linear index ``j * nx + i``. Faces are stored as flat arrays (owner,
neighbor, area vector, centroid, endpoints) with all x-normal faces
first, then all y-normal faces; this ordering is fixed so that runs are
bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Neighbor marker for boundary faces.
BOUNDARY = -1


@dataclass(frozen=True)
class Face:
    """Single face view, for inspection and tests.

    The area vector points from owner to neighbor (outward at the
    boundary) and has magnitude equal to the face length (unit depth).
    """

    index: int
    owner: int
    neighbor: int
    area: tuple[float, float]
    centroid: tuple[float, float]
    v1: tuple[float, float]
    v2: tuple[float, float]

    @property
    def is_boundary(self) -> bool:
        return self.neighbor == BOUNDARY


class StructuredMesh:
    """Uniform cell-centered grid on a rectangle.

    Immutable after construction; safe to share between threads.
    """

    def __init__(self, nx: int, ny: int,
                 bounds: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0)):
        nx, ny = int(nx), int(ny)
        x_min, x_max, y_min, y_max = (float(b) for b in bounds)
        if nx < 1 or ny < 1:
            raise ValueError(f"cell counts must be >= 1, got nx={nx}, ny={ny}")
        if x_max <= x_min or y_max <= y_min:
            raise ValueError(f"degenerate bounds {bounds}")

        self.nx, self.ny = nx, ny
        self.x_min, self.x_max = x_min, x_max
        self.y_min, self.y_max = y_min, y_max
        self.dx = (x_max - x_min) / nx
        self.dy = (y_max - y_min) / ny
        self.n_cells = nx * ny
        self.cell_volume = self.dx * self.dy  # per unit depth

        # Cell centroid coordinate lines and flattened per-cell arrays.
        self.xs = x_min + (np.arange(nx) + 0.5) * self.dx
        self.ys = y_min + (np.arange(ny) + 0.5) * self.dy
        self.cell_x = np.tile(self.xs, ny)
        self.cell_y = np.repeat(self.ys, nx)

        self._build_faces()

    def _build_faces(self):
        nx, ny, dx, dy = self.nx, self.ny, self.dx, self.dy
        x_min, y_min = self.x_min, self.y_min

        # x-normal faces: id = j*(nx+1) + i, i in [0, nx], j in [0, ny).
        jx, ix = np.divmod(np.arange((nx + 1) * ny), nx + 1)
        own_x = jx * nx + np.maximum(ix - 1, 0)
        nbr_x = np.where((ix >= 1) & (ix <= nx - 1), jx * nx + np.minimum(ix, nx - 1), BOUNDARY)
        ax = np.where(ix == 0, -dy, dy)
        cx_x = x_min + ix * dx
        cy_x = y_min + (jx + 0.5) * dy
        delta_x = np.where(nbr_x == BOUNDARY, 0.5 * dx, dx)
        v1_x = np.column_stack([cx_x, y_min + jx * dy])
        v2_x = np.column_stack([cx_x, y_min + (jx + 1) * dy])

        # y-normal faces: id = n_xfaces + j*nx + i, i in [0, nx), j in [0, ny].
        jy, iy = np.divmod(np.arange(nx * (ny + 1)), nx)
        own_y = np.maximum(jy - 1, 0) * nx + iy
        nbr_y = np.where((jy >= 1) & (jy <= ny - 1), np.minimum(jy, ny - 1) * nx + iy, BOUNDARY)
        ay = np.where(jy == 0, -dx, dx)
        cx_y = x_min + (iy + 0.5) * dx
        cy_y = y_min + jy * dy
        delta_y = np.where(nbr_y == BOUNDARY, 0.5 * dy, dy)
        v1_y = np.column_stack([x_min + iy * dx, cy_y])
        v2_y = np.column_stack([x_min + (iy + 1) * dx, cy_y])

        self.n_xfaces = (nx + 1) * ny
        self.n_yfaces = nx * (ny + 1)
        self.n_faces = self.n_xfaces + self.n_yfaces

        self.face_owner = np.concatenate([own_x, own_y])
        self.face_neighbor = np.concatenate([nbr_x, nbr_y])
        self.face_area = np.concatenate([
            np.column_stack([ax, np.zeros_like(ax)]),
            np.column_stack([np.zeros_like(ay), ay]),
        ])
        self.face_centroid = np.concatenate([
            np.column_stack([cx_x, cy_x]),
            np.column_stack([cx_y, cy_y]),
        ])
        # Center-to-center distance (center-to-face for boundary faces).
        self.face_delta = np.concatenate([delta_x, delta_y])
        self.face_v1 = np.concatenate([v1_x, v1_y])
        self.face_v2 = np.concatenate([v2_x, v2_y])

        self.interior_faces = np.flatnonzero(self.face_neighbor != BOUNDARY)
        self.boundary_faces = np.flatnonzero(self.face_neighbor == BOUNDARY)

    def cell_id(self, i: int, j: int) -> int:
        if not (0 <= i < self.nx and 0 <= j < self.ny):
            raise IndexError(f"cell ({i}, {j}) outside {self.nx}x{self.ny} mesh")
        return j * self.nx + i

    def face(self, j: int) -> Face:
        if not (0 <= j < self.n_faces):
            raise IndexError(f"face {j} outside mesh with {self.n_faces} faces")
        return Face(
            index=j,
            owner=int(self.face_owner[j]),
            neighbor=int(self.face_neighbor[j]),
            area=tuple(self.face_area[j]),
            centroid=tuple(self.face_centroid[j]),
            v1=tuple(self.face_v1[j]),
            v2=tuple(self.face_v2[j]),
        )

    def faces(self):
        for j in range(self.n_faces):
            yield self.face(j)

    def __repr__(self):
        return (f"StructuredMesh({self.nx}x{self.ny}, "
                f"[{self.x_min},{self.x_max}]x[{self.y_min},{self.y_max}])")


def build_mesh(nx: int, ny: int,
               bounds: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0)) -> StructuredMesh:
    """Build a uniform nx-by-ny mesh on the rectangle given by bounds.

    bounds is (x_min, x_max, y_min, y_max).
    """
    return StructuredMesh(nx, ny, bounds)


def cell_centroid(mesh: StructuredMesh, i: int) -> tuple[float, float]:
    """Centroid coordinates of cell with linear index i."""
    if not (0 <= i < mesh.n_cells):
        raise IndexError(f"cell {i} outside mesh with {mesh.n_cells} cells")
    return float(mesh.cell_x[i]), float(mesh.cell_y[i])
