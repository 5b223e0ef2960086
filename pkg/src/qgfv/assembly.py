"""Assembly of the three discrete systems solved each time step: implicit
vorticity transport, the Helmholtz-type differential filter, and the
stream-function Poisson equation.

All three operators share the same five-point sparsity pattern on a given
mesh, so each assembler precomputes that pattern once and expresses the
flux/indicator dependence as an affine update of the CSR value array.
Dirichlet boundary conditions are folded into the matrix and right-hand
side using the half-cell two-point gradient at boundary faces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fields import CellField, DirichletBC, FaceFluxes
from .linalg import SparseMatrix
from .mesh import StructuredMesh


@dataclass
class DiscreteSystem:
    """One assembled linear system; unknown is 'q', 'qbar', or 'psi'."""

    matrix: SparseMatrix
    rhs: np.ndarray
    unknown: str


class _FivePointPattern:
    """Shared CSR pattern (diagonal plus interior-face couplings) and the
    per-face geometric diffusion weight |A_f| / (delta_f * |cell|)."""

    def __init__(self, mesh: StructuredMesh):
        n = mesh.n_cells
        interior = mesh.interior_faces
        own_i = mesh.face_owner[interior]
        nbr_i = mesh.face_neighbor[interior]

        rows = np.concatenate([np.arange(n), own_i, nbr_i])
        cols = np.concatenate([np.arange(n), nbr_i, own_i])
        m = sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n)).tocsr()
        m.sum_duplicates()
        m.sort_indices()
        self.n = n
        self.indptr = np.ascontiguousarray(m.indptr, dtype=np.int32)
        self.indices = np.ascontiguousarray(m.indices, dtype=np.int32)
        self.nnz = m.nnz

        # Canonical CSR order is lexicographic in (row, col), so entry
        # positions are found by one sorted lookup over row*n + col keys.
        row_of_entry = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.indptr))
        self._keys = row_of_entry * n + self.indices

        self.mesh = mesh
        self.interior = interior
        self.own_i = own_i
        self.nbr_i = nbr_i
        self.boundary = mesh.boundary_faces
        self.own_b = mesh.face_owner[self.boundary]

        area_mag = np.abs(mesh.face_area).sum(axis=1)
        self.face_weight = area_mag / (mesh.face_delta * mesh.cell_volume)

        self.idx_diag = self.entry_index(np.arange(n), np.arange(n))
        self.idx_oo = self.entry_index(own_i, own_i)
        self.idx_on = self.entry_index(own_i, nbr_i)
        self.idx_no = self.entry_index(nbr_i, own_i)
        self.idx_nn = self.entry_index(nbr_i, nbr_i)
        self.idx_bb = self.entry_index(self.own_b, self.own_b)

    def entry_index(self, rows, cols) -> np.ndarray:
        keys = np.asarray(rows, dtype=np.int64) * self.n + np.asarray(cols, dtype=np.int64)
        pos = np.minimum(np.searchsorted(self._keys, keys), self._keys.size - 1)
        if np.any(self._keys[pos] != keys):
            raise KeyError("entry outside the five-point pattern")
        return pos

    def bc_face_values(self, bc: DirichletBC) -> np.ndarray:
        c = self.mesh.face_centroid[self.boundary]
        return bc.evaluate(c[:, 0], c[:, 1])

    def matrix_from_data(self, data: np.ndarray) -> SparseMatrix:
        # Pattern arrays are canonical CSR by construction; skip revalidation.
        return SparseMatrix._from_canonical(self.n, self.indptr, self.indices, data)

    def stencil_data(self, face_coeff: np.ndarray) -> np.ndarray:
        """CSR values of sum_f c_f * (two-point difference stencil), i.e.
        the negative divergence of c_f-weighted face gradients."""
        data = np.zeros(self.nnz)
        c = face_coeff[self.interior]
        np.add.at(data, self.idx_oo, c)
        np.add.at(data, self.idx_nn, c)
        np.add.at(data, self.idx_on, -c)
        np.add.at(data, self.idx_no, -c)
        np.add.at(data, self.idx_bb, face_coeff[self.boundary])
        return data

    def stencil_map(self, face_coeff: np.ndarray) -> sp.csr_matrix:
        """Sparse map from per-face scalars to CSR values, such that
        stencil_data(face_coeff * s) == stencil_map(face_coeff) @ s."""
        c = face_coeff[self.interior]
        rows = np.concatenate([self.idx_oo, self.idx_nn, self.idx_on, self.idx_no,
                               self.idx_bb])
        cols = np.concatenate([self.interior] * 4 + [self.boundary])
        vals = np.concatenate([c, c, -c, -c, face_coeff[self.boundary]])
        return sp.coo_matrix((vals, (rows, cols)),
                             shape=(self.nnz, self.mesh.n_faces)).tocsr()

    def boundary_rhs(self, face_coeff_b: np.ndarray, g_b: np.ndarray) -> np.ndarray:
        """Right-hand-side contribution of Dirichlet data at boundary faces."""
        return np.bincount(self.own_b, weights=face_coeff_b * g_b, minlength=self.n)


class TransportAssembler:
    """Implicit operator of the vorticity transport step: mass / dt plus
    central convective coupling from the face fluxes plus 1/Re diffusion."""

    def __init__(self, mesh: StructuredMesh, re: float, dt: float, bc_q: DirichletBC):
        if re <= 0:
            raise ValueError(f"Reynolds number must be positive, got {re}")
        if dt <= 0:
            raise ValueError(f"time step must be positive, got {dt}")
        self.mesh = mesh
        self.re = re
        self.dt = dt
        pat = self._pattern = _FivePointPattern(mesh)

        self._base = pat.stencil_data(pat.face_weight / re)
        self._base[pat.idx_diag] += 1.0 / dt
        g_b = pat.bc_face_values(bc_q)
        self._rhs_const = pat.boundary_rhs(pat.face_weight[pat.boundary] / re, g_b)

        # Convective matrix entries are linear in the face fluxes: a face
        # value (central mean) splits evenly between the two cell columns.
        h = 0.5 / mesh.cell_volume
        rows = np.concatenate([pat.idx_oo, pat.idx_on, pat.idx_no, pat.idx_nn])
        cols = np.tile(pat.interior, 4)
        vals = np.concatenate([np.full(pat.interior.size, s * h) for s in (1, 1, -1, -1)])
        self._conv_map = sp.coo_matrix((vals, (rows, cols)),
                                       shape=(pat.nnz, mesh.n_faces)).tocsr()
        # Boundary faces carry the Dirichlet value; the outflow term moves
        # to the right-hand side.
        self._conv_rhs_map = sp.coo_matrix(
            (-g_b / mesh.cell_volume, (pat.own_b, pat.boundary)),
            shape=(mesh.n_cells, mesh.n_faces)).tocsr()

    def assemble(self, fluxes: FaceFluxes, b_values: np.ndarray) -> DiscreteSystem:
        if fluxes.mesh is not self.mesh:
            raise ValueError("fluxes were built on a different mesh")
        data = self._base + self._conv_map @ fluxes.values
        rhs = b_values + self._rhs_const + self._conv_rhs_map @ fluxes.values
        return DiscreteSystem(self._pattern.matrix_from_data(data), rhs, "q")


class HelmholtzFilterAssembler:
    """Operator of the differential filter: identity plus alpha^2 times the
    indicator-weighted diffusion stencil. Symmetric positive definite."""

    def __init__(self, mesh: StructuredMesh, alpha: float, bc_qbar: DirichletBC):
        if alpha < 0:
            raise ValueError(f"filtering radius must be >= 0, got {alpha}")
        self.mesh = mesh
        self.alpha = alpha
        pat = self._pattern = _FivePointPattern(mesh)

        self._base = np.zeros(pat.nnz)
        self._base[pat.idx_diag] = 1.0
        coeff = alpha * alpha * pat.face_weight
        self._a_map = pat.stencil_map(coeff)
        g_b = pat.bc_face_values(bc_qbar)
        self._rhs_map = sp.coo_matrix(
            (coeff[pat.boundary] * g_b, (pat.own_b, pat.boundary)),
            shape=(mesh.n_cells, mesh.n_faces)).tocsr()

    def assemble(self, a_face: np.ndarray, q_values: np.ndarray) -> DiscreteSystem:
        a_face = np.asarray(a_face, dtype=float)
        if a_face.shape != (self.mesh.n_faces,):
            raise ValueError(f"expected {self.mesh.n_faces} face values, "
                             f"got shape {a_face.shape}")
        if np.any(a_face < 0.0):
            raise ValueError("indicator face values must be nonnegative")
        data = self._base + self._a_map @ a_face
        rhs = q_values + self._rhs_map @ a_face
        return DiscreteSystem(self._pattern.matrix_from_data(data), rhs, "qbar")


class PoissonAssembler:
    """Stream-function Poisson operator -Ro * Laplacian with Dirichlet
    boundary data; constant per mesh, assembled once."""

    def __init__(self, mesh: StructuredMesh, ro: float, bc_psi: DirichletBC):
        if ro <= 0:
            raise ValueError(f"Rossby number must be positive, got {ro}")
        self.mesh = mesh
        self.ro = ro
        pat = self._pattern = _FivePointPattern(mesh)
        self.matrix = pat.matrix_from_data(pat.stencil_data(ro * pat.face_weight))
        g_b = pat.bc_face_values(bc_psi)
        self._rhs_const = pat.boundary_rhs(ro * pat.face_weight[pat.boundary], g_b)

    def assemble(self, qbar_values: np.ndarray) -> DiscreteSystem:
        rhs = qbar_values - self.mesh.cell_y + self._rhs_const
        return DiscreteSystem(self.matrix, rhs, "psi")


def assemble_transport(mesh: StructuredMesh, fluxes: FaceFluxes, re: float,
                       dt: float, bc_q: DirichletBC, b_field: CellField) -> DiscreteSystem:
    """One-shot transport assembly; see TransportAssembler for reuse."""
    return TransportAssembler(mesh, re, dt, bc_q).assemble(fluxes, b_field.values)


def assemble_helmholtz_filter(mesh: StructuredMesh, a_face: np.ndarray, alpha: float,
                              q_source: CellField, bc_qbar: DirichletBC) -> DiscreteSystem:
    """One-shot filter assembly; see HelmholtzFilterAssembler for reuse."""
    return HelmholtzFilterAssembler(mesh, alpha, bc_qbar).assemble(a_face, q_source.values)


def assemble_poisson(mesh: StructuredMesh, ro: float, qbar_source: CellField,
                     bc_psi: DirichletBC) -> DiscreteSystem:
    """One-shot Poisson assembly; see PoissonAssembler for reuse."""
    return PoissonAssembler(mesh, ro, bc_psi).assemble(qbar_source.values)
