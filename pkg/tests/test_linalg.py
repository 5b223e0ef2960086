"""Sparse container and the CG / BiCGStab solvers."""

import numpy as np
import pytest

from qgfv import (BreakdownError, DirichletBC, NonConvergenceError, SolverConfig,
                  SparseMatrix, bicgstab_solve, build_mesh, cg_solve,
                  jacobi_preconditioner)
from qgfv.assembly import PoissonAssembler


def dense_to_sparse(a):
    a = np.asarray(a, dtype=float)
    rows, cols = np.nonzero(a)
    return SparseMatrix.from_coo(a.shape[0], rows, cols, a[rows, cols])


def test_csr_layout_is_canonical():
    a = SparseMatrix.from_coo(3, [2, 0, 2, 1, 2], [0, 0, 2, 1, 0], [1.0, 4.0, 5.0, 2.0, 2.0])
    assert a.n == 3
    for r in range(3):
        row_cols = a.indices[a.indptr[r]:a.indptr[r + 1]]
        assert np.all(np.diff(row_cols) > 0)
    # duplicates summed: entry (2, 0) was given twice
    assert a.to_dense()[2, 0] == 3.0


def test_matvec_matches_dense():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((7, 7)) * (rng.random((7, 7)) < 0.6)
    A = dense_to_sparse(a)
    x = rng.standard_normal(7)
    assert np.allclose(A @ x, a @ x, atol=1e-14)
    assert np.allclose(A.diagonal(), np.diag(a), atol=0)


def test_cg_identity_converges_immediately():
    A = dense_to_sparse(np.eye(4))
    b = np.array([1.0, -2.0, 3.0, 0.5])
    res = cg_solve(A, b)
    assert res.iterations <= 1
    assert np.allclose(res.x, b, atol=1e-12)


def test_cg_diagonal_example():
    A = dense_to_sparse(np.diag([2.0, 4.0]))
    res = cg_solve(A, np.array([2.0, 8.0]))
    assert np.allclose(res.x, [1.0, 2.0], atol=1e-12)


def test_cg_two_by_two_example():
    A = dense_to_sparse([[4.0, 1.0], [1.0, 3.0]])
    res = cg_solve(A, np.array([1.0, 2.0]), cfg=SolverConfig(rel_tol=1e-14))
    assert np.allclose(res.x, [1.0 / 11.0, 7.0 / 11.0], atol=1e-12)


def test_cg_zero_initial_residual_returns_x0():
    A = dense_to_sparse([[2.0, 0.0], [0.0, 5.0]])
    x0 = np.array([3.0, -1.0])
    res = cg_solve(A, A @ x0, x0=x0)
    assert res.iterations == 0
    assert np.all(res.x == x0)


def test_cg_residual_contract_random_spd():
    rng = np.random.default_rng(12)
    for _ in range(10):
        b_mat = rng.standard_normal((20, 20))
        a = b_mat.T @ b_mat + 20 * np.eye(20)
        A = dense_to_sparse(a)
        b = rng.standard_normal(20)
        cfg = SolverConfig(rel_tol=1e-10, abs_tol=1e-13)
        res = cg_solve(A, b, cfg=cfg)
        checked = np.linalg.norm(b - a @ res.x)
        assert checked <= max(cfg.rel_tol * np.linalg.norm(b), cfg.abs_tol) * (1 + 1e-8)


def test_cg_nonconvergence_carries_residual():
    a = np.diag(np.linspace(1.0, 1e6, 30))
    A = dense_to_sparse(a)
    b = np.ones(30)
    with pytest.raises(NonConvergenceError) as exc:
        cg_solve(A, b, cfg=SolverConfig(rel_tol=1e-15, abs_tol=1e-300, max_iter=2))
    assert exc.value.iterations == 2
    assert exc.value.residual > 0


def test_cg_spd_check_rejects_asymmetric():
    A = dense_to_sparse([[2.0, 1.0], [0.0, 2.0]])
    with pytest.raises(ValueError):
        cg_solve(A, np.array([1.0, 1.0]), check_spd=True)


def test_cg_determinism():
    rng = np.random.default_rng(2)
    b_mat = rng.standard_normal((40, 40))
    a = b_mat.T @ b_mat + 40 * np.eye(40)
    A = dense_to_sparse(a)
    b = rng.standard_normal(40)
    r1 = cg_solve(A, b)
    r2 = cg_solve(A, b)
    assert r1.iterations == r2.iterations
    assert np.all(r1.x == r2.x)


def test_bicgstab_identity():
    A = dense_to_sparse(np.eye(3))
    b = np.array([1.0, 2.0, 3.0])
    res = bicgstab_solve(A, b)
    assert np.allclose(res.x, b, atol=1e-12)


def back_substitution(u, b):
    n = b.size
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - u[i, i + 1:] @ x[i + 1:]) / u[i, i]
    return x


def test_bicgstab_triangular_matches_back_substitution():
    u = np.array([[3.0, 1.0, -1.0],
                  [0.0, 2.0, 0.5],
                  [0.0, 0.0, 4.0]])
    b = np.array([1.0, -2.0, 8.0])
    res = bicgstab_solve(dense_to_sparse(u), b, cfg=SolverConfig(rel_tol=1e-13))
    assert np.allclose(res.x, back_substitution(u, b), atol=1e-10)


def test_bicgstab_agrees_with_cg_on_symmetric_transport():
    # with zero fluxes the transport system is symmetric (mass + diffusion)
    from qgfv.assembly import TransportAssembler
    from qgfv.fields import FaceFluxes, planetary_bc

    mesh = build_mesh(2, 2, (0, 1, -1, 1))
    asm = TransportAssembler(mesh, re=100.0, dt=0.5, bc_q=planetary_bc())
    system = asm.assemble(FaceFluxes(mesh, np.zeros(mesh.n_faces)),
                          np.array([1.0, -1.0, 2.0, 0.5]))
    assert system.matrix.max_asymmetry() == 0.0
    cfg = SolverConfig(rel_tol=1e-13)
    x_cg = cg_solve(system.matrix, system.rhs, cfg=cfg).x
    x_bi = bicgstab_solve(system.matrix, system.rhs, cfg=cfg).x
    assert np.abs(x_cg - x_bi).max() < 1e-10


def test_bicgstab_breakdown_is_distinct():
    # r_hat . v vanishes on the first iteration for this system
    A = dense_to_sparse([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(BreakdownError):
        bicgstab_solve(A, np.array([1.0, 0.0]))


def test_jacobi_preconditioner_scales():
    A = dense_to_sparse(np.diag([2.0, 4.0]))
    M = jacobi_preconditioner(A)
    assert np.allclose(M(np.array([2.0, 8.0])), [1.0, 2.0])
    ident = jacobi_preconditioner(dense_to_sparse(np.eye(3)))
    v = np.array([1.0, 2.0, 3.0])
    assert np.all(ident(v) == v)


def test_jacobi_rejects_zero_diagonal():
    A = dense_to_sparse([[0.0, 1.0], [1.0, 1.0]])
    with pytest.raises(ValueError):
        jacobi_preconditioner(A)


def test_jacobi_cg_no_slower_on_poisson():
    mesh = build_mesh(16, 32, (0, 1, -1, 1))
    asm = PoissonAssembler(mesh, ro=0.0036, bc_psi=DirichletBC(0.0))
    rng = np.random.default_rng(31)
    qbar = mesh.cell_y + rng.standard_normal(mesh.n_cells)
    system = asm.assemble(qbar)
    cfg = SolverConfig(rel_tol=1e-10)
    plain = cg_solve(system.matrix, system.rhs, cfg=cfg)
    precond = cg_solve(system.matrix, system.rhs, cfg=cfg,
                       M=jacobi_preconditioner(system.matrix))
    assert precond.iterations <= plain.iterations


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(abs_tol=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iter=0)
    assert SolverConfig().resolve_max_iter(100) == 1000
