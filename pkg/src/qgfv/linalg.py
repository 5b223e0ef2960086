"""Sparse matrices and the iterative solvers used by the time stepper.

The CSR container is plain numpy arrays; the matrix-vector product and
the Krylov loops are numba-compiled so that the hundreds of thousands of
small solves in a benchmark run are not dominated by interpreter
overhead. All reductions are sequential, which keeps results bitwise
deterministic for identical inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
import scipy.sparse as sp

_STATUS_CONVERGED = 0
_STATUS_MAX_ITER = 1
_STATUS_BREAKDOWN_PAP = 2
_STATUS_BREAKDOWN_RHO = 3
_STATUS_BREAKDOWN_OMEGA = 4

_BREAKDOWN_MESSAGES = {
    _STATUS_BREAKDOWN_PAP: "p^T A p <= 0 (matrix not positive definite?)",
    _STATUS_BREAKDOWN_RHO: "rho or r_hat . v vanished",
    _STATUS_BREAKDOWN_OMEGA: "||A s|| vanished with nonzero residual",
}


class LinearSolverError(RuntimeError):
    """Base class for iterative-solver failures."""

    def __init__(self, message, iterations, residual):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class NonConvergenceError(LinearSolverError):
    """Residual target not met within the iteration budget."""


class BreakdownError(LinearSolverError):
    """A recurrence denominator vanished mid-iteration."""


@numba.njit(cache=True)
def _matvec(indptr, indices, data, x):
    out = np.empty(x.size)
    for i in range(x.size):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * x[indices[k]]
        out[i] = acc
    return out


@numba.njit(cache=True)
def _diagonal(indptr, indices, data):
    n = indptr.size - 1
    out = np.zeros(n)
    for i in range(n):
        for k in range(indptr[i], indptr[i + 1]):
            if indices[k] == i:
                out[i] = data[k]
                break
    return out


@numba.njit(cache=True)
def _dot(a, b):
    acc = 0.0
    for i in range(a.size):
        acc += a[i] * b[i]
    return acc


@numba.njit(cache=True)
def _cg_kernel(indptr, indices, data, b, x, inv_diag, use_precond, tol, max_iter):
    r = b - _matvec(indptr, indices, data, x)
    res = np.sqrt(_dot(r, r))
    if res <= tol:
        return _STATUS_CONVERGED, 0, res
    if use_precond:
        z = r * inv_diag
    else:
        z = r.copy()
    p = z.copy()
    rz = _dot(r, z)
    for k in range(1, max_iter + 1):
        Ap = _matvec(indptr, indices, data, p)
        pAp = _dot(p, Ap)
        if pAp <= 0.0:
            return _STATUS_BREAKDOWN_PAP, k, res
        alpha = rz / pAp
        for i in range(x.size):
            x[i] += alpha * p[i]
            r[i] -= alpha * Ap[i]
        res2 = _dot(r, r)
        res = np.sqrt(res2)
        if res <= tol:
            return _STATUS_CONVERGED, k, res
        if use_precond:
            z = r * inv_diag
            rz_new = _dot(r, z)
        else:
            z = r
            rz_new = res2
        beta = rz_new / rz
        for i in range(x.size):
            p[i] = z[i] + beta * p[i]
        rz = rz_new
    return _STATUS_MAX_ITER, max_iter, res


@numba.njit(cache=True)
def _bicgstab_kernel(indptr, indices, data, b, x, inv_diag, use_precond, tol, max_iter):
    r = b - _matvec(indptr, indices, data, x)
    res = np.sqrt(_dot(r, r))
    if res <= tol:
        return _STATUS_CONVERGED, 0, res
    r_hat = r.copy()
    rho = 1.0
    alpha = 1.0
    omega = 1.0
    v = np.zeros_like(b)
    p = np.zeros_like(b)
    for k in range(1, max_iter + 1):
        rho_new = _dot(r_hat, r)
        if rho_new == 0.0 or omega == 0.0:
            return _STATUS_BREAKDOWN_RHO, k, res
        beta = (rho_new / rho) * (alpha / omega)
        rho = rho_new
        for i in range(x.size):
            p[i] = r[i] + beta * (p[i] - omega * v[i])
        ph = p * inv_diag if use_precond else p
        v = _matvec(indptr, indices, data, ph)
        rhv = _dot(r_hat, v)
        if rhv == 0.0:
            return _STATUS_BREAKDOWN_RHO, k, res
        alpha = rho / rhv
        s = r - alpha * v
        for i in range(x.size):
            x[i] += alpha * ph[i]
        res = np.sqrt(_dot(s, s))
        if res <= tol:
            return _STATUS_CONVERGED, k, res
        sh = s * inv_diag if use_precond else s
        t = _matvec(indptr, indices, data, sh)
        tt = _dot(t, t)
        if tt == 0.0:
            return _STATUS_BREAKDOWN_OMEGA, k, res
        omega = _dot(t, s) / tt
        for i in range(x.size):
            x[i] += omega * sh[i]
        r = s - omega * t
        res = np.sqrt(_dot(r, r))
        if res <= tol:
            return _STATUS_CONVERGED, k, res
    return _STATUS_MAX_ITER, max_iter, res


class SparseMatrix:
    """Square CSR matrix. Column indices are sorted within each row and
    duplicate entries have been summed."""

    __slots__ = ("n", "indptr", "indices", "data")

    def __init__(self, n, indptr, indices, data):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int32)
        self.indices = np.ascontiguousarray(indices, dtype=np.int32)
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        if self.indptr.size != self.n + 1 or self.indptr[-1] != self.indices.size \
                or self.indices.size != self.data.size:
            raise ValueError("inconsistent CSR arrays")

    @classmethod
    def from_scipy(cls, m) -> "SparseMatrix":
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"expected square matrix, got shape {m.shape}")
        m = m.tocsr()
        m.sum_duplicates()
        m.sort_indices()
        return cls(m.shape[0], m.indptr, m.indices, m.data)

    @classmethod
    def from_coo(cls, n: int, rows, cols, values) -> "SparseMatrix":
        return cls.from_scipy(sp.coo_matrix((values, (rows, cols)), shape=(n, n)))

    @classmethod
    def from_csr_arrays(cls, n: int, indptr, indices, data) -> "SparseMatrix":
        return cls.from_scipy(sp.csr_matrix((data, indices, indptr), shape=(n, n)))

    @classmethod
    def _from_canonical(cls, n, indptr, indices, data) -> "SparseMatrix":
        """Trusting constructor for assemblers whose arrays are already in
        canonical CSR form; skips the scipy round trip."""
        m = cls.__new__(cls)
        m.n = n
        m.indptr = indptr
        m.indices = indices
        m.data = data
        return m

    def dot(self, x: np.ndarray) -> np.ndarray:
        return _matvec(self.indptr, self.indices, self.data, x)

    def __matmul__(self, x):
        return self.dot(x)

    def diagonal(self) -> np.ndarray:
        return _diagonal(self.indptr, self.indices, self.data)

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.data, self.indices, self.indptr), shape=(self.n, self.n))

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def max_asymmetry(self) -> float:
        """Largest entrywise |A - A^T|; zero for symmetric operators."""
        m = self.to_scipy()
        d = m - m.T
        return 0.0 if d.nnz == 0 else float(np.abs(d.data).max())


@dataclass
class SolverConfig:
    """Stopping rule: ||b - A x|| <= max(rel_tol * ||b||, abs_tol).

    max_iter of None means 10 * n, resolved at solve time.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_iter: int | None = None

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("solver tolerances must be positive")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def resolve_max_iter(self, n: int) -> int:
        return self.max_iter if self.max_iter is not None else 10 * n


@dataclass
class SolveResult:
    x: np.ndarray
    iterations: int
    residual: float


class JacobiPreconditioner:
    """Diagonal scaling M^{-1} v = v / diag(A)."""

    def __init__(self, A: SparseMatrix):
        d = A.diagonal()
        if np.any(d == 0.0):
            raise ValueError("Jacobi preconditioner requires a nonzero diagonal")
        self.inv_diag = 1.0 / d

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return v * self.inv_diag


def jacobi_preconditioner(A: SparseMatrix) -> JacobiPreconditioner:
    return JacobiPreconditioner(A)


_NO_PRECOND = np.empty(0)


def _prepare(A, b, x0, cfg, M):
    b = np.ascontiguousarray(b, dtype=np.float64)
    if b.shape != (A.n,):
        raise ValueError(f"rhs shape {b.shape} does not match matrix size {A.n}")
    x = np.zeros(A.n) if x0 is None else np.array(x0, dtype=np.float64)
    cfg = cfg or SolverConfig()
    tol = max(cfg.rel_tol * float(np.linalg.norm(b)), cfg.abs_tol)
    if M is None:
        inv_diag, use_precond = _NO_PRECOND, False
    elif isinstance(M, JacobiPreconditioner):
        inv_diag, use_precond = M.inv_diag, True
    else:
        raise TypeError("M must be None or a JacobiPreconditioner")
    return b, x, cfg.resolve_max_iter(A.n), tol, inv_diag, use_precond


def _finish(name, status, iterations, residual, x, max_iter, tol):
    if status == _STATUS_CONVERGED:
        return SolveResult(x, iterations, residual)
    if status == _STATUS_MAX_ITER:
        raise NonConvergenceError(
            f"{name} did not converge in {max_iter} iterations "
            f"(residual {residual:.3e}, target {tol:.3e})",
            iterations=iterations, residual=residual)
    raise BreakdownError(
        f"{name} breakdown at iteration {iterations}: {_BREAKDOWN_MESSAGES[status]}",
        iterations=iterations, residual=residual)


def cg_solve(A: SparseMatrix, b, x0=None, cfg: SolverConfig | None = None,
             M: JacobiPreconditioner | None = None,
             check_spd: bool = False) -> SolveResult:
    """Conjugate gradients for symmetric positive definite systems.

    SPD-ness is the caller's responsibility; pass check_spd=True to verify
    symmetry explicitly (meant for tests, too costly inside the time loop).
    """
    if check_spd:
        asym = A.max_asymmetry()
        if asym > 1e-12 * max(1.0, float(np.abs(A.data).max())):
            raise ValueError(f"cg_solve requires a symmetric matrix (asymmetry {asym:.3e})")
    b, x, max_iter, tol, inv_diag, use_precond = _prepare(A, b, x0, cfg, M)
    status, iterations, residual = _cg_kernel(
        A.indptr, A.indices, A.data, b, x, inv_diag, use_precond, tol, max_iter)
    return _finish("CG", status, iterations, residual, x, max_iter, tol)


def bicgstab_solve(A: SparseMatrix, b, x0=None, cfg: SolverConfig | None = None,
                   M: JacobiPreconditioner | None = None) -> SolveResult:
    """Stabilized bi-conjugate gradients for nonsymmetric systems.

    Breakdown (a vanishing recurrence denominator) raises BreakdownError,
    distinct from NonConvergenceError for an exhausted iteration budget.
    """
    b, x, max_iter, tol, inv_diag, use_precond = _prepare(A, b, x0, cfg, M)
    status, iterations, residual = _bicgstab_kernel(
        A.indptr, A.indices, A.data, b, x, inv_diag, use_precond, tol, max_iter)
    return _finish("BiCGStab", status, iterations, residual, x, max_iter, tol)
