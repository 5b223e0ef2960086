"""Segregated time integration of the filtered barotropic vorticity system.

Each step advances the state through three linear solves: (i) implicit
transport of q using the fluxes of the previous stream function, (ii) the
differential filter producing the filtered vorticity (skipped for the
unfiltered model), and (iii) the Poisson solve recovering the stream
function. Warm starts from the previous time level keep the Krylov
iteration counts low.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass

import numpy as np

from . import operators
from .assembly import HelmholtzFilterAssembler, PoissonAssembler, TransportAssembler
from .config import ModelKind, SimulationConfig
from .diagnostics import DiagnosticsRecord, kinetic_energy
from .fields import CellField, DirichletBC, planetary_bc
from .linalg import LinearSolverError, SolverConfig, bicgstab_solve, cg_solve
from .mesh import build_mesh

# A run is declared diverged once |q| exceeds this anywhere.
DIVERGENCE_LIMIT = 1e6


class SimulationError(RuntimeError):
    """Divergence, non-finite values, or a failed linear solve mid-run."""


@dataclass
class PhysicalParams:
    """Nondimensional flow parameters; length only enters the Munk scale."""

    ro: float
    re: float
    length: float = 1.0

    def __post_init__(self):
        if self.ro <= 0 or self.re <= 0 or self.length <= 0:
            raise ValueError(f"parameters must be positive, got {self}")


def munk_scale(params: PhysicalParams) -> float:
    """Western boundary layer width L * (Ro/Re)^(1/3); meshes coarser than
    this under-resolve the boundary current."""
    return params.length * float(np.cbrt(params.ro / params.re))


@dataclass
class TimeParams:
    dt: float
    t0: float
    t_end: float
    avg_start: float

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (self.t0 < self.avg_start < self.t_end):
            raise ValueError(f"need t0 < avg_start < t_end, got "
                             f"{self.t0}, {self.avg_start}, {self.t_end}")
        n = round((self.t_end - self.t0) / self.dt)
        if abs(n * self.dt - (self.t_end - self.t0)) > 0.5 * self.dt:
            raise ValueError(f"dt={self.dt} does not tile [{self.t0}, {self.t_end}]")
        self.n_steps = n

    def time_at(self, n: int) -> float:
        return self.t0 + n * self.dt


@dataclass
class State:
    """Solution snapshot after step n.

    q is the transported potential vorticity produced by the evolve step;
    q_bar is the filtered vorticity, which is the state the model carries
    forward in time and the source of the stream function. The two
    coincide for the unfiltered model. a is the indicator used in the last
    filter application (ones when no indicator is active).
    """

    q: CellField
    q_bar: CellField
    psi: CellField
    a: CellField
    n: int
    t: float


def double_gyre_forcing(x, y, t):
    """Steady wind-stress curl F = sin(pi y) of the double-gyre benchmark."""
    return np.sin(np.pi * y)


class _SolveStats:
    """Running mean/max iteration counts per linear system."""

    def __init__(self):
        self.count = 0
        self.total = 0
        self.max = 0

    def add(self, iterations: int):
        self.count += 1
        self.total += iterations
        self.max = max(self.max, iterations)

    def summary(self) -> dict:
        mean = self.total / self.count if self.count else 0.0
        return {"solves": self.count, "mean_iterations": mean, "max_iterations": self.max}


@dataclass
class RunResult:
    record: DiagnosticsRecord
    final_state: State
    solver_stats: dict
    wall_seconds: float


class Simulation:
    """One configured model on one mesh, ready to step or run.

    forcing is a callable (x, y, t) -> array evaluated at cell centroids
    (None disables it). indicator overrides the gradient-based indicator
    for the nonlinear model, e.g. to experiment with other sensors.
    """

    def __init__(self, config: SimulationConfig, forcing=double_gyre_forcing,
                 indicator=None):
        self.config = config
        self.mesh = build_mesh(config.nx, config.ny, config.bounds)
        self.time = TimeParams(config.dt, config.t0, config.t_end, config.avg_start)
        self.forcing = forcing
        self.indicator = indicator if indicator is not None else operators.indicator_function
        self.alpha = config.resolved_alpha()

        self.bc_q = planetary_bc()
        self.bc_qbar = planetary_bc()
        self.bc_psi = DirichletBC(0.0)

        self.solver_cfg = SolverConfig(rel_tol=config.rel_tol, abs_tol=config.abs_tol,
                                       max_iter=config.max_iter)
        self._transport = TransportAssembler(self.mesh, config.re, config.dt, self.bc_q)
        self._poisson = PoissonAssembler(self.mesh, config.ro, self.bc_psi)
        self._filter = None
        self._ones_face = None
        if config.model is not ModelKind.QGE:
            self._filter = HelmholtzFilterAssembler(self.mesh, self.alpha, self.bc_qbar)
            self._ones_face = np.ones(self.mesh.n_faces)

        self._stats = {"transport": _SolveStats(), "filter": _SolveStats(),
                       "poisson": _SolveStats()}
        # Previous time level, kept for second-order extrapolated warm
        # starts of the Krylov solves (falls back to the plain warm start
        # whenever the step sequence is broken).
        self._extrap = None

    def initial_state(self) -> State:
        """Rest-state initial data q = y; the stream function follows from
        one Poisson solve (identically zero for this data)."""
        mesh = self.mesh
        self._failing_step = 0
        q = CellField(mesh, mesh.cell_y.copy(), self.bc_q)
        q_bar = CellField(mesh, mesh.cell_y.copy(), self.bc_qbar)
        system = self._poisson.assemble(q_bar.values)
        res = cg_solve(system.matrix, system.rhs, x0=np.zeros(mesh.n_cells),
                       cfg=self.solver_cfg)
        self._stats["poisson"].add(res.iterations)
        psi = CellField(mesh, res.x, self.bc_psi)
        a = CellField.constant(mesh, 1.0)
        return State(q=q, q_bar=q_bar, psi=psi, a=a, n=0, t=self.time.t0)

    def _solve(self, kind: str, solve_fn, system, x0):
        try:
            res = solve_fn(system.matrix, system.rhs, x0=x0, cfg=self.solver_cfg)
        except LinearSolverError as err:
            raise SimulationError(
                f"{kind} solve failed at step {self._failing_step}: {err} "
                f"(residual {err.residual:.3e})") from err
        self._stats[kind].add(res.iterations)
        if not np.isfinite(res.x).all():
            raise SimulationError(f"{kind} solution became non-finite at step "
                                  f"{self._failing_step}")
        return res.x

    def _guess(self, state: State, key: str) -> np.ndarray:
        current = getattr(state, "q_bar" if key == "qbar" else key).values
        prev = self._extrap
        if prev is None or prev["n"] != state.n:
            return current
        return 2.0 * current - prev[key]

    def step(self, state: State) -> State:
        mesh = self.mesh
        n_new = state.n + 1
        t_new = self.time.time_at(n_new)
        self._failing_step = n_new

        # (i) transport with fluxes lagged to the previous stream function.
        # The BDF1 history is the model's carried vorticity, i.e. the
        # filtered field (evolve-filter coupling); q and q_bar coincide for
        # the unfiltered model.
        fluxes = operators.streamfunction_fluxes(state.psi)
        b = state.q_bar.values / self.time.dt
        if self.forcing is not None:
            b = b + self.forcing(mesh.cell_x, mesh.cell_y, t_new)
        system = self._transport.assemble(fluxes, b)
        q_new = self._solve("transport", bicgstab_solve, system,
                            self._guess(state, "q"))
        if np.abs(q_new).max() > DIVERGENCE_LIMIT:
            raise SimulationError(
                f"run diverged at step {n_new}: max|q| = {np.abs(q_new).max():.3e}")
        q = CellField(mesh, q_new, self.bc_q)

        # (ii) differential filter (identity for the unfiltered model)
        model = self.config.model
        if model is ModelKind.QGE:
            q_bar = CellField(mesh, q_new.copy(), self.bc_qbar)
            a = state.a
        else:
            if model is ModelKind.BV_ALPHA:
                a = CellField.constant(mesh, 1.0)
                a_face = self._ones_face
            else:
                a = self.indicator(q)
                a_face = operators.indicator_face_values(a)
            system = self._filter.assemble(a_face, q_new)
            qb = self._solve("filter", cg_solve, system,
                             self._guess(state, "qbar"))
            q_bar = CellField(mesh, qb, self.bc_qbar)

        # (iii) stream function from the filtered vorticity
        system = self._poisson.assemble(q_bar.values)
        psi_new = self._solve("poisson", cg_solve, system,
                              self._guess(state, "psi"))
        psi = CellField(mesh, psi_new, self.bc_psi)

        self._extrap = {"n": n_new, "q": state.q.values,
                        "qbar": state.q_bar.values, "psi": state.psi.values}
        return State(q=q, q_bar=q_bar, psi=psi, a=a, n=n_new, t=t_new)

    def run(self, on_step=None) -> RunResult:
        """Integrate from t0 to t_end, recording the energy series and the
        windowed means; writes files when the config names an output
        directory. on_step(state), if given, is called after every step."""
        from . import io as qgfv_io

        started = _time.perf_counter()
        cfg = self.config
        record = DiagnosticsRecord(
            self.mesh, avg_start=cfg.avg_start, t_end=cfg.t_end,
            time_tol=0.5 * cfg.dt,
            track_indicator=cfg.model is ModelKind.BV_NL_ALPHA)

        state = self.initial_state()
        record.add_energy(state.t, kinetic_energy(state.psi))
        n_steps = self.time.n_steps
        try:
            for n in range(1, n_steps + 1):
                state = self.step(state)
                record.update_means(state, state.t)
                if n % cfg.energy_cadence == 0 or n == n_steps:
                    record.add_energy(state.t, kinetic_energy(state.psi))
                if on_step is not None:
                    on_step(state)
        except SimulationError as err:
            if cfg.output_dir is not None:
                qgfv_io.write_failure_outputs(
                    cfg, record, {k: s.summary() for k, s in self._stats.items()},
                    _time.perf_counter() - started, err)
            raise

        stats = {k: s.summary() for k, s in self._stats.items()}
        result = RunResult(record=record, final_state=state, solver_stats=stats,
                           wall_seconds=_time.perf_counter() - started)
        if cfg.output_dir is not None:
            qgfv_io.write_run_outputs(result, cfg)
        return result


def run(config: SimulationConfig, forcing=double_gyre_forcing, indicator=None,
        on_step=None) -> RunResult:
    """Convenience wrapper: build a Simulation for config and run it."""
    return Simulation(config, forcing=forcing, indicator=indicator).run(on_step=on_step)
