"""Run diagnostics: kinetic energy, vorticity recovery, streaming time
averages over the sampling window, and the gyre-pattern detector."""

from __future__ import annotations

import numpy as np

from .fields import CellField
from .mesh import StructuredMesh
from .operators import gauss_gradient


def kinetic_energy(psi: CellField) -> float:
    """Total kinetic energy: half the volume-weighted sum of squared
    cell-centered velocity magnitudes, with velocity = curl of psi so the
    speed equals the stream-function gradient magnitude."""
    grad = gauss_gradient(psi)
    return 0.5 * psi.mesh.cell_volume * float(np.sum(grad[:, 0] ** 2 + grad[:, 1] ** 2))


def recover_vorticity(q: CellField, ro: float) -> CellField:
    """Relative vorticity from potential vorticity: (q - y) / Ro."""
    if ro <= 0:
        raise ValueError(f"Rossby number must be positive, got {ro}")
    return CellField(q.mesh, (q.values - q.mesh.cell_y) / ro, bc=None)


class DiagnosticsRecord:
    """Kinetic-energy time series plus streaming means of psi, q (and the
    indicator when tracked) over the averaging window.

    Window membership is tested with a half-step tolerance so that the
    sample count is insensitive to floating-point drift in t.
    """

    def __init__(self, mesh: StructuredMesh, avg_start: float, t_end: float,
                 time_tol: float = 0.0, track_indicator: bool = False):
        if avg_start > t_end:
            raise ValueError(f"empty averaging window [{avg_start}, {t_end}]")
        self.mesh = mesh
        self.avg_start = avg_start
        self.t_end = t_end
        self.time_tol = time_tol
        self.track_indicator = track_indicator
        self.energy_times: list[float] = []
        self.energy_values: list[float] = []
        self.n_samples = 0
        self._sum_psi = np.zeros(mesh.n_cells)
        self._sum_q = np.zeros(mesh.n_cells)
        self._sum_a = np.zeros(mesh.n_cells) if track_indicator else None

    def add_energy(self, t: float, energy: float):
        if self.energy_times and t <= self.energy_times[-1]:
            raise ValueError(f"energy sample times must increase (got {t} after "
                             f"{self.energy_times[-1]})")
        self.energy_times.append(float(t))
        self.energy_values.append(float(energy))

    def in_window(self, t: float) -> bool:
        return (self.avg_start - self.time_tol) <= t <= (self.t_end + self.time_tol)

    def update_means(self, state, t: float):
        """Fold one snapshot into the running means if t lies in the window."""
        if not self.in_window(t):
            return
        self.n_samples += 1
        self._sum_psi += state.psi.values
        self._sum_q += state.q.values
        if self._sum_a is not None:
            self._sum_a += state.a.values

    def _mean(self, total: np.ndarray) -> CellField:
        if self.n_samples == 0:
            raise ValueError("no samples accumulated in the averaging window")
        return CellField(self.mesh, total / self.n_samples, bc=None)

    @property
    def mean_psi(self) -> CellField:
        return self._mean(self._sum_psi)

    @property
    def mean_q(self) -> CellField:
        return self._mean(self._sum_q)

    @property
    def mean_a(self) -> CellField:
        if self._sum_a is None:
            raise ValueError("indicator averaging was not enabled for this record")
        return self._mean(self._sum_a)

    def mean_energy(self, t_min: float | None = None, t_max: float | None = None) -> float:
        """Mean of the recorded energy samples, optionally restricted to
        [t_min, t_max] (defaults to the averaging window)."""
        t_min = self.avg_start if t_min is None else t_min
        t_max = self.t_end if t_max is None else t_max
        tol = self.time_tol
        vals = [e for t, e in zip(self.energy_times, self.energy_values)
                if t_min - tol <= t <= t_max + tol]
        if not vals:
            raise ValueError(f"no energy samples in [{t_min}, {t_max}]")
        return float(np.mean(vals))


def update_means(record: DiagnosticsRecord, state, t: float) -> DiagnosticsRecord:
    record.update_means(state, t)
    return record


def gyre_count(psi_mean: CellField) -> int:
    """Count sign-alternating lobes of the time-averaged stream function
    along the vertical line through the basin center.

    Values within 1% of the field's maximum magnitude are treated as zero
    so that solver-tolerance noise does not create spurious lobes; the
    count is therefore invariant under positive rescaling of the field.
    """
    mesh = psi_mean.mesh
    if mesh.ny < 2:
        raise ValueError("gyre detection needs at least 2 cells in y")
    scale = float(np.abs(psi_mean.values).max())
    if scale == 0.0:
        return 0
    x_mid = 0.5 * (mesh.x_min + mesh.x_max)
    col = int(np.argmin(np.abs(mesh.xs - x_mid)))
    column = psi_mean.values.reshape(mesh.ny, mesh.nx)[:, col]
    signs = np.sign(column[np.abs(column) > 0.01 * scale])
    if signs.size == 0:
        return 0
    return int(1 + np.count_nonzero(signs[1:] != signs[:-1]))
