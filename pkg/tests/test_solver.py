"""Time integration: initial state, fixed point, model reductions,
determinism, and failure modes."""

import numpy as np
import pytest

import qgfv
from qgfv import (CellField, ModelKind, PhysicalParams, Simulation,
                  SimulationConfig, SimulationError, TimeParams, benchmark_case,
                  kinetic_energy, munk_scale)
from qgfv.solver import State


def small_config(model="qge", **overrides):
    kwargs = dict(model=model, ro=0.0036, re=450.0, nx=8, ny=16, dt=2.5e-5,
                  t_end=1.0, avg_start=0.5, alpha=1 / 8)
    kwargs.update(overrides)
    return SimulationConfig(**kwargs)


def test_munk_scale_paper_values():
    assert munk_scale(PhysicalParams(0.0036, 450.0)) == pytest.approx(0.02, abs=1e-15)
    assert munk_scale(PhysicalParams(0.008, 1000.0)) == pytest.approx(0.02, abs=1e-15)
    assert munk_scale(PhysicalParams(3.7, 3.7, length=2.5)) == pytest.approx(2.5, abs=1e-14)


def test_physical_params_validation():
    with pytest.raises(ValueError):
        PhysicalParams(0.0, 450.0)
    with pytest.raises(ValueError):
        PhysicalParams(0.0036, -1.0)


def test_time_params():
    tp = TimeParams(dt=2.5e-5, t0=0.0, t_end=1.0, avg_start=0.5)
    assert tp.n_steps == 40000
    assert tp.time_at(40000) == pytest.approx(1.0)
    # nearest-integer step count stays within half a step of the interval
    tp = TimeParams(dt=0.3, t0=0.0, t_end=1.0, avg_start=0.5)
    assert tp.n_steps == 3
    assert abs(tp.n_steps * tp.dt - 1.0) <= 0.5 * tp.dt
    with pytest.raises(ValueError):
        TimeParams(dt=0.1, t0=0.0, t_end=1.0, avg_start=1.5)
    with pytest.raises(ValueError):
        TimeParams(dt=-0.1, t0=0.0, t_end=1.0, avg_start=0.5)


def test_initial_state_is_rest():
    sim = Simulation(small_config(), forcing=None)
    s = sim.initial_state()
    assert np.all(s.q.values == sim.mesh.cell_y)
    assert np.all(s.q_bar.values == s.q.values)
    assert np.abs(s.psi.values).max() <= 1e-12
    assert kinetic_energy(s.psi) <= 1e-24
    assert s.n == 0 and s.t == 0.0


@pytest.mark.parametrize("model", ["qge", "bv_alpha", "bv_nl_alpha"])
def test_rest_state_is_fixed_point(model):
    sim = Simulation(small_config(model), forcing=None)
    s = sim.initial_state()
    for _ in range(50):
        s = sim.step(s)
        assert np.abs(s.q.values - sim.mesh.cell_y).max() <= 1e-7
        assert kinetic_energy(s.psi) <= 1e-14
    assert s.n == 50
    assert s.t == pytest.approx(50 * 2.5e-5)


def test_qge_keeps_qbar_equal_to_q():
    sim = Simulation(small_config("qge"))
    s = sim.initial_state()
    for _ in range(10):
        s = sim.step(s)
    assert np.all(s.q_bar.values == s.q.values)


def test_bv_alpha_indicator_is_one():
    sim = Simulation(small_config("bv_alpha"))
    s = sim.initial_state()
    s = sim.step(s)
    assert np.all(s.a.values == 1.0)


def test_indicator_stays_in_unit_interval_during_run():
    sim = Simulation(small_config("bv_nl_alpha"))
    s = sim.initial_state()
    for _ in range(30):
        s = sim.step(s)
        assert s.a.values.min() >= 0.0
        assert s.a.values.max() <= 1.0 + 1e-15


def test_alpha_zero_filter_reduces_to_qge():
    cfg_bv = small_config("bv_alpha", alpha=0.0)
    cfg_qge = small_config("qge")
    sim_bv, sim_qge = Simulation(cfg_bv), Simulation(cfg_qge)
    s_bv, s_qge = sim_bv.initial_state(), sim_qge.initial_state()
    for _ in range(30):
        s_bv, s_qge = sim_bv.step(s_bv), sim_qge.step(s_qge)
        assert np.abs(s_bv.q.values - s_qge.q.values).max() <= 1e-10
        assert np.abs(s_bv.psi.values - s_qge.psi.values).max() <= 1e-10


def test_forced_indicator_one_reduces_to_linear_model():
    ones = lambda q: CellField.constant(q.mesh, 1.0)
    sim_nl = Simulation(small_config("bv_nl_alpha"), indicator=ones)
    sim_bv = Simulation(small_config("bv_alpha"))
    s_nl, s_bv = sim_nl.initial_state(), sim_bv.initial_state()
    for _ in range(30):
        s_nl, s_bv = sim_nl.step(s_nl), sim_bv.step(s_bv)
        assert np.abs(s_nl.q.values - s_bv.q.values).max() <= 1e-10
        assert np.abs(s_nl.psi.values - s_bv.psi.values).max() <= 1e-10


def test_run_records_energy_and_means():
    cfg = small_config("bv_nl_alpha", dt=1e-3, t_end=0.1, avg_start=0.05,
                       energy_cadence=10)
    result = qgfv.run(cfg)
    rec = result.record
    assert result.final_state.n == 100
    # samples at n = 0, 10, ..., 100
    assert len(rec.energy_times) == 11
    assert all(t2 > t1 for t1, t2 in zip(rec.energy_times, rec.energy_times[1:]))
    # window [0.05, 0.1] covers steps 50..100 inclusive
    assert rec.n_samples == 51
    assert rec.mean_a.values.max() <= 1.0 + 1e-15
    assert result.solver_stats["poisson"]["solves"] >= 100


def test_run_is_deterministic():
    cfg = small_config("bv_nl_alpha", dt=1e-3, t_end=0.05, avg_start=0.02)
    r1 = qgfv.run(cfg)
    r2 = qgfv.run(cfg)
    assert r1.record.energy_values == r2.record.energy_values
    assert np.all(r1.final_state.q.values == r2.final_state.q.values)
    assert np.all(r1.final_state.psi.values == r2.final_state.psi.values)


def test_zero_forcing_run_preserves_rest_state():
    cfg = small_config("qge", dt=1e-3, t_end=0.2, avg_start=0.1)
    result = qgfv.run(cfg, forcing=None)
    dev = np.abs(result.final_state.q.values - result.record.mesh.cell_y).max()
    assert dev <= 10 * cfg.rel_tol
    assert max(result.record.energy_values) <= 1e-14


def test_divergence_sentinel_aborts():
    cfg = small_config("qge", dt=1e-3, t_end=0.1, avg_start=0.05)
    bomb = lambda x, y, t: np.full_like(x, 1e12)
    sim = Simulation(cfg, forcing=bomb)
    with pytest.raises(SimulationError, match="diverged"):
        s = sim.initial_state()
        sim.step(s)


def test_nonfinite_forcing_aborts():
    cfg = small_config("qge", dt=1e-3, t_end=0.1, avg_start=0.05)
    bad = lambda x, y, t: np.full_like(x, np.nan)
    sim = Simulation(cfg, forcing=bad)
    s = sim.initial_state()
    with pytest.raises(SimulationError):
        sim.step(s)


def test_step_accepts_external_state():
    # stepping a hand-built state must work without run() bookkeeping
    cfg = small_config("bv_nl_alpha", dt=0.01)
    sim = Simulation(cfg)
    m = sim.mesh
    rng = np.random.default_rng(4)
    q = CellField(m, m.cell_y + 0.01 * rng.standard_normal(m.n_cells), sim.bc_q)
    psi = CellField(m, 0.01 * rng.standard_normal(m.n_cells), sim.bc_psi)
    state = State(q=q, q_bar=q.copy(), psi=psi,
                  a=CellField.constant(m, 1.0), n=0, t=0.0)
    out = sim.step(state)
    assert out.n == 1
    assert np.isfinite(out.q.values).all()


def test_dns_scale_setup_is_supported():
    # the reference-resolution configuration must construct and step,
    # even though no test runs it to completion
    cfg = benchmark_case(1, "bv_nl_alpha", nx=256, ny=512, t_end=100.0)
    sim = Simulation(cfg)
    assert sim.mesh.n_cells == 131072
    assert cfg.resolved_alpha() == pytest.approx(1 / 256)
    state = sim.initial_state()
    state = sim.step(state)
    assert state.n == 1
    assert np.isfinite(state.psi.values).all()


def test_benchmark_case_presets():
    c1 = benchmark_case(1, "qge", nx=4, ny=8, t_end=1.0, avg_start=0.5)
    assert (c1.ro, c1.re) == (0.0036, 450.0)
    assert c1.resolved_alpha() == pytest.approx(0.25)
    c2 = benchmark_case(2, ModelKind.BV_NL_ALPHA)
    assert (c2.ro, c2.re) == (0.008, 1000.0)
    assert c2.avg_start == 20.0 and c2.t_end == 100.0
    assert c2.resolved_alpha() == pytest.approx(1 / 16)
    with pytest.raises(ValueError):
        benchmark_case(3, "qge")
