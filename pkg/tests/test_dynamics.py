"""Integrator order, conservation and invariances of the evolution."""

import numpy as np
import pytest

from bogl.dynamics import (
    SimConfig,
    energy,
    momentum,
    nonlinearity,
    rescale,
    simulate,
    step,
    steady_residual,
    traveling_wave,
)
from bogl.spectral import (
    RealField,
    free_propagate,
    lebesgue_norm,
    make_grid,
    random_field,
    translate,
)


@pytest.fixture(scope="module")
def grid():
    return make_grid(256, 1.0)


def smooth_data(grid, seed=7, amplitude=1.0, max_mode=6):
    rng = np.random.default_rng(seed)
    return random_field(grid, rng, decay=2.0, amplitude=amplitude, max_mode=max_mode)


def test_nonlinearity_trig_identity(grid):
    u = RealField.from_samples(grid, np.cos(grid.x))
    out = nonlinearity(u)
    expected = -0.5 * np.sin(2 * grid.x)
    assert np.max(np.abs(out.samples - expected)) < 1e-13


def test_nonlinearity_constant_and_mean(grid):
    const = RealField.from_samples(grid, 0.7 * np.ones(grid.n))
    assert lebesgue_norm(nonlinearity(const), 2) == 0.0
    u = smooth_data(grid)
    assert abs(nonlinearity(u).mean) < 1e-15


def test_step_dt_to_zero_limit(grid):
    u = smooth_data(grid)
    moved = step(u, 1e-8)
    assert lebesgue_norm(moved - u, 2) < 1e-6


def test_step_linear_regime_matches_free_group(grid):
    u = smooth_data(grid, amplitude=1e-6)
    dt = 1e-3
    out = step(u, dt)
    lin = free_propagate(u, dt)
    # nonlinear correction is O(dt * amplitude^2)
    assert lebesgue_norm(out - lin, 2) < 50 * dt * 1e-12


def test_global_fourth_order(grid):
    u = smooth_data(grid, amplitude=0.8)
    errs = []
    sols = []
    for dt in (4e-3, 2e-3, 1e-3):
        cfg = SimConfig(grid, dt=dt, t_end=0.2, snapshot_stride=round(0.2 / dt))
        sols.append(simulate(u, cfg).states[-1])
    e1 = lebesgue_norm(sols[0] - sols[2], 2)
    e2 = lebesgue_norm(sols[1] - sols[2], 2)
    slope = np.log2(e1 / e2)
    assert 3.5 < slope < 4.6


def test_zero_and_constant_solutions(grid):
    cfg = SimConfig(grid, dt=1e-3, t_end=0.05, snapshot_stride=10)
    zero = RealField.from_samples(grid, np.zeros(grid.n))
    traj = simulate(zero, cfg)
    assert all(lebesgue_norm(u, 2) == 0.0 for u in traj.states)
    const = RealField.from_samples(grid, 0.4 * np.ones(grid.n))
    traj = simulate(const, cfg)
    for u in traj.states:
        assert np.max(np.abs(u.samples - 0.4)) < 1e-13


def test_conservation_drift(grid):
    u0 = smooth_data(grid, amplitude=1.0)
    cfg = SimConfig(grid, dt=1e-3, t_end=0.25, snapshot_stride=50)
    traj = simulate(u0, cfg)
    m = traj.momenta
    e = traj.energies
    assert np.max(np.abs(m - m[0])) / abs(m[0]) < 1e-10
    assert np.max(np.abs(e - e[0])) / abs(e[0]) < 1e-8
    # mean is transported exactly, reality preserved
    assert max(abs(u.mean.real - u0.mean.real) for u in traj.states) < 1e-13
    assert max(u.imag_residue for u in traj.states) < 1e-12


def test_time_reversibility_linear_part(grid):
    u = smooth_data(grid)
    back = free_propagate(free_propagate(u, 1e-3), -1e-3)
    assert lebesgue_norm(back - u, 2) < 1e-12


def test_momentum_energy_closed_forms(grid):
    cos = RealField.from_samples(grid, np.cos(grid.x))
    assert momentum(cos) == pytest.approx(np.pi, rel=1e-13)
    assert energy(cos) == pytest.approx(np.pi / 2, rel=1e-13)
    zero = RealField.from_samples(grid, np.zeros(grid.n))
    assert momentum(zero) == 0.0 and energy(zero) == 0.0


def test_traveling_wave_profile_and_propagation(grid):
    wave, speed = traveling_wave(grid, 0.3)
    assert steady_residual(wave, speed) < 1e-12
    cfg = SimConfig(grid, dt=1e-3, t_end=0.5, snapshot_stride=500)
    traj = simulate(wave, cfg)
    exact = translate(wave, speed * 0.5)
    assert lebesgue_norm(traj.states[-1] - exact, 2) < 1e-9


def test_rescale_norm_relation():
    g4 = make_grid(256, 4.0)
    u = random_field(g4, np.random.default_rng(3), decay=1.5, amplitude=0.5)
    for lam in (1, 2, 4):
        v = rescale(u, lam)
        assert v.grid.period_scale == pytest.approx(4.0 / lam)
        assert lebesgue_norm(v, 2) == pytest.approx(
            np.sqrt(lam) * lebesgue_norm(u, 2), rel=1e-12
        )
    same = rescale(u, 1)
    assert np.max(np.abs(same.samples - u.samples)) < 1e-15
    with pytest.raises(ValueError):
        rescale(u, 3)
    with pytest.raises(ValueError):
        rescale(u, 8)  # would need period_scale 1/2


def test_rescale_solution_correspondence():
    # u_lam(x, t) = lam u(lam x, lam^2 t): evolve both and compare on the lattice
    lam = 2
    g_base = make_grid(256, 2.0)
    u0 = random_field(g_base, np.random.default_rng(4), decay=2.0, amplitude=0.25,
                      max_mode=6)
    t_scaled = 0.25
    cfg_base = SimConfig(g_base, dt=1e-3, t_end=lam**2 * t_scaled,
                         snapshot_stride=round(lam**2 * t_scaled / 1e-3))
    base_final = simulate(u0, cfg_base).states[-1]
    v0 = rescale(u0, lam)
    cfg_scaled = SimConfig(v0.grid, dt=1e-3, t_end=t_scaled,
                           snapshot_stride=round(t_scaled / 1e-3))
    scaled_final = simulate(v0, cfg_scaled).states[-1]
    expected = rescale(base_final, lam)
    err = lebesgue_norm(scaled_final - expected, 2)
    assert err < 1e-6
