"""Space-time norms, lifting, and the linear estimate probes."""

import numpy as np
import pytest

from bogl.bourgain import (
    LinearProbeConfig,
    SpaceTimeField,
    SpaceTimeGrid,
    duhamel_field,
    free_evolution_field,
    lift,
    linear_probes,
    localize,
    random_spacetime_field,
    spacetime_lebesgue,
    x_norm,
    x_norm_regrouped,
    y_norm,
    z_norm,
    z_tilde_norm,
)
from bogl.dynamics import SimConfig, simulate
from bogl.reporting import stream
from bogl.spectral import ComplexField, make_grid
from bogl.spectral import RealField


@pytest.fixture(scope="module")
def win():
    return SpaceTimeGrid(make_grid(32, 1.0), 32, 2 * np.pi)


def test_grid_validation():
    g = make_grid(32, 1.0)
    with pytest.raises(ValueError):
        SpaceTimeGrid(g, 8, 2 * np.pi)
    with pytest.raises(ValueError):
        SpaceTimeGrid(g, 24, 2 * np.pi)
    with pytest.raises(ValueError):
        SpaceTimeGrid(g, 32, -1.0)


def test_window_plateau_covers_central_half(win):
    w = win.window
    t = win.times
    central = (t >= win.t_span / 4) & (t <= 3 * win.t_span / 4)
    assert np.all(w[central] == 1.0)
    assert w[0] == 0.0
    assert np.all((0 <= w) & (w <= 1))


def test_round_trip(win):
    u = random_spacetime_field(win, stream(0, "rt"), real=True)
    again = SpaceTimeField.from_raw_samples(win, u.samples)
    assert np.max(np.abs(again.coefficients - u.coefficients)) < 1e-12


def test_lift_zero_and_alignment(win):
    zero = RealField.from_samples(win.spatial, np.zeros(win.spatial.n))
    steps = 4
    cfg = SimConfig(win.spatial, dt=win.dt / steps, t_end=win.t_span,
                    snapshot_stride=steps)
    traj = simulate(zero, cfg)
    lifted = lift(traj, win)
    assert np.max(np.abs(lifted.coefficients)) == 0.0
    bad = SpaceTimeGrid(win.spatial, win.num_times, win.t_span / 3.1)
    with pytest.raises(ValueError):
        lift(traj, bad)


def test_free_evolution_resonant_line(win):
    f = ComplexField.from_samples(win.spatial, np.exp(3j * win.spatial.x))
    lifted = free_evolution_field(f, win)
    c = np.abs(lifted.coefficients)
    l, k = np.unravel_index(np.argmax(c), c.shape)
    assert win.spatial.xi[k] == 3.0
    assert win.tau[l] == -9.0  # sigma = tau + |xi| xi = 0


def test_single_bin_norms(win):
    lx, lt = win.spatial.length, win.t_span
    coeff = np.zeros((win.num_times, win.spatial.n), dtype=complex)
    coeff[(-9) % win.num_times, 3] = 2.0  # (xi, tau) = (3, -9): sigma = 0
    f = SpaceTimeField(win, coeff)
    assert x_norm(f, 0, 0.5) == pytest.approx(2 * np.sqrt(lx * lt), rel=1e-13)
    coeff2 = np.zeros_like(coeff)
    coeff2[0, 3] = 2.0  # tau = 0: sigma = 9, weight <9>^{2b}
    f2 = SpaceTimeField(win, coeff2)
    assert x_norm(f2, 0, 0.5) == pytest.approx(
        2 * np.sqrt(lx * lt) * np.sqrt(10), rel=1e-13
    )
    assert x_norm(f2, 1, 0) == pytest.approx(2 * np.sqrt(lx * lt) * 4, rel=1e-13)
    assert z_norm(f, 0, 0) == pytest.approx(2 * np.sqrt(lx), rel=1e-13)
    assert y_norm(SpaceTimeField(win, np.zeros_like(coeff)), 0.3) == 0.0


def test_z_is_ell1_in_tau(win):
    coeff = np.zeros((win.num_times, win.spatial.n), dtype=complex)
    coeff[1, 3] = 1.0
    coeff[2, 3] = 1.0  # two tau bins on the same xi column
    f = SpaceTimeField(win, coeff)
    single = np.zeros_like(coeff)
    single[1, 3] = 2.0
    g = SpaceTimeField(win, single)
    # amplitudes add in tau before the xi square: both give 2 sqrt(Lx)
    assert z_norm(f, 0, 0) == pytest.approx(z_norm(g, 0, 0), rel=1e-13)
    # while X adds in squares: sqrt(2) vs 2
    assert x_norm(f, 0, 0) == pytest.approx(x_norm(g, 0, 0) / np.sqrt(2), rel=1e-13)


def test_x_norm_plancherel_and_monotonicity(win):
    u = random_spacetime_field(win, stream(1, "pl"), real=True)
    assert x_norm(u, 0, 0) == pytest.approx(spacetime_lebesgue(u, 2), rel=1e-12)
    assert x_norm(u, 0, 0.25) <= x_norm(u, 0, 0.375) <= x_norm(u, 0, 0.5)
    assert x_norm(u, 0.0, 0.5) <= x_norm(u, 0.5, 0.5) <= x_norm(u, 1.0, 0.5)
    assert y_norm(u, 0.5) >= x_norm(u, 0.5, 0.5)
    assert y_norm(u, 0.5) >= z_tilde_norm(u, 0.5, 0.0)


def test_x_norm_regroup_reported(win):
    u = random_spacetime_field(win, stream(2, "rg"), real=True)
    a, b = x_norm(u, 0.25, 0.375), x_norm_regrouped(u, 0.25, 0.375)
    assert np.isfinite(a) and np.isfinite(b) and b >= a * 0.9


def test_localize_contracts(win):
    u = random_spacetime_field(win, stream(3, "loc"), real=True)
    full = x_norm(u, 0, 0.375)
    half = x_norm(localize(u, win.t_span / 2), 0, 0.375)
    assert half < full
    with pytest.raises(ValueError):
        localize(u, 2 * win.t_span)


def test_duhamel_zero_forcing(win):
    zero = SpaceTimeField(win, np.zeros((win.num_times, win.spatial.n), dtype=complex))
    out = duhamel_field(zero, win)
    assert np.max(np.abs(out.coefficients)) == 0.0


def test_duhamel_single_mode_oracle(win):
    # forcing g = e^{i(3x + tau0 t)}: the mode-3 coefficient of the unwindowed
    # Duhamel integral is e^{-9it} (e^{i sigma t} - 1)/(i sigma)
    tau0 = -5
    coeff = np.zeros((win.num_times, win.spatial.n), dtype=complex)
    coeff[tau0 % win.num_times, 3] = 1.0
    g = SpaceTimeField(win, coeff)
    out = duhamel_field(g, win)
    sigma = tau0 + 9
    t = win.times
    expected_hat = np.exp(-9j * t) * (np.exp(1j * sigma * t) - 1.0) / (1j * sigma)
    # compare inside the field's band: the tau-Nyquist bin is not represented
    expected_tau = np.fft.fft(expected_hat * win.window) / win.num_times
    expected_tau[win.num_times // 2] = 0.0
    got_tau = out.coefficients[:, 3]
    assert np.max(np.abs(got_tau - expected_tau)) < 1e-12


def test_resonant_mode_l4_ratio_quadrature_oracle(win):
    # for the windowed free evolution of a single mode, |u(x,t)| = window(t),
    # so |u|_{L4}^4 = L_x * int window^4 dt, fixed by quadrature of the window
    f = ComplexField.from_samples(win.spatial, np.exp(3j * win.spatial.x))
    lifted = free_evolution_field(f, win)
    from bogl.lp import eta

    fine_t = np.arange(0, win.t_span, win.t_span / (64 * win.num_times))
    wvals = np.asarray(eta(4.0 * (fine_t - win.t_span / 2.0) / win.t_span))
    oracle = (win.spatial.length * np.sum(wvals**4) * fine_t[1]) ** 0.25
    # the raw 32-point Riemann sum resolves the window ramp to ~1e-5
    coarse = np.asarray(eta(4.0 * (win.times - win.t_span / 2.0) / win.t_span))
    riemann = (win.spatial.length * np.sum(coarse**4) * win.dt) ** 0.25
    assert riemann == pytest.approx(oracle, rel=1e-4)
    # the field itself lives on the Nyquist-stripped band; band truncation is
    # the remaining gap between its L4 and the window quadrature
    l4 = spacetime_lebesgue(lifted, 4)
    assert l4 == pytest.approx(oracle, rel=1e-3)
    ratio = l4 / x_norm(lifted, 0.0, 0.375)
    assert np.isfinite(ratio) and 0 < ratio < 1


def test_linear_probe_reports():
    cfg = LinearProbeConfig(n=32, num_times=32, samples=9, seed=3)
    reports = linear_probes(cfg, lambda d, i: stream(cfg.seed, d, i))
    names = {r.name for r in reports}
    assert {
        "linear_homogeneous",
        "linear_duhamel_x",
        "linear_duhamel_y",
        "linear_time_factor",
        "bourgain_strichartz",
        "embedding_sup_hs",
    } <= names
    for r in reports:
        assert len(r.rows) > 0
        assert np.isfinite(r.sup) and r.sup > 0
    # determinism
    again = linear_probes(cfg, lambda d, i: stream(cfg.seed, d, i))
    for r1, r2 in zip(reports, again):
        assert r1.rows == r2.rows
