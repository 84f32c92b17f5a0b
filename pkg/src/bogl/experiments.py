"""Reproducible experiment drivers: config parsing, manifests and the
simulation / gauge / probe / well-posedness studies behind the CLI.

Config files are UTF-8 "key = value" lines with # comments; unknown keys are
rejected.  Every run writes a manifest echoing the resolved configuration
and a sha256 per output file.  Paths inside the manifest are relative to the
run directory and the manifest never records the directory itself, so a
fixed seed reproduces every byte regardless of where the run lands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bilinear, bourgain, gauge, lp
from .dynamics import SimConfig, Trajectory, energy, momentum, simulate, traveling_wave
from .reporting import ProbeReport, sha256_file, stream, write_csv, write_json
from .snapshots import read_snapshot, write_snapshot
from .spectral import (
    RealField,
    lebesgue_norm,
    make_grid,
    random_field,
    sobolev_norm,
)

__all__ = [
    "ConfigError",
    "parse_config_file",
    "resolve_config",
    "Assertion",
    "RunResult",
    "run_simulate",
    "run_gauge_check",
    "run_lp_decompose",
    "run_norm_sweep",
    "run_bilinear_probe",
    "run_lipschitz_pairs",
    "run_scaling_check",
    "run_probe_suite",
]


class ConfigError(ValueError):
    pass


def parse_config_file(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    out: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = body.split("=", 1)
        key = key.strip()
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def _convert(key: str, raw: str, kind):
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is str:
            return raw
        if kind == "floats":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if kind == "ints":
            return tuple(int(v) for v in raw.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"config key {key!r}: {exc}") from None
    raise AssertionError(kind)


def resolve_config(raw: dict, schema: dict) -> dict:
    unknown = set(raw) - set(schema)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    resolved = {}
    for key, (kind, default) in schema.items():
        resolved[key] = _convert(key, raw[key], kind) if key in raw else default
    return resolved


def pop_out_dir(raw: dict) -> str | None:
    """Extract the optional out_dir key (never echoed into manifests)."""
    return raw.pop("out_dir", None)


@dataclass
class Assertion:
    name: str
    ok: bool
    detail: str


@dataclass
class RunResult:
    out_dir: Path
    config: dict
    outputs: list
    assertions: list

    @property
    def passed(self) -> bool:
        return all(a.ok for a in self.assertions)


def _finish(command: str, out_dir: Path, config: dict, outputs: list,
            assertions: list) -> RunResult:
    manifest = {
        "command": command,
        "config": {k: _manifest_value(v) for k, v in config.items()},
        "outputs": {
            str(Path(p).relative_to(out_dir)): sha256_file(p) for p in outputs
        },
        "assertions": [
            {"name": a.name, "ok": a.ok, "detail": a.detail} for a in assertions
        ],
        "format_version": 1,
    }
    path = Path(out_dir) / "manifest.json"
    write_json(path, manifest)
    return RunResult(Path(out_dir), config, [*outputs, path], assertions)


def _manifest_value(v):
    if isinstance(v, tuple):
        return list(v)
    return v


def _prep(out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

SIMULATE_SCHEMA = {
    "n": (int, 256),
    "lambda": (float, 1.0),
    "dt": (float, 1e-3),
    "t_end": (float, 1.0),
    "dealias": (float, 2.0 / 3.0),
    "snapshot_stride": (int, 100),
    "seed": (int, 0),
    "init": (str, "random"),
    "amplitude": (float, 1.0),
    "max_mode": (int, 8),
    "decay": (float, 2.0),
    "rho": (float, 0.3),
}


def initial_data(grid, cfg: dict) -> RealField:
    init = cfg["init"]
    if init == "zero":
        return RealField.from_samples(grid, np.zeros(grid.n))
    if init == "modes":
        x = grid.x
        profile = cfg["amplitude"] * (
            np.cos(x) + 0.6 * np.cos(2 * x) - 0.4 * np.sin(3 * x)
        )
        return RealField.from_samples(grid, profile)
    if init == "random":
        rng = stream(cfg["seed"], "initial-data")
        return random_field(
            grid,
            rng,
            decay=cfg["decay"],
            amplitude=cfg["amplitude"],
            max_mode=cfg["max_mode"],
        )
    if init == "wave":
        profile, _ = traveling_wave(grid, cfg["rho"])
        return profile
    raise ConfigError(f"unknown init {init!r} (zero|modes|random|wave)")


def run_simulate(config: dict, out_dir) -> RunResult:
    cfg = resolve_config(config, SIMULATE_SCHEMA)
    out = _prep(out_dir)
    grid = make_grid(cfg["n"], cfg["lambda"])
    u0 = initial_data(grid, cfg)
    try:
        sim_cfg = SimConfig(
            grid,
            dt=cfg["dt"],
            t_end=cfg["t_end"],
            dealias=cfg["dealias"],
            snapshot_stride=cfg["snapshot_stride"],
            seed=cfg["seed"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    traj = simulate(u0, sim_cfg)
    outputs = []
    for idx, (t, state) in enumerate(zip(traj.times, traj.states)):
        path = out / f"snap_{idx:06d}.bin"
        write_snapshot(path, state, time=float(t))
        outputs.append(path)
    diag = out / "diagnostics.csv"
    write_csv(diag, traj.diagnostics_rows(), ["t", "M", "E", "Linf"])
    outputs.append(diag)
    m_drift = float(np.max(np.abs(traj.momenta - traj.momenta[0])))
    e_drift = float(np.max(np.abs(traj.energies - traj.energies[0])))
    m_ref = max(abs(traj.momenta[0]), 1e-300)
    e_ref = max(abs(traj.energies[0]), 1e-300)
    assertions = [
        Assertion("finite", bool(np.isfinite(traj.states[-1].samples).all()), ""),
        Assertion(
            "momentum_drift", m_drift / m_ref < 1e-10 or m_drift == 0.0,
            f"rel drift {m_drift / m_ref:.3e}",
        ),
        Assertion(
            "energy_drift", e_drift / e_ref < 1e-8 or e_drift == 0.0,
            f"rel drift {e_drift / e_ref:.3e}",
        ),
    ]
    return _finish("simulate", out, cfg, outputs, assertions)


def load_trajectory(traj_dir) -> Trajectory:
    paths = sorted(Path(traj_dir).glob("snap_*.bin"))
    if not paths:
        raise ConfigError(f"no snapshots found in {traj_dir}")
    states, times = [], []
    for p in paths:
        field, t = read_snapshot(p)
        if not isinstance(field, RealField):
            raise ConfigError(f"{p}: trajectory snapshots must be real fields")
        states.append(field)
        times.append(t)
    order = np.argsort(times)
    states = [states[i] for i in order]
    times = np.array([times[i] for i in order])
    return Trajectory(
        times=times,
        states=states,
        momenta=np.array([momentum(u) for u in states]),
        energies=np.array([energy(u) for u in states]),
    )


# ---------------------------------------------------------------------------
# gauge check
# ---------------------------------------------------------------------------


def run_gauge_check(traj_dir, out_dir, oversample: int = 4) -> RunResult:
    out = _prep(out_dir)
    traj = load_trajectory(traj_dir)
    mean = float(traj.states[0].mean.real)
    if abs(mean) > 1e-12:
        # Galilean change of unknown: evolve in the mean-zero frame
        reduced = []
        for t, u in zip(traj.times, traj.states):
            shifted = gauge.translate_to_zero_mean(u, mean, float(t))
            reduced.append(shifted)
        traj = Trajectory(
            times=traj.times,
            states=reduced,
            momenta=np.array([momentum(u) for u in reduced]),
            energies=np.array([energy(u) for u in reduced]),
        )
    rep = gauge.gauge_residual(traj, oversample=oversample)
    res_csv = out / "gauge_residual.csv"
    write_csv(res_csv, rep.rows(), ["t", "residual_L2", "mean_term_L2"])
    rec_rows = []
    worst = 0.0
    for t, state in zip(traj.times, traj.states):
        rec = gauge.reconstruct_high(state, oversample=oversample)
        rec_rows.append({"t": float(t), "rel_gap": rec.rel_gap})
        worst = max(worst, rec.rel_gap)
    rec_csv = out / "reconstruction.csv"
    write_csv(rec_csv, rec_rows, ["t", "rel_gap"])
    config = {"traj_dir": str(traj_dir), "oversample": oversample,
              "snapshots": len(traj.states), "mean_shift": mean}
    assertions = [
        Assertion("reconstruction_gap", worst <= 1e-10, f"max rel gap {worst:.3e}"),
        Assertion(
            "residual_finite", bool(np.all(np.isfinite(rep.residuals))),
            f"max residual {float(np.max(rep.residuals)):.3e}",
        ),
    ]
    return _finish("gauge-check", out, config, [res_csv, rec_csv], assertions)


# ---------------------------------------------------------------------------
# lp decompose
# ---------------------------------------------------------------------------


def run_lp_decompose(input_path, out_dir) -> RunResult:
    out = _prep(out_dir)
    field, t = read_snapshot(input_path)
    dec = lp.decompose(field)
    rows = [{"shell": n, "mass": m} for n, m in dec.shell_masses()]
    csv = out / "lp_masses.csv"
    write_csv(csv, rows, ["shell", "mass"])
    rec = dec.reconstruct()
    scale = max(float(np.max(np.abs(field.coefficients))), 1e-300)
    gap = float(np.max(np.abs(rec.coefficients - field.coefficients))) / scale
    config = {"input": str(Path(input_path).name), "time": t,
              "profile": lp.PROFILE_NAME}
    assertions = [Assertion("reconstruction", gap <= 1e-12, f"rel gap {gap:.3e}")]
    return _finish("lp-decompose", out, config, [csv], assertions)


# ---------------------------------------------------------------------------
# norm sweep
# ---------------------------------------------------------------------------

NORM_SWEEP_SCHEMA = {
    "n": (int, 32),
    "lambda": (float, 1.0),
    "num_times": (int, 32),
    "t_span_pi": (float, 2.0),
    "samples": (int, 20),
    "seed": (int, 0),
    "s": (float, 0.0),
    "b": (float, 0.5),
    "xi_decay": (float, 1.0),
    "sigma_decay": (float, 1.5),
}


def run_norm_sweep(config: dict, out_dir) -> RunResult:
    cfg = resolve_config(config, NORM_SWEEP_SCHEMA)
    out = _prep(out_dir)
    win = bourgain.SpaceTimeGrid(
        make_grid(cfg["n"], cfg["lambda"]),
        cfg["num_times"],
        cfg["t_span_pi"] * math.pi,
    )
    rows = []
    plancherel_worst = 0.0
    for i in range(cfg["samples"]):
        rng = stream(cfg["seed"], "norm-sweep", i)
        u = bourgain.random_spacetime_field(
            win, rng, xi_decay=cfg["xi_decay"], sigma_decay=cfg["sigma_decay"],
            real=True,
        )
        x00 = bourgain.x_norm(u, 0.0, 0.0)
        l2 = bourgain.spacetime_lebesgue(u, 2)
        plancherel_worst = max(plancherel_worst, abs(x00 - l2) / max(l2, 1e-300))
        x38 = bourgain.x_norm(u, 0.0, 0.375)
        l4 = bourgain.spacetime_lebesgue(u, 4)
        rows.append(
            {
                "sample_id": i,
                "s": cfg["s"],
                "b": cfg["b"],
                "x_norm": bourgain.x_norm(u, cfg["s"], cfg["b"]),
                "x_regroup": bourgain.x_norm_regrouped(u, cfg["s"], cfg["b"]),
                "z_norm": bourgain.z_norm(u, cfg["s"], cfg["b"]),
                "z_tilde": bourgain.z_tilde_norm(u, cfg["s"], cfg["b"]),
                "y_norm": bourgain.y_norm(u, cfg["s"]),
                "l4": l4,
                "ratio_l4_x38": l4 / x38 if x38 > 0 else float("nan"),
            }
        )
    csv = out / "norm_sweep.csv"
    write_csv(csv, rows)
    assertions = [
        Assertion(
            "plancherel", plancherel_worst <= 1e-12,
            f"max |X^{{0,0}} - L2|/L2 = {plancherel_worst:.3e}",
        )
    ]
    return _finish("norm-sweep", out, cfg, [csv], assertions)


# ---------------------------------------------------------------------------
# bilinear probe
# ---------------------------------------------------------------------------

BILINEAR_SCHEMA = {
    "which": (str, "bilinear_critical_x"),
    "s": (float, 0.0),
    "samples": (int, 100),
    "seed": (int, 0),
    "n": (int, 32),
    "num_times": (int, 32),
    "lambda": (float, 0.0),  # 0 means: probe-specific default
}


def _bilinear_period_scale(which: str, requested: float) -> float:
    if requested > 0:
        return requested
    # the low-frequency operator of exp_lowband vanishes identically on the
    # unit lattice (its content sits at fractional frequencies), so that
    # probe defaults to period scale 2
    return 2.0 if which == "exp_lowband" else 1.0


def run_bilinear_probe(config: dict, out_dir) -> RunResult:
    cfg = resolve_config(config, BILINEAR_SCHEMA)
    out = _prep(out_dir)
    which = cfg["which"]
    period_scale = _bilinear_period_scale(which, cfg["lambda"])
    probe_cfg = bilinear.EstimateProbeConfig(
        n=cfg["n"],
        num_times=cfg["num_times"],
        samples=cfg["samples"],
        seed=cfg["seed"],
        s=cfg["s"],
        period_scale=period_scale,
    )
    try:
        rep = bilinear.estimate_probe(
            which, probe_cfg, lambda d, i: stream(cfg["seed"], d, i)
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    outputs = rep.write(out)
    worst_closure = max((r.get("closure_rel", 0.0) for r in rep.rows), default=0.0)
    assertions = [
        Assertion("sup_finite", bool(np.isfinite(rep.sup)), f"sup {rep.sup:.4g}"),
        Assertion(
            "region_closure", worst_closure <= 1e-10,
            f"max |A+B+C-total|/|total| = {worst_closure:.3e}",
        ),
    ]
    resolved = {**cfg, "lambda": period_scale}
    return _finish("bilinear-probe", out, resolved, outputs, assertions)


# ---------------------------------------------------------------------------
# lipschitz pairs
# ---------------------------------------------------------------------------

LIPSCHITZ_SCHEMA = {
    "n": (int, 256),
    "lambda": (float, 1.0),
    "dt": (float, 1e-3),
    "t_end": (float, 0.5),
    "snapshot_stride": (int, 50),
    "seed": (int, 0),
    "s": (float, 0.0),
    "deltas": ("floats", (1e-1, 1e-2, 1e-3)),
    "samples": (int, 2),
    "perturb_min_freq": (float, 8.0),
    "perturb_max_mode": (int, 24),
    "cutoffs": ("ints", (20, 40, 80)),
    "amplitude": (float, 1.0),
    "max_mode": (int, 8),
    "decay": (float, 2.0),
    "trunc_decay": (float, 1.0),
    "trunc_max_mode": (int, 0),  # 0: fill the dealiased band
}


def _high_frequency_direction(grid, rng, min_freq: float, max_mode: int) -> RealField:
    coeff = np.zeros(grid.n, dtype=complex)
    lo = int(np.ceil(min_freq * grid.period_scale))
    hi = min(max_mode, grid.n // 2 - 1)
    if lo > hi:
        raise ConfigError("perturbation band is empty")
    for k in range(lo, hi + 1):
        z = rng.standard_normal() + 1j * rng.standard_normal()
        z *= (1.0 + k / grid.period_scale) ** (-2.0)
        coeff[k] += z
        coeff[-k] += np.conj(z)
    f = RealField(grid, coeff)
    norm = lebesgue_norm(f, 2)
    return f * (1.0 / norm)


def run_lipschitz_pairs(config: dict, out_dir) -> RunResult:
    cfg = resolve_config(config, LIPSCHITZ_SCHEMA)
    deltas = tuple(d for d in cfg["deltas"] if d > 0)
    skipped_deltas = len(cfg["deltas"]) - len(deltas)  # ratio undefined at 0
    if not deltas:
        raise ConfigError("no positive perturbation sizes given")
    if cfg["perturb_min_freq"] < 8.0:
        raise ConfigError("perturbation must live at frequencies |xi| >= 8")
    out = _prep(out_dir)
    grid = make_grid(cfg["n"], cfg["lambda"])
    sim_cfg = SimConfig(
        grid, dt=cfg["dt"], t_end=cfg["t_end"], snapshot_stride=cfg["snapshot_stride"]
    )
    rows = []
    trunc_rows = []
    spreads = []
    for i in range(cfg["samples"]):
        rng = stream(cfg["seed"], "lipschitz", i)
        phi1 = random_field(
            grid, rng, decay=cfg["decay"], amplitude=cfg["amplitude"],
            max_mode=cfg["max_mode"],
        )
        direction = _high_frequency_direction(
            grid, rng, cfg["perturb_min_freq"], cfg["perturb_max_mode"]
        )
        traj1 = simulate(phi1, sim_cfg)
        ratios = []
        for delta in deltas:
            phi2 = phi1 + float(delta) * direction
            gauge.primitive_gap(phi1, phi2, require_same_low=True)
            traj2 = simulate(phi2, sim_cfg)
            denom_l2 = lebesgue_norm(phi1 - phi2, 2)
            denom_hs = sobolev_norm(phi1 - phi2, cfg["s"])
            sup_l2 = max(
                lebesgue_norm(a - b, 2)
                for a, b in zip(traj1.states, traj2.states)
            )
            sup_hs = max(
                sobolev_norm(a - b, cfg["s"])
                for a, b in zip(traj1.states, traj2.states)
            )
            sup_z = max(
                lebesgue_norm(gauge.gauge_w(a) - gauge.gauge_w(b), 2)
                for a, b in zip(traj1.states, traj2.states)
            )
            ratios.append(sup_l2 / denom_l2)
            rows.append(
                {
                    "sample": i,
                    "delta": float(delta),
                    "ratio_l2": sup_l2 / denom_l2,
                    "ratio_hs": sup_hs / denom_hs,
                    "ratio_gauge_z": sup_z / denom_l2,
                }
            )
        spreads.append((max(ratios) - min(ratios)) / min(ratios))
        # frequency-truncated data: convergence of u^j to the full solution;
        # uses a rough-tailed datum so the truncation actually removes mass
        rough_max = cfg["trunc_max_mode"] or int(grid.n // 3) - 1
        psi = random_field(
            grid, rng, decay=cfg["trunc_decay"], amplitude=cfg["amplitude"],
            max_mode=rough_max,
        )
        traj_ref = simulate(psi, sim_cfg)
        for cutoff in cfg["cutoffs"]:
            mask = (np.abs(grid.xi) <= cutoff).astype(float)
            uj0 = RealField(grid, psi.coefficients * mask)
            trajj = simulate(uj0, sim_cfg)
            err = max(
                lebesgue_norm(a - b, 2)
                for a, b in zip(trajj.states, traj_ref.states)
            )
            trunc_rows.append({"sample": i, "cutoff": int(cutoff), "err_l2": err})
    lip_csv = out / "lipschitz.csv"
    write_csv(lip_csv, rows, ["sample", "delta", "ratio_l2", "ratio_hs",
                              "ratio_gauge_z"])
    trunc_csv = out / "truncation.csv"
    write_csv(trunc_csv, trunc_rows, ["sample", "cutoff", "err_l2"])
    max_spread = max(spreads)
    decreasing = all(
        a["err_l2"] >= b["err_l2"] - 1e-15
        for a, b in zip(trunc_rows, trunc_rows[1:])
        if a["sample"] == b["sample"]
    )
    assertions = [
        Assertion(
            "delta_stability", max_spread <= 0.10,
            f"max ratio spread across deltas {max_spread:.3%}",
        ),
        Assertion("truncation_monotone", decreasing, ""),
    ]
    resolved = {**cfg, "deltas": deltas, "skipped_deltas": skipped_deltas}
    return _finish("lipschitz-pairs", out, resolved, [lip_csv, trunc_csv], assertions)


# ---------------------------------------------------------------------------
# scaling check
# ---------------------------------------------------------------------------

SCALING_SCHEMA = {
    "n": (int, 256),
    "lambda_base": (float, 2.0),
    "scale": (int, 2),
    "dt": (float, 1e-3),
    "t_scaled": (float, 0.25),
    "seed": (int, 0),
    "amplitude": (float, 0.25),
    "max_mode": (int, 6),
    "decay": (float, 2.0),
}


def run_scaling_check(config: dict, out_dir) -> RunResult:
    from .dynamics import rescale

    cfg = resolve_config(config, SCALING_SCHEMA)
    out = _prep(out_dir)
    lam = cfg["scale"]
    if lam < 1 or (lam & (lam - 1)) != 0:
        raise ConfigError("scale must be a dyadic integer >= 1")
    grid = make_grid(cfg["n"], cfg["lambda_base"])
    rng = stream(cfg["seed"], "scaling")
    u0 = random_field(
        grid, rng, decay=cfg["decay"], amplitude=cfg["amplitude"],
        max_mode=cfg["max_mode"],
    )
    rows = []
    norm_worst = 0.0
    for factor in (1, 2, 4):
        if grid.period_scale / factor < 1 - 1e-12:
            continue
        v = rescale(u0, factor)
        got = lebesgue_norm(v, 2)
        want = math.sqrt(factor) * lebesgue_norm(u0, 2)
        err = abs(got - want) / want
        norm_worst = max(norm_worst, err)
        rows.append({"check": f"norm_scale_{factor}", "value": got,
                     "expected": want, "rel_err": err})
    t_scaled = cfg["t_scaled"]
    steps_base = round(lam**2 * t_scaled / cfg["dt"])
    base_cfg = SimConfig(grid, dt=cfg["dt"], t_end=lam**2 * t_scaled,
                         snapshot_stride=steps_base)
    base_final = simulate(u0, base_cfg).states[-1]
    v0 = rescale(u0, lam)
    steps_scaled = round(t_scaled / cfg["dt"])
    scaled_cfg = SimConfig(v0.grid, dt=cfg["dt"], t_end=t_scaled,
                           snapshot_stride=steps_scaled)
    scaled_final = simulate(v0, scaled_cfg).states[-1]
    expected = rescale(base_final, lam)
    corr = lebesgue_norm(scaled_final - expected, 2)
    rows.append({"check": "solution_correspondence", "value": corr,
                 "expected": 0.0, "rel_err": corr})
    csv = out / "scaling.csv"
    write_csv(csv, rows, ["check", "value", "expected", "rel_err"])
    assertions = [
        Assertion("norm_relation", norm_worst <= 1e-12, f"rel err {norm_worst:.3e}"),
        Assertion("correspondence", corr <= 1e-6, f"L2 error {corr:.3e}"),
    ]
    return _finish("scaling-check", out, cfg, [csv], assertions)


# ---------------------------------------------------------------------------
# probe suite
# ---------------------------------------------------------------------------

PROBE_SUITE_SCHEMA = {
    "seed": (int, 0),
    "samples": (int, 100),
    "n": (int, 32),
    "num_times": (int, 32),
    "s": (float, 0.0),
    "select": (str, "all"),
    "exp_samples": (int, 40),
    "exp_n": (int, 64),
    "bracket_mu_max": (float, 1e4),
}

SUITE_PROBES = (
    "linear",
    "bilinear_critical_x",
    "bilinear_critical_shell",
    "exp_lowband",
    "leibniz_split",
    "bilinear_half_weight",
    "bilinear_periodic",
    "exp_multiplication",
    "bracket_convolution",
)


def _suite_exp_multiplication(cfg) -> ProbeReport:
    grid = make_grid(cfg["exp_n"], 1.0)
    rep = ProbeReport(
        "exp_multiplication",
        "|J^a(e^{-iF/2} g)|_{Lq} <= C (1 + |u|_{L2}) |J^a g|_{Lq}",
        environment={"n": cfg["exp_n"], "samples": cfg["exp_samples"],
                     "seed": cfg["seed"]},
    )
    for i in range(cfg["exp_samples"]):
        rng = stream(cfg["seed"], "exp-multiplication", i)
        u = random_field(grid, rng, decay=1.0, amplitude=1.0)
        g = random_field(grid, rng, decay=0.7, amplitude=1.0)
        for q, alpha in ((2, 0.0), (4, 0.25)):
            res = gauge.exp_multiplication_probe(u, g, alpha=alpha, q=q)
            rep.add(sample=i, q=q, alpha=alpha, lhs=res.lhs, rhs=res.rhs,
                    ratio=res.ratio)
    return rep


def run_probe_suite(config: dict, out_dir) -> RunResult:
    cfg = resolve_config(config, PROBE_SUITE_SCHEMA)
    out = _prep(out_dir)
    selected = (
        list(SUITE_PROBES)
        if cfg["select"] == "all"
        else [s.strip() for s in cfg["select"].split(",") if s.strip()]
    )
    unknown = set(selected) - set(SUITE_PROBES)
    if unknown:
        raise ConfigError(f"unknown probes: {sorted(unknown)}")
    outputs: list = []
    summary: dict = {}
    failures: list = []
    reports: list[ProbeReport] = []
    for name in selected:
        try:
            reports_here = _run_one_suite_probe(name, cfg)
        except Exception as exc:  # record and continue, per the suite contract
            failures.append({"probe": name, "error": str(exc)})
            continue
        reports.extend(reports_here)
        for rep in reports_here:
            outputs.extend(rep.write(out))
            summary[rep.name] = {
                "inequality": rep.inequality,
                "sup": rep.sup,
                "mean": rep.mean,
                "stddev": rep.stddev,
                "samples": len(rep.rows),
                "skipped": rep.skipped,
            }
    summary_path = out / "probe_suite_summary.json"
    write_json(summary_path, {"probes": summary, "failures": failures,
                              "seed": cfg["seed"]})
    outputs.append(summary_path)
    worst_closure = 0.0
    for rep in reports:
        for row in rep.rows:
            worst_closure = max(worst_closure, row.get("closure_rel", 0.0))
    sups_finite = all(np.isfinite(rep.sup) for rep in reports if rep.rows)
    assertions = [
        Assertion("no_probe_failures", not failures, str(failures)),
        Assertion("sups_finite", bool(sups_finite), ""),
        Assertion(
            "region_closure", worst_closure <= 1e-10,
            f"max closure {worst_closure:.3e}",
        ),
    ]
    return _finish("probe-suite", out, cfg, outputs, assertions)


def _run_one_suite_probe(name: str, cfg: dict) -> list[ProbeReport]:
    seed = cfg["seed"]
    factory = lambda d, i: stream(seed, d, i)  # noqa: E731
    if name == "linear":
        probe_cfg = bourgain.LinearProbeConfig(
            n=cfg["n"], num_times=cfg["num_times"],
            samples=max(10, cfg["samples"] // 3), seed=seed, s=cfg["s"],
        )
        return bourgain.linear_probes(probe_cfg, factory)
    if name == "exp_multiplication":
        return [_suite_exp_multiplication(cfg)]
    if name == "bracket_convolution":
        mus = [0.0, 1.0, 10.0, 100.0, 1000.0, cfg["bracket_mu_max"]]
        return [bilinear.bracket_convolution_check(1.0, 1.0, mus)]
    period_scale = _bilinear_period_scale(name, 0.0)
    probe_cfg = bilinear.EstimateProbeConfig(
        n=cfg["n"], num_times=cfg["num_times"], samples=cfg["samples"],
        seed=seed, s=cfg["s"], period_scale=period_scale,
    )
    return [bilinear.estimate_probe(name, probe_cfg, factory)]
