"""Snapshot IO, config handling, experiment drivers and the CLI contract."""

import json
from pathlib import Path

import numpy as np
import pytest

from bogl.cli import main
from bogl.experiments import (
    ConfigError,
    parse_config_file,
    resolve_config,
    run_bilinear_probe,
    run_gauge_check,
    run_lipschitz_pairs,
    run_lp_decompose,
    run_norm_sweep,
    run_probe_suite,
    run_scaling_check,
    run_simulate,
)
from bogl.reporting import stream, write_csv
from bogl.snapshots import read_snapshot, write_snapshot
from bogl.spectral import ComplexField, RealField, make_grid, random_field


def test_snapshot_round_trip(tmp_path):
    g = make_grid(64, 2.0)
    f = random_field(g, np.random.default_rng(0), decay=1.0)
    path = tmp_path / "f.bin"
    write_snapshot(path, f, time=1.25)
    back, t = read_snapshot(path)
    assert t == 1.25
    assert isinstance(back, RealField)
    assert back.grid == g
    assert np.max(np.abs(back.samples - f.samples)) < 1e-14

    z = ComplexField.from_samples(g, np.exp(1j * g.x))
    path2 = tmp_path / "z.bin"
    write_snapshot(path2, z, time=0.0)
    back2, _ = read_snapshot(path2)
    assert isinstance(back2, ComplexField)
    assert np.max(np.abs(back2.samples - z.samples)) < 1e-14


def test_snapshot_header_layout(tmp_path):
    g = make_grid(8, 1.0)
    f = RealField.from_samples(g, np.zeros(8))
    path = tmp_path / "h.bin"
    write_snapshot(path, f, time=2.0)
    raw = path.read_bytes()
    assert raw[:4] == b"BOGL"
    assert len(raw) == 29 + 8 * 8  # header + N float64
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(ValueError):
        read_snapshot(bad)


def test_config_parsing(tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("a = 1\n# comment\nb = 2.5  # trailing\n\n")
    assert parse_config_file(cfg) == {"a": "1", "b": "2.5"}
    cfg.write_text("a = 1\na = 2\n")
    with pytest.raises(ConfigError):
        parse_config_file(cfg)
    cfg.write_text("oops\n")
    with pytest.raises(ConfigError):
        parse_config_file(cfg)


def test_resolve_config_rejects_unknown():
    schema = {"n": (int, 4), "x": (float, 1.0)}
    assert resolve_config({"n": "8"}, schema) == {"n": 8, "x": 1.0}
    with pytest.raises(ConfigError):
        resolve_config({"bogus": "1"}, schema)
    with pytest.raises(ConfigError):
        resolve_config({"n": "not-an-int"}, schema)


@pytest.fixture(scope="module")
def sim_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    cfg = {"n": "64", "dt": "1e-3", "t_end": "0.04", "snapshot_stride": "10",
           "init": "modes", "amplitude": "0.4"}
    return run_simulate(cfg, out)


def test_run_simulate_outputs(sim_run):
    assert sim_run.passed
    names = sorted(p.name for p in sim_run.outputs)
    assert "diagnostics.csv" in names
    assert "manifest.json" in names
    assert sum(n.startswith("snap_") for n in names) == 5
    manifest = json.loads((sim_run.out_dir / "manifest.json").read_text())
    assert manifest["command"] == "simulate"
    assert set(manifest["outputs"]) == {
        n for n in names if n != "manifest.json"
    }
    # manifest stores no absolute paths (determinism across directories)
    assert str(sim_run.out_dir) not in (sim_run.out_dir / "manifest.json").read_text()


def test_run_gauge_check(sim_run, tmp_path):
    res = run_gauge_check(sim_run.out_dir, tmp_path / "g")
    assert res.passed
    text = (tmp_path / "g" / "gauge_residual.csv").read_text().splitlines()
    assert text[0] == "t,residual_L2,mean_term_L2"
    assert len(text) == 1 + 3  # interior snapshots only


def test_run_gauge_check_handles_mean(tmp_path):
    out = tmp_path / "simm"
    cfg = {"n": "64", "dt": "1e-3", "t_end": "0.03", "snapshot_stride": "10",
           "init": "random", "amplitude": "0.4", "max_mode": "5", "seed": "4"}
    res = run_simulate(cfg, out)
    # add a constant to every snapshot: the driver must Galilean-reduce it
    from bogl.snapshots import read_snapshot as rs, write_snapshot as ws

    for p in sorted(Path(out).glob("snap_*.bin")):
        f, t = rs(p)
        shifted = RealField.from_samples(f.grid, f.samples + 0.7)
        ws(p, shifted, time=t)
    res2 = run_gauge_check(out, tmp_path / "g2")
    assert res2.passed
    assert abs(res2.config["mean_shift"] - 0.7) < 1e-12


def test_run_lp_decompose(sim_run, tmp_path):
    snap = sorted(Path(sim_run.out_dir).glob("snap_*.bin"))[0]
    res = run_lp_decompose(snap, tmp_path / "lp")
    assert res.passed
    rows = (tmp_path / "lp" / "lp_masses.csv").read_text().splitlines()
    assert rows[0] == "shell,mass"


def test_run_norm_sweep(tmp_path):
    res = run_norm_sweep({"samples": "4", "n": "32", "num_times": "32"},
                         tmp_path / "ns")
    assert res.passed


def test_run_bilinear_probe_and_lambda_default(tmp_path):
    res = run_bilinear_probe(
        {"which": "exp_lowband", "samples": "3", "n": "16", "num_times": "16"},
        tmp_path / "bp",
    )
    assert res.passed
    assert res.config["lambda"] == 2.0  # exp_lowband defaults off the unit lattice
    with pytest.raises(ConfigError):
        run_bilinear_probe({"which": "nope"}, tmp_path / "bp2")


def test_run_scaling_check(tmp_path):
    res = run_scaling_check(
        {"n": "128", "t_scaled": "0.05", "lambda_base": "2"}, tmp_path / "sc"
    )
    assert res.passed


def test_run_lipschitz_small(tmp_path):
    cfg = {"n": "128", "t_end": "0.1", "snapshot_stride": "20", "samples": "1",
           "cutoffs": "16,24,32"}
    res = run_lipschitz_pairs(cfg, tmp_path / "lip")
    assert res.passed
    with pytest.raises(ConfigError):
        run_lipschitz_pairs({**cfg, "perturb_min_freq": "4"}, tmp_path / "lip2")
    # a zero perturbation size is skipped (ratio undefined), not an error
    res2 = run_lipschitz_pairs(
        {**cfg, "deltas": "0,1e-2,1e-3"}, tmp_path / "lip3"
    )
    assert res2.config["skipped_deltas"] == 1
    assert res2.config["deltas"] == (1e-2, 1e-3)
    with pytest.raises(ConfigError):
        run_lipschitz_pairs({**cfg, "deltas": "0"}, tmp_path / "lip4")


def test_probe_suite_determinism(tmp_path):
    cfg = {"samples": "4", "exp_samples": "3", "seed": "9",
           "select": "bilinear_critical_x,bracket_convolution,exp_multiplication"}
    run_probe_suite(cfg, tmp_path / "a")
    run_probe_suite(cfg, tmp_path / "b")
    files_a = sorted(p.name for p in (tmp_path / "a").iterdir())
    files_b = sorted(p.name for p in (tmp_path / "b").iterdir())
    assert files_a == files_b
    for name in files_a:
        assert (tmp_path / "a" / name).read_bytes() == (
            tmp_path / "b" / name
        ).read_bytes()


def test_probe_suite_empty_selection(tmp_path):
    res = run_probe_suite({"select": ""}, tmp_path / "empty")
    assert res.passed
    summary = json.loads((tmp_path / "empty" / "probe_suite_summary.json").read_text())
    assert summary["probes"] == {}


def test_probe_suite_summary_lists_inequalities(tmp_path):
    res = run_probe_suite(
        {"samples": "3", "select": "bilinear_critical_x,leibniz_split"}, tmp_path / "s"
    )
    summary = json.loads((tmp_path / "s" / "probe_suite_summary.json").read_text())
    for name, info in summary["probes"].items():
        assert info["inequality"]
        assert np.isfinite(info["sup"])


def test_cli_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text("n = 64\ndt = 1e-3\nt_end = 0.02\nsnapshot_stride = 10\n"
                   "init = modes\namplitude = 0.3\n")
    out = tmp_path / "run"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    assert main(["simulate", "--config", str(tmp_path / "none.cfg")]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("nope = 3\n")
    assert main(["norm-sweep", "--config", str(bad)]) == 2
    # stride does not divide the step count
    ugly = tmp_path / "ugly.cfg"
    ugly.write_text("n = 64\ndt = 1e-3\nt_end = 0.02\nsnapshot_stride = 7\n")
    assert main(["simulate", "--config", str(ugly)]) == 2
    assert main(["gauge-check", "--traj", str(out), "--out",
                 str(tmp_path / "g"), "--assert"]) == 0


def test_cli_seed_override(tmp_path):
    cfg = tmp_path / "ns.cfg"
    cfg.write_text("samples = 3\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["norm-sweep", "--config", str(cfg), "--out", str(a),
                 "--seed", "5"]) == 0
    assert main(["norm-sweep", "--config", str(cfg), "--out", str(b),
                 "--seed", "6"]) == 0
    assert (a / "norm_sweep.csv").read_text() != (b / "norm_sweep.csv").read_text()


def test_write_csv_stable_format(tmp_path):
    rows = [{"a": 1, "b": 0.5}, {"a": 2, "b": float("nan")}]
    path = tmp_path / "t.csv"
    write_csv(path, rows, ["a", "b"])
    assert path.read_text() == "a,b\n1,0.5\n2,nan\n"


def test_stream_independence():
    a = stream(1, "x", 0).standard_normal(4)
    b = stream(1, "x", 1).standard_normal(4)
    c = stream(1, "y", 0).standard_normal(4)
    again = stream(1, "x", 0).standard_normal(4)
    assert np.all(a == again)
    assert not np.allclose(a, b)
    assert not np.allclose(a, c)
    with pytest.raises(ValueError):
        stream(1, "x", 2**32)
