"""Command line entry point.

    bogl <subcommand> [--config FILE] [--assert] [--seed K] [--out DIR] ...

Subcommands: simulate, gauge-check, lp-decompose, norm-sweep, bilinear-probe,
lipschitz-pairs, scaling-check, probe-suite.  Config files are "key = value"
lines with # comments; --seed overrides the config seed and --out picks the
run directory.  Exit codes: 0 success, 2 config error, 3 numeric failure,
4 acceptance-threshold violation in --assert mode.
"""

from __future__ import annotations

import argparse
import sys

from . import experiments
from .dynamics import IntegrationError
from .experiments import ConfigError

CSV_SCHEMAS = """\
CSV schemas
  simulate        diagnostics.csv: t, M, E, Linf (per snapshot)
  gauge-check     gauge_residual.csv: t, residual_L2, mean_term_L2
                  reconstruction.csv: t, rel_gap
  lp-decompose    lp_masses.csv: shell (0 = low part), mass (squared L2)
  norm-sweep      norm_sweep.csv: sample_id, s, b, x_norm, x_regroup, z_norm,
                  z_tilde, y_norm, l4, ratio_l4_x38
  bilinear-probe  <which>.csv: sample, lhs, rhs, ratio [, region_A, region_B,
                  region_C, pairing_total, closure_rel, g_dual_norm]
  lipschitz-pairs lipschitz.csv: sample, delta, ratio_l2, ratio_hs,
                  ratio_gauge_z; truncation.csv: sample, cutoff, err_l2
  scaling-check   scaling.csv: check, value, expected, rel_err
  probe-suite     one CSV/JSON pair per probe plus probe_suite_summary.json
Every run writes manifest.json (resolved config + sha256 of each output).
"""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bogl",
        description="Periodic Benjamin-Ono simulator and estimate-probe lab.",
        epilog=CSV_SCHEMAS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", help="key = value config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override seed")
        p.add_argument(
            "--assert",
            dest="assert_mode",
            action="store_true",
            help="exit 4 when an acceptance threshold is violated",
        )

    common(sub.add_parser("simulate", help="integrate the evolution"))
    p = sub.add_parser("gauge-check", help="gauge residual and reconstruction")
    p.add_argument("--traj", required=True, help="directory of snap_*.bin files")
    common(p, needs_config=False)
    p = sub.add_parser("lp-decompose", help="per-shell masses of a snapshot")
    p.add_argument("--input", required=True, help="snapshot file")
    common(p, needs_config=False)
    common(sub.add_parser("norm-sweep", help="space-time norm ensemble"))
    p = sub.add_parser("bilinear-probe", help="one bilinear/Leibniz estimate probe")
    p.add_argument("--which", default=None, help="probe name")
    p.add_argument("--s", type=float, default=None, help="Sobolev index")
    p.add_argument("--samples", type=int, default=None)
    common(p)
    common(sub.add_parser("lipschitz-pairs", help="same-low-frequency pairs"))
    common(sub.add_parser("scaling-check", help="dilation symmetry check"))
    common(sub.add_parser("probe-suite", help="run every probe"))
    return parser


def _load_config(args) -> tuple[dict, str | None]:
    raw = {}
    if getattr(args, "config", None):
        raw = experiments.parse_config_file(args.config)
    if args.seed is not None:
        raw["seed"] = str(args.seed)
    return raw, experiments.pop_out_dir(raw)


def _out_dir(args, config_out, default_name: str) -> str:
    if args.out:
        return args.out
    if config_out:
        return config_out
    return default_name


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        result = _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except FloatingPointError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    for a in result.assertions:
        status = "ok" if a.ok else "FAIL"
        detail = f" ({a.detail})" if a.detail else ""
        print(f"[{status}] {a.name}{detail}")
    print(f"outputs in {result.out_dir}")
    if args.assert_mode and not result.passed:
        return 4
    return 0


def _dispatch(args) -> experiments.RunResult:
    cmd = args.command
    if cmd == "gauge-check":
        return experiments.run_gauge_check(args.traj, _out_dir(args, None, "gauge_out"))
    if cmd == "lp-decompose":
        return experiments.run_lp_decompose(args.input, _out_dir(args, None, "lp_out"))
    raw, config_out = _load_config(args)
    if cmd == "simulate":
        return experiments.run_simulate(raw, _out_dir(args, config_out, "sim_out"))
    if cmd == "norm-sweep":
        return experiments.run_norm_sweep(raw, _out_dir(args, config_out, "norm_out"))
    if cmd == "bilinear-probe":
        if args.which is not None:
            raw["which"] = args.which
        if args.s is not None:
            raw["s"] = str(args.s)
        if args.samples is not None:
            raw["samples"] = str(args.samples)
        return experiments.run_bilinear_probe(
            raw, _out_dir(args, config_out, "bilinear_out")
        )
    if cmd == "lipschitz-pairs":
        return experiments.run_lipschitz_pairs(
            raw, _out_dir(args, config_out, "lipschitz_out")
        )
    if cmd == "scaling-check":
        return experiments.run_scaling_check(
            raw, _out_dir(args, config_out, "scaling_out")
        )
    if cmd == "probe-suite":
        return experiments.run_probe_suite(
            raw, _out_dir(args, config_out, "suite_out")
        )
    raise AssertionError(cmd)


if __name__ == "__main__":
    sys.exit(main())
