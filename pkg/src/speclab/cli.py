"""Command-line entry point.

Subcommands: spectra, closed-form, simulate, verify, report.
Exit codes: 0 success, 1 runtime failure, 2 configuration error.
"""

import argparse
import sys

import numpy as np

from .config import load_config
from .errors import ConfigError, SpeclabError
from .metrics import check_conditions
from .runner import closed_form, report, simulate, spectra_table
from .verify import SUITES, run_suite


def _parse_t_grid(raw):
    try:
        start, stop, count = raw.split(":")
        start, stop, count = float(start), float(stop), int(count)
        if count < 1 or stop < start:
            raise ValueError
    except ValueError:
        raise ConfigError(f"bad --t-grid {raw!r}, expected start:stop:count") from None
    return np.linspace(start, stop, count)


def _cmd_spectra(args):
    config = load_config(args.config)
    profile, rows = spectra_table(config)
    print(f"profile: k={profile.k} d={profile.d} mu={profile.mu} "
          f"sigma2={profile.sigma2} snr={profile.snr:g} t*={profile.t_star:.6f}")
    print(f"{'c':>3} {'user':>5} {'s_yx':>10} {'s_xx':>10} {'ratio':>10}")
    for r in rows:
        print(f"{r['component']:>3} {r['user_class']:>5} "
              f"{r['s_yx']:>10.6f} {r['s_xx']:>10.6f} {r['ratio']:>10.6f}")
    for theorem in ("B1_minority", "B1_balanced", "B4_minority", "B4_balanced"):
        cond = check_conditions(profile, theorem)
        state = "satisfied" if cond.satisfied else "not satisfied"
        print(f"{theorem}: {state} (margin {cond.margin:.6g})")
    if args.out:
        import os

        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "spectra.csv")
        with open(path, "w") as f:
            f.write("component,user_class,s_yx,s_xx,ratio\n")
            for r in rows:
                f.write(f"{r['component']},{r['user_class']},{r['s_yx']!r},"
                        f"{r['s_xx']!r},{r['ratio']!r}\n")
        print(f"wrote {path}")
    return 0


def _cmd_closed_form(args):
    config = load_config(args.config)
    algos = [a for a in args.algos.split(",") if a] if args.algos else []
    t_grid = _parse_t_grid(args.t_grid) if args.t_grid else np.arange(config.steps + 1, dtype=float)
    n = closed_form(config, algos, t_grid, args.out)
    print(f"wrote {n} trajectory rows for algos [{', '.join(algos)}] to {args.out}")
    return 0


def _cmd_simulate(args):
    config = load_config(args.config)
    if args.seeds:
        seeds = [int(s) for s in args.seeds.split(",") if s]
        config = __import__("dataclasses").replace(config, seeds=seeds)
    manifests = simulate(config, args.out)
    for m in manifests:
        print(f"{m.run_id}: {m.wall_time_s:.2f}s")
    print(f"wrote trajectory.csv and losses.csv to {args.out}")
    return 0


def _cmd_verify(args):
    checks = run_suite(args.suite)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if args.out and args.suite in ("theorems", "all"):
        import os

        from .verify import theorem_gap_rows

        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "gaps.csv")
        with open(path, "w") as f:
            f.write("theorem,step_or_time,gap,bound\n")
            for theorem, t, gap, bound in theorem_gap_rows():
                f.write(f"{theorem},{t!r},{gap!r},{bound!r}\n")
        print(f"wrote {path}")
    return 1 if failed else 0


def _cmd_report(args):
    rows = report(args.losses)
    print(f"{'run_id':<40} {'t':>8} {'balanced':>12} {'worst':>12}")
    for r in rows:
        print(f"{r['run_id']:<40} {r['step_or_time']:>8} "
              f"{r['balanced_loss']:>12.6f} {r['worst_loss']:>12.6f}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="speclab",
        description="Spectrum-aware matrix optimizer laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectra", help="print the population spectra of a config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_spectra)

    p = sub.add_parser("closed-form", help="emit analytic trajectories as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--algos", default="")
    p.add_argument("--t-grid", default=None, help="start:stop:count")
    p.set_defaults(func=_cmd_closed_form)

    p = sub.add_parser("simulate", help="run discrete optimizers and emit CSVs")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seeds", default=None, help="comma-separated seed list")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="all", choices=SUITES)
    p.add_argument("--out", default=None, help="export theorem gap curves as CSV")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("report", help="aggregate a losses.csv")
    p.add_argument("--losses", required=True)
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except SpeclabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
