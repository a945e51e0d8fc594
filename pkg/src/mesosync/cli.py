"""Command-line front end: run, sweep and falselock subcommands.

Exit codes: 0 all assertions passed, 2 non-convergence, 3 timing violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .harness import false_lock_experiment, run, sweep
from .reports import summary_items, write_outputs
from .scenario import ScenarioError, apply_settings, load_scenario


def _parse_sets(pairs: list[str]) -> dict[str, str]:
    settings = {}
    for p in pairs:
        if "=" not in p:
            raise ScenarioError(f"--set expects key=value, got {p!r}")
        k, _, v = p.partition("=")
        settings[k.strip()] = v.strip()
    return settings


def _load(args) -> "Scenario":
    scn = load_scenario(args.scenario)
    if args.set:
        scn = apply_settings(scn, _parse_sets(args.set))
    if args.seed is not None:
        scn = replace(scn, seed=args.seed)
    if args.duration is not None:
        scn = replace(scn, duration_us=args.duration)
    return scn.validate()


def cmd_run(args) -> int:
    scn = _load(args)
    if scn.experiment == "falselock":
        return cmd_falselock(args)
    m = run(scn, collect_eye=args.out is not None)
    for key, value in summary_items(m):
        print(f"{key} = {value}")
    if args.out:
        write_outputs(m, args.out)
        print(f"outputs written to {Path(args.out).resolve()}")
    return m.exit_code


def cmd_sweep(args) -> int:
    scn = _load(args)
    grid = [g.strip() for g in args.grid.split(",") if g.strip()]
    if not grid:
        print("empty grid")
        return 0
    results = sweep(scn, args.param, grid, stop_after_lock_us=args.settle)
    worst = 0
    print("index,value,locked,lock_time_us,phase_error_ui,ber,latency_max_t,violations")
    for i, (v, m) in enumerate(zip(grid, results)):
        if m.error:
            print(f"{i},{v},error,{m.error}")
            worst = max(worst, 2)
            continue
        lock_us = "" if m.lock_time_fs is None else f"{m.lock_time_fs / 1e9:.3f}"
        perr = "" if m.phase_error_ui is None else f"{m.phase_error_ui:.4f}"
        lmax = "" if m.latency_max_t is None else f"{m.latency_max_t:.3f}"
        print(
            f"{i},{v},{str(m.locked).lower()},{lock_us},{perr},"
            f"{m.ber_errors}/{m.ber_bits},{lmax},{m.post_lock_violations}"
        )
        if args.out:
            write_outputs(m, Path(args.out) / f"point_{i:03d}")
        worst = max(worst, m.exit_code)
    return worst


def cmd_falselock(args) -> int:
    scn = _load(args)
    report = false_lock_experiment(scn, n_seeds=getattr(args, "seeds", 20))
    print(f"alpha_used = {report.alpha_used:.6f}")
    print(f"hold_dvc_max_mv = {report.hold_dvc_max * 1e3:.3f}")
    print(f"hold_locked = {str(report.hold_locked).lower()}")
    for seed, escaped, esc_us, lock_us in report.stochastic_runs:
        e = "-" if esc_us is None else f"{esc_us:.3f}"
        l = "-" if lock_us is None else f"{lock_us:.3f}"
        print(f"stochastic seed={seed} escaped={str(escaped).lower()} "
              f"escape_us={e} lock_us={l}")
    for seed, dwell_us, lock_us in report.restored_runs:
        d = "-" if dwell_us is None else f"{dwell_us:.4f}"
        l = "-" if lock_us is None else f"{lock_us:.3f}"
        print(f"restored seed={seed} dwell_us={d} lock_us={l}")
    ok = (
        report.hold_dvc_max < 0.010
        and not report.hold_locked
        and report.all_stochastic_escaped_and_locked
        and report.restored_never_false_locked
    )
    print(f"ok = {str(ok).lower()}")
    return 0 if ok else 2


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mesosync",
        description="Event-driven simulator of a mesochronous clock synchronizer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario", help="path to a .scn scenario file")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--duration", type=float, default=None,
                        help="simulated duration in microseconds")
    common.add_argument("--out", default=None, help="output directory for CSVs")
    common.add_argument("--set", action="append", default=[],
                        metavar="KEY=VALUE", help="override a scenario key")

    p_run = sub.add_parser("run", parents=[common], help="single simulation")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", parents=[common], help="parameter sweep")
    p_sweep.add_argument("--param", required=True, help="scenario key to sweep")
    p_sweep.add_argument("--grid", required=True, help="comma-separated values")
    p_sweep.add_argument("--settle", type=float, default=1.0,
                         help="extra simulated us after lock before stopping")
    p_sweep.set_defaults(func=cmd_sweep)

    p_fl = sub.add_parser("falselock", parents=[common],
                          help="false edge-lock study")
    p_fl.add_argument("--seeds", type=int, default=20)
    p_fl.set_defaults(func=cmd_falselock)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as e:
        print(f"scenario error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
