#!/usr/bin/env python3
"""Half-period false-lock study: deterministic hold, stochastic escape,
and snapshot-restored starts.

    python scripts/run_false_lock.py [--seeds 20]
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mesosync import defaults_130nm, false_lock_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--phase1-us", type=float, default=2.0)
    args = ap.parse_args()

    scn = replace(defaults_130nm(), duration_us=8.0)
    rep = false_lock_experiment(scn, phase1_us=args.phase1_us, n_seeds=args.seeds)
    print(f"alpha at the wrong-edge equilibrium: {rep.alpha_used:.4f}")
    print(f"hold phase: |dVc| max {rep.hold_dvc_max * 1e3:.3f} mV over "
          f"{args.phase1_us} us, locked={rep.hold_locked}")
    print("stochastic seeds (escape_us, lock_us):")
    for seed, escaped, esc, lock in rep.stochastic_runs:
        print(f"  {'ok ' if escaped and lock else 'BAD'} "
              f"escape={esc and f'{esc:.3f}'} lock={lock and f'{lock:.3f}'}")
    print("snapshot-restored seeds (dwell_us, lock_us):")
    for seed, dwell, lock in rep.restored_runs:
        print(f"  dwell={dwell and f'{dwell:.4f}'} lock={lock and f'{lock:.3f}'}")
    print(f"all stochastic escaped and locked: {rep.all_stochastic_escaped_and_locked}")
    print(f"restored never false-locked: {rep.restored_never_false_locked}")


if __name__ == "__main__":
    main()
