#!/usr/bin/env python3
"""Cold-start vs snapshot-restored lock times over a seed sweep.

    python scripts/run_snapshot_relock.py [--alpha 0.3] [--seeds 20]
"""

import argparse
import statistics
import sys
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mesosync import defaults_130nm, run
from mesosync.timebase import derive_seed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--alpha", type=float, default=0.3)
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()

    base = replace(defaults_130nm(), alpha=args.alpha, duration_us=8.0)
    ref = run(base, stop_after_lock_us=0.2)
    if not ref.locked:
        print("reference run failed to lock")
        return
    print(f"reference lock at hot index {ref.final_hot}")
    print("seed,cold_us,snapshot_us")
    cold, snap = [], []
    for i in range(args.seeds):
        seed = derive_seed(4242, i)
        mc = run(replace(base, seed=seed), stop_after_lock_us=0.1)
        ms = run(replace(base, seed=seed, snapshot_hot=ref.final_hot),
                 stop_after_lock_us=0.1)
        cold.append(mc.lock_time_fs)
        snap.append(ms.lock_time_fs)
        print(f"{i},{mc.lock_time_fs / 1e9:.3f},{ms.lock_time_fs / 1e9:.3f}")
    print(f"median cold {statistics.median(cold) / 1e9:.3f} us, "
          f"median snapshot {statistics.median(snap) / 1e9:.3f} us, "
          f"ratio {statistics.median(snap) / statistics.median(cold):.3f}")


if __name__ == "__main__":
    main()
