#!/usr/bin/env python3
"""Cold-acquisition sweep over the channel phase offset.

Writes one summary row per run; optionally dumps per-run CSV traces.

    python scripts/run_lock_sweep.py [--n 0] [--out results/sweep]
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mesosync import defaults_130nm, run
from mesosync.reports import write_outputs
from mesosync.timebase import derive_seed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=0, help="whole-period channel delay")
    ap.add_argument("--step", type=float, default=0.02)
    ap.add_argument("--duration", type=float, default=8.0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    base = defaults_130nm()
    print("alpha,locked,lock_us,hot,phase_err_ui,ber,latency_max_t,excursion_max")
    i = 0
    alpha = 0.0
    while alpha < 1.0:
        scn = replace(base, alpha=round(alpha, 4), n=args.n,
                      duration_us=args.duration, seed=derive_seed(base.seed, i))
        m = run(scn, stop_after_lock_us=1.0)
        lock = "" if m.lock_time_fs is None else f"{m.lock_time_fs / 1e9:.3f}"
        err = "" if m.phase_error_ui is None else f"{m.phase_error_ui:+.4f}"
        lat = "" if m.latency_max_t is None else f"{m.latency_max_t:.3f}"
        exc = "" if m.excursion_max_divided is None else f"{m.excursion_max_divided:.2f}"
        print(f"{alpha:.2f},{str(m.locked).lower()},{lock},{m.final_hot},"
              f"{err},{m.ber_errors}/{m.ber_bits},{lat},{exc}")
        if args.out:
            write_outputs(m, Path(args.out) / f"alpha_{int(round(alpha * 100)):03d}")
        alpha += args.step
        i += 1


if __name__ == "__main__":
    main()
