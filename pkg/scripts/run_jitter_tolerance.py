#!/usr/bin/env python3
"""Jitter tolerance at lock: correlated low-frequency and uncorrelated
high-frequency sinusoidal jitter, swept over amplitude.

    python scripts/run_jitter_tolerance.py [--freq-mhz 50] [--correlated]
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mesosync import defaults_130nm, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--freq-mhz", type=float, default=50.0)
    ap.add_argument("--correlated", action="store_true")
    ap.add_argument("--amps", default="0.05,0.1,0.2,0.3,0.4,0.45")
    ap.add_argument("--duration", type=float, default=12.0)
    args = ap.parse_args()

    base = replace(defaults_130nm(), alpha=0.62, duration_us=args.duration)
    if args.correlated:
        base = replace(base, correlated=True, dll_mode="tracking", loop_bw_hz=100e6)
    else:
        base = replace(base, correlated=False)

    print("amp_ui,locked,ber,errors,vc_pp_mv,latency_max_t")
    for amp in (float(a) for a in args.amps.split(",")):
        scn = replace(base, tx_sin_amp_ui=amp, tx_sin_freq_hz=args.freq_mhz * 1e6)
        m = run(scn, measure_from_us=2.0)
        vpp = "" if m.vc_peak_to_peak_post_lock is None else \
            f"{m.vc_peak_to_peak_post_lock * 1e3:.1f}"
        lat = "" if m.latency_max_t is None else f"{m.latency_max_t:.3f}"
        ber = "" if not m.ber_bits else f"{m.ber_errors / m.ber_bits:.2e}"
        print(f"{amp},{str(m.locked).lower()},{ber},{m.ber_errors},{vpp},{lat}")


if __name__ == "__main__":
    main()
