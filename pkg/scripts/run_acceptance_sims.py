"""Run every preset simulation the acceptance suite consumes.

Safe to re-run: finished runs are served from the keyed store.  Order is
longest-first so an interrupted session still banks the expensive runs.
"""

import argparse
import os
import time

from manhattan_sle import presets


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--workers", type=int, default=os.cpu_count())
    ap.add_argument("--only", nargs="*", help="subset of preset names")
    args = ap.parse_args()

    passright_order = [
        "pass-slit-1m",
        "pass-wedge90-ladder-1m",
        "pass-slit-125k",
        "pass-slit-ladder",
        "pass-wedge90-ladder",
        "pass-explorer-ladder",
    ]
    jobs = [(n, lambda n=n: presets.passright_preset(n, workers=args.workers))
            for n in passright_order]
    jobs += [(n, lambda n=n: presets.hitting_preset(n, workers=args.workers))
             for n in presets.HITTING_RUNS]
    for name, job in jobs:
        if args.only and name not in args.only:
            continue
        t0 = time.time()
        curves = job()
        if not isinstance(curves, list):
            curves = [curves]
        dt = time.time() - t0
        status = "cached" if dt < 5 else f"{dt/60:.1f} min"
        print(f"[{time.strftime('%H:%M:%S')}] {name}: {len(curves)} curve(s), {status}", flush=True)


if __name__ == "__main__":
    main()
