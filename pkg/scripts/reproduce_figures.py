"""Desk-scale versions of the standard comparison figures, as CSV files.

Writes, under --outdir:
  hitting difference curves for the three domains at two radius windows,
  the sawtooth vs averaged comparison at one fixed radius,
  pass-right difference curves for the slit-plane n ladder,
  their rescaled versions with p = 0.24,
  the percolation-explorer analogues.

Sample counts default to a few 10^5 so the whole script finishes in tens
of minutes on a laptop; pass --samples to scale up.
"""

import argparse
import os
from pathlib import Path

from manhattan_sle import domain
from manhattan_sle.artifacts import save_curve
from manhattan_sle.estimators import (
    RunParams,
    difference_curve,
    estimate_exponent,
    rescale_curves,
    run_hitting,
    run_passright,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="figures")
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--workers", type=int, default=os.cpu_count())
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    for kind in ("slit", "wedge90", "wedge270"):
        for r0, r1 in ((125, 250), (250, 500)):
            curve = run_hitting(
                kind, r0, r1, args.samples, master_seed=args.seed, workers=args.workers
            )
            save_curve(out / f"hit-{kind}-{r0}-{r1}", curve)
            print(f"hit-{kind}-{r0}-{r1} done", flush=True)

    fixed = run_hitting("slit", 375, 375, args.samples, master_seed=args.seed + 1,
                        workers=args.workers)
    save_curve(out / "hit-slit-fixed375", fixed)
    print("sawtooth comparison done", flush=True)

    ladder = RunParams(
        N0=100_000,
        f=(0.125, 0.25, 0.5, 1.0),
        r=(0.05, 0.1),
        samples=args.samples,
        master_seed=args.seed + 2,
    )
    for kind in ("slit", "halfplane"):
        curves = run_passright(kind, ladder, workers=args.workers)
        diffs = [difference_curve(c, domain(kind), "passright") for c in curves]
        for c, dcurve in zip(curves, diffs):
            save_curve(out / f"pass-{kind}-f{c.meta['f']:g}", c)
        est = estimate_exponent(diffs)
        print(f"{kind}: p_hat = {est.p_hat:.3f} (residual {est.residual:.3f})")
        for r in rescale_curves(diffs, 0.24):
            base = out / f"pass-{kind}-n{r.meta['n']:.1f}-rescaled"
            save_curve(base, r)
        print(f"pass-{kind} ladder done", flush=True)


if __name__ == "__main__":
    main()
