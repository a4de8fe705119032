"""Preset configurations for the standard comparison suite.

Each preset pins every parameter including the seed, so results are
reproducible and the keyed run store can serve finished simulations to
the test suite and the analysis scripts alike.
"""

from __future__ import annotations

from typing import Optional

from .artifacts import cached_run
from .estimators import CurveEstimate, RunParams, run_hitting, run_passright

F_LADDER = (0.125, 0.25, 0.5, 1.0)

# hitting runs: (domain, R0, R1, samples, seed)
HITTING_RUNS = {
    "hit-slit-125": ("slit", 125.0, 250.0, 10_000_000, 301),
    "hit-slit-250": ("slit", 250.0, 500.0, 10_000_000, 302),
    "hit-wedge90-125": ("wedge90", 125.0, 250.0, 10_000_000, 303),
    "hit-wedge90-250": ("wedge90", 250.0, 500.0, 10_000_000, 304),
    "hit-wedge270-125": ("wedge270", 125.0, 250.0, 10_000_000, 305),
    "hit-wedge270-250": ("wedge270", 250.0, 500.0, 10_000_000, 306),
}

# pass-right runs: (domain, RunParams)
PASSRIGHT_RUNS = {
    # discrepancy magnitude at n=93, also the small-N0 arm of the
    # spacing-insensitivity comparison
    "pass-slit-125k": (
        "slit",
        RunParams(N0=125_000, f=(1.0,), r=(0.05, 0.1), samples=1_000_000, master_seed=401),
    ),
    # n-scaling ladders
    "pass-slit-ladder": (
        "slit",
        RunParams(N0=100_000, f=F_LADDER, r=(0.05, 0.1), samples=1_000_000, master_seed=501),
    ),
    "pass-wedge90-ladder": (
        "wedge90",
        RunParams(N0=100_000, f=F_LADDER, r=(0.05, 0.1), samples=1_000_000, master_seed=502),
    ),
    # large-N0 arm of the spacing-insensitivity comparison
    "pass-slit-1m": (
        "slit",
        RunParams(N0=1_000_000, f=(1.0,), r=(0.05, 0.1), samples=1_000_000, master_seed=601),
    ),
    # percolation explorer at the ladder parameters
    "pass-explorer-ladder": (
        "halfplane",
        RunParams(N0=100_000, f=F_LADDER, r=(0.05, 0.1), samples=1_000_000, master_seed=701),
    ),
    # paper-scale wedge ladder: diagnostic for the n-scaling exponent at
    # the spacing the collapse was originally reported for
    "pass-wedge90-ladder-1m": (
        "wedge90",
        RunParams(N0=1_000_000, f=F_LADDER, r=(0.05, 0.1), samples=300_000, master_seed=901),
    ),
}


def hitting_preset(name: str, workers: Optional[int] = None) -> CurveEstimate:
    kind, r0, r1, samples, seed = HITTING_RUNS[name]
    params = {
        "kind": kind, "R0": r0, "R1": r1, "samples": samples, "seed": seed,
        "observable": "hitting", "grid": 512, "symmetrized": True,
    }
    return cached_run(
        name,
        params,
        lambda: run_hitting(kind, r0, r1, samples, master_seed=seed, workers=workers),
    )[0]


def passright_preset(name: str, workers: Optional[int] = None) -> list[CurveEstimate]:
    kind, rp = PASSRIGHT_RUNS[name]
    params = {
        "kind": kind, "N0": rp.N0, "f": list(rp.f_list), "r": list(rp.r_interval),
        "samples": rp.samples, "seed": rp.master_seed, "observable": "passright",
        "grid": 512, "symmetrized": True,
    }
    return cached_run(
        name, params, lambda: run_passright(kind, rp, workers=workers)
    )
