"""Curve CSV / metadata JSON emission and a keyed store for finished runs.

CSV schema: header row, comma separated, 12 significant digits, columns
Theta,value,stderr,analytic,diff.  Each curve carries a JSON sidecar with
the run parameters, delta and n (midpoint convention), seed, sample count
and wall time, so any figure can be regenerated from metadata alone.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .estimators import CurveEstimate, analytic_curve
from .lattice import domain
from .sle import SleParams


def write_curve_csv(path, curve: CurveEstimate, params: SleParams = SleParams()) -> None:
    d = domain(curve.meta["domain"])
    ana = analytic_curve(d, curve.meta["observable"], curve.grid, params)
    with open(path, "w") as fh:
        fh.write("Theta,value,stderr,analytic,diff\n")
        for t, v, s, a in zip(curve.grid, curve.value, curve.stderr, ana):
            fh.write(f"{t:.12g},{v:.12g},{s:.12g},{a:.12g},{v - a:.12g}\n")


def write_meta_json(path, curve: CurveEstimate, extra: Optional[dict] = None) -> None:
    meta = {"version": __version__, "written_at": time.strftime("%Y-%m-%dT%H:%M:%S")}
    meta.update(curve.meta)
    if extra:
        meta.update(extra)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True, default=str)
        fh.write("\n")


def read_curve_csv(path) -> CurveEstimate:
    data = np.genfromtxt(path, delimiter=",", names=True)
    meta_path = Path(str(path)[:-4] + ".json" if str(path).endswith(".csv") else path)
    meta = {}
    if meta_path.exists():
        with open(meta_path) as fh:
            meta = json.load(fh)
    return CurveEstimate(
        grid=np.atleast_1d(data["Theta"]),
        value=np.atleast_1d(data["value"]),
        stderr=np.atleast_1d(data["stderr"]),
        meta=meta,
    )


def read_diff_curve(path) -> CurveEstimate:
    """The difference column of a stored curve, as a CurveEstimate."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    curve = read_curve_csv(path)
    curve.value = np.atleast_1d(data["diff"])
    curve.meta["diff"] = True
    return curve


def save_curve(base, curve: CurveEstimate, extra: Optional[dict] = None) -> None:
    base = Path(base)
    base.parent.mkdir(parents=True, exist_ok=True)
    # append rather than with_suffix: the base may contain dots (f=0.5)
    write_curve_csv(Path(str(base) + ".csv"), curve)
    write_meta_json(Path(str(base) + ".json"), curve, extra)


# ---------------------------------------------------------------------------
# keyed store for long simulations (used by the acceptance suite and the
# scripts so a finished multi-hour run is never repeated)

CACHE_ENV = "MANHATTAN_SLE_CACHE"


def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, Path(__file__).resolve().parents[2] / ".sim_cache"))


def _key(params: dict) -> str:
    blob = json.dumps(params, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:20]


def cached_run(name: str, params: dict, compute) -> list[CurveEstimate]:
    """Run `compute()` -> list[CurveEstimate] once per parameter set."""
    root = cache_dir() / f"{name}-{_key(params)}"
    manifest = root / "manifest.json"
    if manifest.exists():
        with open(manifest) as fh:
            count = json.load(fh)["curves"]
        return [read_curve_csv(root / f"curve{i}.csv") for i in range(count)]
    curves = compute()
    if isinstance(curves, CurveEstimate):
        curves = [curves]
    root.mkdir(parents=True, exist_ok=True)
    for i, c in enumerate(curves):
        save_curve(root / f"curve{i}", c, extra={"params": params})
    with open(manifest, "w") as fh:
        json.dump({"curves": len(curves), "params": params}, fh, indent=1, default=str)
    return curves
