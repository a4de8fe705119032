"""Monte Carlo accumulation, curve estimates, and the n^-p analysis.

Per-sample radius averaging: each sample draws R uniformly from [R0, R1],
which realizes the interval average of the observable.  Effective lattice
spacing and walk length for (N0, f, r) runs:

    delta = 1 / (r * N0^nu),     n = f / r^(1/nu),     nu = 4/7,

reported at the midpoint of the r interval.

Accumulators hold integer counts only, so merging partial results from
any worker partition is exact and order-independent.
"""

from __future__ import annotations

import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .lattice import DOMAIN_CODES, HALF_PLANE, DomainSpec, RangeError, domain
from .sle import SleParams, hitting_cdf, pass_right_cdf
from .walker import CrossingRecord

NU_DEFAULT = 4.0 / 7.0
GRID_DEFAULT = 512
TWO_PI = 2.0 * math.pi


class ModelViolationError(RuntimeError):
    """A trapped walk or mirror inconsistency surfaced in a bulk run."""


class ResourceLimitError(RuntimeError):
    """A kernel scratch buffer or bitmap limit was exceeded."""


@dataclass(frozen=True)
class RunParams:
    """Parameters of a pass-right style run (N0, f, r) or a hitting run
    (R_interval).  `r` may be a scalar or an (r_lo, r_hi) interval; f may
    be a single fraction or a list (prefixes of the same walks)."""

    N0: int = 0
    f: Sequence[float] = (1.0,)
    r: Sequence[float] = (0.075,)
    nu: float = NU_DEFAULT
    R_interval: Optional[tuple[float, float]] = None
    samples: int = 1_000_000
    master_seed: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise RangeError("samples >= 1 required")
        fs = self.f_list
        if any(not (0.0 < f <= 1.0) for f in fs):
            raise RangeError("usable fractions must lie in (0, 1]")
        if self.N0:
            if any(int(f * self.N0) < 1 for f in fs):
                raise RangeError("f*N0 must round down to at least one step")
            lo, hi = self.r_interval
            if not (0 < lo <= hi):
                raise RangeError("invalid r interval")

    @property
    def f_list(self) -> tuple[float, ...]:
        return tuple(self.f) if isinstance(self.f, (tuple, list)) else (float(self.f),)

    @property
    def r_interval(self) -> tuple[float, float]:
        if isinstance(self.r, (tuple, list)):
            lo, hi = (self.r[0], self.r[-1]) if len(self.r) > 1 else (self.r[0],) * 2
        else:
            lo = hi = float(self.r)
        return float(lo), float(hi)


def effective_params(rp: RunParams) -> tuple[float, np.ndarray]:
    """(delta, n per usable fraction) at the midpoint of the r interval."""
    lo, hi = rp.r_interval
    r_mid = 0.5 * (lo + hi)
    delta = 1.0 / (r_mid * rp.N0**rp.nu)
    n = np.array([f / r_mid ** (1.0 / rp.nu) for f in rp.f_list])
    return delta, n


def make_grid(d: DomainSpec, grid_size: int = GRID_DEFAULT) -> np.ndarray:
    """grid_size uniform Theta points strictly inside the domain range."""
    j = np.arange(1, grid_size + 1)
    theta = d.theta_min + j * (d.theta_max - d.theta_min) / (grid_size + 1)
    return theta / TWO_PI


@dataclass
class CurveEstimate:
    grid: np.ndarray  # Theta values in [0, 1]
    value: np.ndarray
    stderr: np.ndarray
    meta: dict = field(default_factory=dict)

    def copy(self) -> "CurveEstimate":
        return CurveEstimate(
            self.grid.copy(), self.value.copy(), self.stderr.copy(), dict(self.meta)
        )


def _binom_stderr(v: np.ndarray, m: int) -> np.ndarray:
    return np.sqrt(np.clip(v * (1.0 - v), 0.0, None) / max(m, 1))


@dataclass
class HittingAccumulator:
    """Empirical first-hit CDF counts on the Theta grid."""

    domain: DomainSpec
    grid_size: int = GRID_DEFAULT
    hist: np.ndarray = None
    samples: int = 0
    rejects: int = 0

    def __post_init__(self):
        if self.hist is None:
            self.hist = np.zeros(self.grid_size + 1, dtype=np.int64)

    def add(self, rec: CrossingRecord) -> "HittingAccumulator":
        if rec.first_hit_angle is None:
            self.rejects += 1
            return self
        # samples landing exactly on a grid angle count at that grid point
        # (CDF is P(theta <= theta_j)); almost surely identical to the
        # kernel's floor binning
        grid_theta = make_grid(self.domain, self.grid_size) * TWO_PI
        k = int(np.searchsorted(grid_theta, rec.first_hit_angle, side="left"))
        self.hist[min(max(k, 0), self.grid_size)] += 1
        self.samples += 1
        return self

    def merge(self, other: "HittingAccumulator") -> "HittingAccumulator":
        if other.grid_size != self.grid_size or other.domain.kind != self.domain.kind:
            raise ValueError("accumulator shape mismatch")
        return HittingAccumulator(
            self.domain,
            self.grid_size,
            self.hist + other.hist,
            self.samples + other.samples,
            self.rejects + other.rejects,
        )

    def to_curve(self, meta: Optional[dict] = None) -> CurveEstimate:
        grid = make_grid(self.domain, self.grid_size)
        below = np.cumsum(self.hist)[: self.grid_size]
        value = below / max(self.samples, 1)
        m = dict(meta or {})
        m.update(
            domain=self.domain.kind,
            observable="hitting",
            samples=self.samples,
            rejects=self.rejects,
        )
        return CurveEstimate(grid, value, _binom_stderr(value, self.samples), m)


def accumulate_hitting(
    acc: HittingAccumulator, rec: CrossingRecord, d: DomainSpec
) -> HittingAccumulator:
    assert acc.domain.kind == d.kind
    return acc.add(rec)


@dataclass
class PassrightAccumulator:
    """Pass-right parity counts on the Theta grid (single usable length)."""

    domain: DomainSpec
    grid_size: int = GRID_DEFAULT
    max_step: Optional[int] = None  # crossings at steps >= max_step ignored
    counts: np.ndarray = None
    samples: int = 0

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros(self.grid_size, dtype=np.int64)

    def add(self, rec: CrossingRecord) -> "PassrightAccumulator":
        d = self.domain
        grid_theta = make_grid(d, self.grid_size) * TWO_PI
        angles = np.asarray(rec.crossings)
        if self.max_step is not None and len(angles):
            steps = np.asarray(rec.crossing_steps)
            angles = angles[steps < self.max_step]
        below = np.searchsorted(np.sort(angles), grid_theta, side="left")
        self.counts += (below & 1).astype(np.int64)
        self.samples += 1
        return self

    def merge(self, other: "PassrightAccumulator") -> "PassrightAccumulator":
        if other.grid_size != self.grid_size or other.domain.kind != self.domain.kind:
            raise ValueError("accumulator shape mismatch")
        return PassrightAccumulator(
            self.domain,
            self.grid_size,
            self.max_step,
            self.counts + other.counts,
            self.samples + other.samples,
        )

    def to_curve(self, meta: Optional[dict] = None) -> CurveEstimate:
        grid = make_grid(self.domain, self.grid_size)
        value = self.counts / max(self.samples, 1)
        m = dict(meta or {})
        m.update(
            domain=self.domain.kind, observable="passright", samples=self.samples
        )
        return CurveEstimate(grid, value, _binom_stderr(value, self.samples), m)


def accumulate_passright(
    acc: PassrightAccumulator, rec: CrossingRecord, d: DomainSpec
) -> PassrightAccumulator:
    assert acc.domain.kind == d.kind
    return acc.add(rec)


def analytic_curve(
    d: DomainSpec, observable: str, grid: np.ndarray, params: SleParams = SleParams()
) -> np.ndarray:
    theta = grid * TWO_PI
    if observable == "hitting":
        return np.asarray(hitting_cdf(d, theta))
    if observable == "passright":
        return np.asarray(pass_right_cdf(d, theta, params))
    raise RangeError(f"unknown observable {observable!r}")


def difference_curve(
    emp: CurveEstimate,
    d: DomainSpec,
    observable: str,
    params: SleParams = SleParams(),
    analytic: Optional[CurveEstimate] = None,
) -> CurveEstimate:
    """Empirical minus analytic on the same grid; stderr carried through."""
    if analytic is not None:
        if analytic.grid.shape != emp.grid.shape or not np.allclose(
            analytic.grid, emp.grid, rtol=0, atol=1e-15
        ):
            raise ValueError("grid mismatch between empirical and analytic curves")
        ana = analytic.value
    else:
        ana = analytic_curve(d, observable, emp.grid, params)
    out = emp.copy()
    out.value = emp.value - ana
    out.meta["diff"] = True
    return out


def total_variation(curve: CurveEstimate) -> float:
    return float(np.sum(np.abs(np.diff(curve.value))))


def rescale_curves(curves: Sequence[CurveEstimate], p: float) -> list[CurveEstimate]:
    """Multiply the k-th curve (ordered by n, smallest unscaled) by 2^(kp).
    Requires the n values to form a geometric sequence with ratio 2."""
    if len(curves) < 2:
        raise ValueError("need at least two curves to rescale")
    ordered = sorted(curves, key=lambda c: c.meta["n"])
    ns = np.array([c.meta["n"] for c in ordered])
    ratios = ns[1:] / ns[:-1]
    if not np.allclose(ratios, 2.0, rtol=1e-6):
        raise ValueError(f"n values {ns} are not a ratio-2 geometric sequence")
    out = []
    for k, c in enumerate(ordered):
        s = c.copy()
        factor = 2.0 ** (k * p)
        s.value = s.value * factor
        s.stderr = s.stderr * factor
        s.meta["rescale_factor"] = factor
        out.append(s)
    return out


@dataclass
class ExponentEstimate:
    p_hat: float
    residual: float
    norms: np.ndarray
    ns: np.ndarray
    ill_conditioned: bool = False


def estimate_exponent(curves: Sequence[CurveEstimate]) -> ExponentEstimate:
    """Least-squares slope of log ||diff||_2 against log n (p_hat = -slope).
    The norm is RMS over the grid; the residual is always reported since
    the fit is a crude summary."""
    if len(curves) < 3:
        raise ValueError("need at least three curves to estimate the exponent")
    ordered = sorted(curves, key=lambda c: c.meta["n"])
    ns = np.array([c.meta["n"] for c in ordered])
    ratios = ns[1:] / ns[:-1]
    if not np.allclose(ratios, 2.0, rtol=1e-6):
        raise ValueError(f"n values {ns} are not a ratio-2 geometric sequence")
    norms = np.array([math.sqrt(float(np.mean(c.value**2))) for c in ordered])
    ill = False
    tiny = np.array([float(np.max(np.abs(c.stderr), initial=0.0)) for c in ordered])
    if np.any(norms <= 2.0 * tiny) or np.any(norms == 0.0):
        ill = True
        warnings.warn("a difference curve has near-zero norm; p estimate is ill-conditioned")
    x = np.log(ns)
    y = np.log(np.maximum(norms, 1e-300))
    coef = np.polyfit(x, y, 1)
    fit = np.polyval(coef, x)
    residual = float(np.sqrt(np.mean((y - fit) ** 2)))
    return ExponentEstimate(-float(coef[0]), residual, norms, ns, ill)


# ---------------------------------------------------------------------------
# bulk run drivers


@dataclass
class RunStats:
    traps: int = 0
    redraws: int = 0
    rejects: int = 0
    steps: int = 0
    overflow: int = 0
    wall_time: float = 0.0

    def merge(self, counters: np.ndarray) -> None:
        self.traps += int(counters[kernels.C_TRAPS])
        self.redraws += int(counters[kernels.C_REDRAWS])
        self.rejects += int(counters[kernels.C_REJECTS])
        self.steps += int(counters[kernels.C_STEPS])
        self.overflow += int(counters[kernels.C_OVERFLOW])


def _chunks(samples: int, workers: int) -> list[tuple[int, int]]:
    base = samples // workers
    rem = samples % workers
    out = []
    start = 0
    for w in range(workers):
        count = base + (1 if w < rem else 0)
        if count:
            out.append((start, count))
        start += count
    return out


def _hitting_chunk(args):
    (kind, twin, r_lo, r_hi, start_index, count, master_seed, grid_size) = args
    d = domain(kind)
    if twin:
        d = d.mirror_twin
    code = DOMAIN_CODES[kind]
    half = int(math.ceil(r_hi)) + 3
    side = 2 * half + 1
    if side * side * 4 > 1 << 32:
        raise ResourceLimitError(f"R1={r_hi} needs a visited bitmap over 4 GiB")
    stamp = np.zeros(side * side, dtype=np.int32)
    hist = np.zeros(grid_size + 1, dtype=np.int64)
    counters = np.zeros(kernels.N_COUNTERS, dtype=np.int64)
    kernels.hitting_kernel(
        code,
        d.slit_x0,
        d.pole.x,
        d.pole.y,
        d.start.x,
        d.start.y,
        float(r_lo),
        float(r_hi),
        count,
        start_index,
        np.uint64(master_seed & (2**64 - 1)),
        hist,
        grid_size,
        d.theta_min,
        d.theta_max - d.theta_min,
        stamp,
        side,
        half,
        counters,
    )
    return hist, counters


def _run_chunked(worker, arg_builder, samples, workers, twin_split=0):
    """Run `samples` in worker chunks; sample indices [0, twin_split) use
    the primary lattice realization and the rest its mirror twin, so the
    partition across workers never affects the result."""
    workers = workers or os.cpu_count() or 1
    parts = []
    if twin_split <= 0 or twin_split >= samples:
        parts.append((False, 0, samples))
    else:
        parts.append((False, 0, twin_split))
        parts.append((True, twin_split, samples - twin_split))
    tasks = []
    for twin, base, count in parts:
        share = max(1, round(workers * count / samples))
        for start, n in _chunks(count, share):
            tasks.append(arg_builder(twin, base + start, n))
    if workers == 1 or len(tasks) == 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(worker, tasks))


def run_hitting(
    kind: str,
    R0: float,
    R1: float,
    samples: int,
    master_seed: int = 1,
    workers: Optional[int] = None,
    grid_size: int = GRID_DEFAULT,
    symmetrize: bool = True,
) -> CurveEstimate:
    """Monte Carlo first-hit CDF with R ~ U[R0, R1] (R0 == R1 allowed).

    With symmetrize (default), half the samples run on the domain's
    mirror-twin lattice realization, cancelling the odd finite-R lattice
    correction; pass False to study a single realization (the small-R
    enumeration oracle compares each realization separately)."""
    d = domain(kind)
    if kind not in DOMAIN_CODES:
        raise RangeError(f"hitting runs need a lattice domain, not {kind!r}")
    if not (1.0 < R0 <= R1):
        raise RangeError("need 1 < R0 <= R1")
    twin_split = samples - samples // 2 if (symmetrize and d.mirror_twin) else 0
    t0 = time.monotonic()
    results = _run_chunked(
        _hitting_chunk,
        lambda twin, start, count: (
            kind, twin, R0, R1, start, count, master_seed, grid_size,
        ),
        samples,
        workers,
        twin_split,
    )
    acc = HittingAccumulator(d, grid_size)
    stats = RunStats()
    for hist, counters in results:
        acc.hist += hist
        stats.merge(counters)
    acc.samples = samples - stats.rejects
    acc.rejects = stats.rejects
    if stats.traps:
        raise ModelViolationError(f"{stats.traps} trapped walks in {kind} hitting run")
    stats.wall_time = time.monotonic() - t0
    meta = {
        "R0": R0,
        "R1": R1,
        "delta": 2.0 / (R0 + R1),
        "n": None,
        "master_seed": master_seed,
        "redraws": stats.redraws,
        "wall_time": stats.wall_time,
        "total_steps": stats.steps,
    }
    return acc.to_curve(meta)


CROSS_BUFFER = 1 << 16


def _passright_chunk(args):
    (kind, twin, r_lo, r_hi, n0, f_steps, start_index, count, master_seed, grid_size) = args
    d = domain(kind)
    if twin:
        d = d.mirror_twin
    if n0 > kernels.COORD_LIMIT:
        raise ResourceLimitError(
            f"N0={n0} exceeds the packed-coordinate limit {kernels.COORD_LIMIT}"
        )
    grid_rel = make_grid(d, grid_size) * TWO_PI - d.theta_min
    log2size = max(16, int(math.ceil(math.log2(3 * (n0 + 2)))))
    table = np.zeros(1 << log2size, dtype=np.uint64)
    cross_angle = np.zeros(CROSS_BUFFER, dtype=np.float64)
    cross_step = np.zeros(CROSS_BUFFER, dtype=np.int64)
    out_counts = np.zeros((len(f_steps), grid_size), dtype=np.int64)
    counters = np.zeros(kernels.N_COUNTERS, dtype=np.int64)
    if kind == "halfplane":
        kernels.explorer_passright_kernel(
            float(r_lo),
            float(r_hi),
            n0,
            np.asarray(f_steps, dtype=np.int64),
            count,
            start_index,
            np.uint64(master_seed & (2**64 - 1)),
            grid_rel,
            out_counts,
            table,
            log2size,
            cross_angle,
            cross_step,
            counters,
        )
    else:
        code = DOMAIN_CODES[kind]
        kernels.passright_kernel(
            code,
            d.slit_x0,
            d.pole.x,
            d.pole.y,
            d.start.x,
            d.start.y,
            float(r_lo),
            float(r_hi),
            n0,
            np.asarray(f_steps, dtype=np.int64),
            count,
            start_index,
            np.uint64(master_seed & (2**64 - 1)),
            grid_rel,
            out_counts,
            table,
            log2size,
            cross_angle,
            cross_step,
            d.theta_min,
            d.theta_max - d.theta_min,
            counters,
        )
    return out_counts, counters


def run_passright(
    kind: str,
    rp: RunParams,
    workers: Optional[int] = None,
    grid_size: int = GRID_DEFAULT,
    symmetrize: bool = True,
) -> list[CurveEstimate]:
    """Pass-right curves for every usable fraction in rp.f (one walk set,
    prefix reuse).  `kind` may be a lattice domain or 'halfplane' for the
    percolation explorer."""
    d = domain(kind)
    if not rp.N0:
        raise RangeError("pass-right runs need N0")
    r_lo, r_hi = rp.r_interval
    R_lo = r_lo * rp.N0**rp.nu
    R_hi = r_hi * rp.N0**rp.nu
    if R_lo <= 2.0:
        raise RangeError("r*N0^nu must exceed 2 so the start is inside the circle")
    fs = sorted(rp.f_list)
    f_steps = [int(f * rp.N0) for f in fs]
    twin_split = (
        rp.samples - rp.samples // 2 if (symmetrize and d.mirror_twin) else 0
    )
    t0 = time.monotonic()
    results = _run_chunked(
        _passright_chunk,
        lambda twin, start, count: (
            kind,
            twin,
            R_lo,
            R_hi,
            rp.N0,
            f_steps,
            start,
            count,
            rp.master_seed,
            grid_size,
        ),
        rp.samples,
        workers,
        twin_split,
    )
    counts = np.zeros((len(fs), grid_size), dtype=np.int64)
    stats = RunStats()
    for out_counts, counters in results:
        counts += out_counts
        stats.merge(counters)
    if stats.traps:
        raise ModelViolationError(f"{stats.traps} trapped walks in {kind} run")
    if stats.overflow:
        raise ResourceLimitError(
            f"{stats.overflow} samples overflowed the crossing buffer"
        )
    stats.wall_time = time.monotonic() - t0
    r_mid = 0.5 * (r_lo + r_hi)
    delta = 1.0 / (r_mid * rp.N0**rp.nu)
    ns = [f / r_mid ** (1.0 / rp.nu) for f in fs]
    grid = make_grid(d, grid_size)
    curves = []
    m_samples = rp.samples - stats.rejects
    for i, f in enumerate(fs):
        value = counts[i] / max(m_samples, 1)
        meta = {
            "domain": kind,
            "observable": "passright",
            "samples": m_samples,
            "N0": rp.N0,
            "f": f,
            "r_lo": r_lo,
            "r_hi": r_hi,
            "nu": rp.nu,
            "R0": R_lo,
            "R1": R_hi,
            "delta": delta,
            "n": float(ns[i]),
            "master_seed": rp.master_seed,
            "redraws": stats.redraws,
            "wall_time": stats.wall_time,
            "total_steps": stats.steps,
        }
        curves.append(CurveEstimate(grid, value, _binom_stderr(value, m_samples), meta))
    return curves
