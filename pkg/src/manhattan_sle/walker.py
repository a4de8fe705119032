"""Non-intersecting walk generation and circle-crossing observables.

This is the reference implementation: clear, per-sample, pure Python.
Bulk simulation goes through kernels.py, which is tested step-for-step
equivalent to generate_walk on shared seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from .lattice import DomainSpec, Site, outgoing_directions
from .rng import SampleStream


class TrappedWalkError(RuntimeError):
    """Both outgoing sites dead.  Must never happen in a supported domain;
    an occurrence is a model violation, not a recoverable condition."""


class DegenerateRadiusError(ValueError):
    """R coincides with a site radius; the caller must redraw R."""


@dataclass(frozen=True)
class FirstCircleHit:
    radius: float

    def __post_init__(self):
        if not self.radius > 1.0:
            raise ValueError("FirstCircleHit requires R > 1")


@dataclass(frozen=True)
class StepCount:
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("StepCount requires N >= 1")


StopRule = Union[FirstCircleHit, StepCount]


@dataclass
class Walk:
    domain: DomainSpec
    sites: list[Site]

    @property
    def steps(self) -> int:
        return len(self.sites) - 1


@dataclass
class CrossingRecord:
    """Sufficient statistic for both observables: the chronologically first
    hit angle (if the walk reached radius R) plus every circle crossing,
    sorted by angle, with the generating step index carried alongside."""

    first_hit_angle: Optional[float]
    crossings: list[float] = field(default_factory=list)
    crossing_steps: list[int] = field(default_factory=list)


def generate_walk(d: DomainSpec, stop: StopRule, stream: SampleStream) -> Walk:
    """Grow one walk from d.start until the stop rule fires.

    Two-choice steps consume one fair bit (0 -> horizontal); forced steps
    consume nothing.  FirstCircleHit stops with the first edge whose far
    endpoint has squared distance > R^2 from the pole.
    """
    start = d.start
    if d.is_boundary(start):
        raise ValueError("start lies on the boundary")
    cx, cy = d.pole
    hit = isinstance(stop, FirstCircleHit)
    if hit:
        r2 = stop.radius * stop.radius
        dx, dy = start.x - cx, start.y - cy
        if dx * dx + dy * dy >= r2:
            raise ValueError("start must be strictly inside the stop circle")
    visited = {start}
    sites = [start]
    x, y = start
    while True:
        (hx, _), (_, vy) = outgoing_directions((x, y))
        cands = []
        for nx, ny in ((x + hx, y), (x, y + vy)):
            if (nx, ny) not in visited and not d.boundary(nx, ny):
                cands.append((nx, ny))
        if not cands:
            raise TrappedWalkError(f"trapped at ({x}, {y}) in {d.kind}")
        if len(cands) == 2:
            x, y = cands[stream.coin()]
        else:
            x, y = cands[0]
        site = Site(x, y)
        visited.add(site)
        sites.append(site)
        if hit:
            dx, dy = x - cx, y - cy
            d2 = dx * dx + dy * dy
            if d2 == r2:
                raise DegenerateRadiusError(
                    f"site ({x}, {y}) lies exactly on the circle R={stop.radius}"
                )
            if d2 > r2:
                return Walk(d, sites)
        elif len(sites) == stop.steps + 1:
            return Walk(d, sites)


def validate_walk(w: Walk) -> None:
    """Raise if any Walk invariant fails."""
    d = w.domain
    if not w.sites:
        raise ValueError("empty walk")
    if w.sites[0] != d.start:
        raise ValueError("walk does not begin at the domain start")
    if len(set(w.sites)) != len(w.sites):
        raise ValueError("site revisited")
    for i, s in enumerate(w.sites):
        if d.is_boundary(s):
            raise ValueError(f"boundary site {s} visited at index {i}")
    for (x0, y0), (x1, y1) in zip(w.sites, w.sites[1:]):
        (hx, _), (_, vy) = outgoing_directions((x0, y0))
        if (x1 - x0, y1 - y0) not in ((hx, 0), (0, vy)):
            raise ValueError(
                f"illegal step ({x0},{y0}) -> ({x1},{y1}) against orientation"
            )


def segment_crossings(points, radius: float, pole, wrap) -> CrossingRecord:
    """Circle crossings of a polyline against |z - pole| = radius.

    `points` is a sequence of (x, y) floats or ints; `wrap` maps an atan2
    angle into the domain's angular range.  Each edge contributes 0, 1 or 2
    crossings via the quadratic for segment-circle intersection.
    """
    r2 = radius * radius
    cx, cy = pole
    ang: list[float] = []
    steps: list[int] = []
    first: Optional[float] = None
    px, py = points[0]
    ax, ay = px - cx, py - cy
    a2 = ax * ax + ay * ay
    if a2 == r2:
        raise DegenerateRadiusError("walk site exactly on the circle")
    inside = a2 < r2
    for i in range(1, len(points)):
        qx, qy = points[i]
        ex, ey = qx - px, qy - py  # unit-length edge
        bx, by = px - cx, py - cy
        b2 = bx * bx + by * by
        nx_, ny_ = qx - cx, qy - cy
        n2 = nx_ * nx_ + ny_ * ny_
        if n2 == r2:
            raise DegenerateRadiusError("walk site exactly on the circle")
        new_inside = n2 < r2
        roots: list[float] = []
        bdot = bx * ex + by * ey
        if inside != new_inside:
            disc = math.sqrt(bdot * bdot - (b2 - r2))
            roots.append(-bdot + disc if inside else -bdot - disc)
        elif not inside:
            # both endpoints outside: a near-tangent edge can cross twice
            if -1.0 < bdot < 0.0 and b2 - bdot * bdot < r2:
                disc = math.sqrt(bdot * bdot - (b2 - r2))
                roots.extend((-bdot - disc, -bdot + disc))
        for t in roots:
            theta = wrap(math.atan2(by + t * ey, bx + t * ex))
            ang.append(theta)
            steps.append(i - 1)
            if first is None:
                first = theta
        inside = new_inside
        px, py = qx, qy
    order = sorted(range(len(ang)), key=ang.__getitem__)
    return CrossingRecord(
        first_hit_angle=first,
        crossings=[ang[i] for i in order],
        crossing_steps=[steps[i] for i in order],
    )


def circle_crossings(w: Walk, radius: float) -> CrossingRecord:
    """All crossings of the walk with the circle |z - pole| = radius."""
    return segment_crossings(w.sites, radius, w.domain.pole, w.domain.wrap_angle)
