"""Percolation-explorer interface on the half-plane hexagonal lattice.

Pointy-top hexagons with unit edges, rows parallel to the real axis.
Hexagon (q, r) has centre (sqrt(3)*(q + r/2) + sqrt(3)/2, 1.5*r + 0.5);
row 0 sits on the axis, coloured white for q >= 0 and black for q <= -1,
and the interface starts at the origin vertex between the two boundary
hexagons, keeping white on its right.  Interface vertices live at
integer pairs (A, B) with position (A*sqrt(3)/2, B/2); the vertex class
alternates with B mod 3, and every vertex has degree 3, so the path can
never revisit an edge and no visited-set is needed.  The step rule and
bit consumption match kernels.explorer_passright_kernel exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from . import kernels
from .lattice import HALF_PLANE
from .rng import SampleStream
from .walker import CrossingRecord, FirstCircleHit, StepCount, StopRule, segment_crossings

SQRT3_2 = math.sqrt(3.0) / 2.0

_between_hex = kernels._between_hex.py_func
_explorer_move = kernels._explorer_move.py_func

WHITE = 1
BLACK = 0


@dataclass
class HexColoring:
    """Lazy site colouring; row 0 is fixed by the boundary condition and
    never sampled, rows >= 1 are drawn on first query and frozen."""

    source: Optional[SampleStream] = None
    colors: dict = field(default_factory=dict)
    forced: Optional[int] = None  # degenerate colourings for tests

    def query(self, q: int, r: int) -> int:
        if r == 0:
            return WHITE if q >= 0 else BLACK
        if r < 0:
            raise ValueError("explorer queried a hexagon below the axis")
        key = (q, r)
        c = self.colors.get(key)
        if c is None:
            c = self.forced if self.forced is not None else self.source.coin()
            self.colors[key] = c
        return c


@dataclass
class InterfacePath:
    """Ordered interface vertices in integer (A, B) coordinates."""

    vertices: list[tuple[int, int]]
    coloring: HexColoring

    @property
    def steps(self) -> int:
        return len(self.vertices) - 1

    def positions(self) -> list[tuple[float, float]]:
        return [(a * SQRT3_2, b * 0.5) for a, b in self.vertices]


def generate_interface(stop: StopRule, stream_or_coloring) -> InterfacePath:
    """Walk the explorer from the origin until the stop rule fires.

    The first edge (up from the origin) is forced by the boundary
    colouring; afterwards each step queries the one newly adjacent
    hexagon.  The explorer can never get stuck."""
    coloring = (
        stream_or_coloring
        if isinstance(stream_or_coloring, HexColoring)
        else HexColoring(source=stream_or_coloring)
    )
    hit = isinstance(stop, FirstCircleHit)
    r2 = stop.radius * stop.radius if hit else 0.0
    pa, pb = 0, 0
    a, b = 0, 2
    vertices = [(0, 0), (0, 2)]
    while True:
        if hit:
            d2 = 0.25 * (3 * a * a + b * b)
            if d2 == r2:
                from .walker import DegenerateRadiusError

                raise DegenerateRadiusError("vertex exactly on the stop circle")
            if d2 > r2:
                return InterfacePath(vertices, coloring)
        elif len(vertices) == stop.steps + 1:
            return InterfacePath(vertices, coloring)
        q, r = _between_hex(pa, pb, a, b)
        color = coloring.query(q, r)
        na, nb = _explorer_move(pa, pb, a, b, color)
        pa, pb, a, b = a, b, na, nb
        vertices.append((a, b))


def validate_interface(path: InterfacePath) -> None:
    """Raise if any InterfacePath invariant fails."""
    v = path.vertices
    if v[:2] != [(0, 0), (0, 2)]:
        raise ValueError("interface must start with the forced edge up from the origin")
    seen = set()
    for (a0, b0), (a1, b1) in zip(v, v[1:]):
        if b1 < 0:
            raise ValueError("interface left the upper half-plane")
        step = (a1 - a0, b1 - b0)
        if step not in ((1, 1), (-1, 1), (1, -1), (-1, -1), (0, 2), (0, -2)):
            raise ValueError(f"({a0},{b0}) -> ({a1},{b1}) is not a hexagon edge")
        edge = ((a0, b0), (a1, b1)) if (a0, b0) <= (a1, b1) else ((a1, b1), (a0, b0))
        if edge in seen:
            raise ValueError("interface reused an edge")
        seen.add(edge)
    # side rule: each step beyond the first must match the recorded colour
    for i in range(1, len(v) - 1):
        pa, pb = v[i - 1]
        a, b = v[i]
        q, r = _between_hex(pa, pb, a, b)
        color = path.coloring.query(q, r)
        if _explorer_move(pa, pb, a, b, color) != v[i + 1]:
            raise ValueError(f"step {i} contradicts the colour of hexagon ({q},{r})")


def interface_crossings(path: InterfacePath, radius: float) -> CrossingRecord:
    """Circle crossings of the interface against |z| = radius, with the
    half-plane angular range (0, pi)."""
    return segment_crossings(
        path.positions(), radius, (0.0, 0.0), HALF_PLANE.wrap_angle
    )
