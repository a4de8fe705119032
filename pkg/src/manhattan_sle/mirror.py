"""L-lattice correspondence, mirror environments, exact enumeration oracle.

A walk on the Manhattan lattice is the sequence of bond midpoints of a walk
on the L lattice that repeats no bond and turns at every vertex.  We carry
the L lattice in doubled coordinates so everything stays integer: the
embedding of Manhattan site (x, y) is phi(x, y) = (x+y+1, x-y), which sends
unit axis steps to the diagonals (+-1, +-1); L sites are the even pairs and
L bonds the axis steps between them.  The traversal direction of the L bond
through phi(s) is a function of the parity class of s alone:

    (even, even) -> +x    (odd, odd) -> -x
    (odd, even)  -> +y    (even, odd) -> -y

so the L walk is reconstructed site-by-site, and the L site queried when
stepping out of s is (phi(s) + psi(s)) / 2 regardless of which step is
taken.  Mirrors live at L sites: NE ('/') swaps +x <-> +y and -x <-> -y,
NW ('\\') swaps +x <-> -y and -x <-> +y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .lattice import DomainSpec, Site, outgoing_directions
from .rng import SampleStream
from .walker import (
    DegenerateRadiusError,
    FirstCircleHit,
    StopRule,
    TrappedWalkError,
    Walk,
)

NE = 0  # '/'
NW = 1  # '\'


class LWalkError(ValueError):
    """LWalk invariant violated."""


class MirrorInconsistencyError(RuntimeError):
    """A forced turn disagreed with the stored mirror; model violation."""


class EnumerationBudgetError(RuntimeError):
    """enumerate_exact exceeded its leaf budget."""


def _phi(x: int, y: int) -> tuple[int, int]:
    return x + y + 1, x - y


def _phi_inv(u: int, w: int) -> Site:
    if (u + w) & 1 == 0:
        raise LWalkError(f"({u}, {w}) is not the image of a Manhattan site")
    return Site((u + w - 1) // 2, (u - w - 1) // 2)


def _psi(x: int, y: int) -> tuple[int, int]:
    if x & 1:
        return (-1, 0) if y & 1 else (0, 1)
    return (0, -1) if y & 1 else (1, 0)


def lsite_ahead(site) -> tuple[int, int]:
    """L site (halved coordinates) whose mirror governs the step out of `site`."""
    x, y = site
    px, py = _phi(x, y)
    qx, qy = _psi(x, y)
    return (px + qx) // 2, (py + qy) // 2


def reflect(mirror: int, direction: tuple[int, int]) -> tuple[int, int]:
    dx, dy = direction
    return (dy, dx) if mirror == NE else (-dy, -dx)


@dataclass
class LWalk:
    """Directed bond sequence on the L lattice, stored as its site path
    (n+1 L sites = n bonds) in halved (true L-lattice) coordinates."""

    lsites: list[tuple[int, int]]

    @property
    def bonds(self) -> int:
        return len(self.lsites) - 1


def validate_lwalk(lw: LWalk) -> None:
    if len(lw.lsites) < 2:
        raise LWalkError("an LWalk needs at least one bond")
    seen_bonds = set()
    prev_step = None
    for (a0, b0), (a1, b1) in zip(lw.lsites, lw.lsites[1:]):
        step = (a1 - a0, b1 - b0)
        if step not in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            raise LWalkError(f"({a0},{b0}) -> ({a1},{b1}) is not an L bond")
        bond = ((a0, b0), (a1, b1)) if (a0, b0) <= (a1, b1) else ((a1, b1), (a0, b0))
        if bond in seen_bonds:
            raise LWalkError(f"bond {bond} traversed twice")
        seen_bonds.add(bond)
        if prev_step is not None and (step[0] * prev_step[0] + step[1] * prev_step[1]) != 0:
            raise LWalkError("L walk must turn at every site")
        prev_step = step


def manhattan_to_L(w: Walk) -> LWalk:
    """Bijective image: an (n-1)-step Walk becomes an n-bond LWalk."""
    from .walker import validate_walk

    validate_walk(w)
    lsites = []
    x0, y0 = w.sites[0]
    px, py = _phi(x0, y0)
    qx, qy = _psi(x0, y0)
    lsites.append(((px - qx) // 2, (py - qy) // 2))
    for x, y in w.sites:
        px, py = _phi(x, y)
        qx, qy = _psi(x, y)
        lsites.append(((px + qx) // 2, (py + qy) // 2))
    return LWalk(lsites)


def L_to_manhattan(lw: LWalk, domain: DomainSpec) -> Walk:
    """Inverse image: bond midpoints of the LWalk, as a Walk in `domain`."""
    validate_lwalk(lw)
    sites = []
    for (a0, b0), (a1, b1) in zip(lw.lsites, lw.lsites[1:]):
        sites.append(_phi_inv(a0 + a1, b0 + b1))
    w = Walk(domain, sites)
    from .walker import validate_walk

    validate_walk(w)
    return w


@dataclass
class MirrorEnvironment:
    """Lazy random mirror assignment at L sites.

    A fresh mirror is drawn from `source` only at free two-choice steps;
    bit 0 orients the mirror so the walk steps horizontally, which makes
    deterministic_walk consume the stream exactly like generate_walk.
    Forced first visits imprint the implied mirror; revisits must agree.
    """

    source: Optional[Callable[[], int]] = None
    mirrors: dict[tuple[int, int], int] = field(default_factory=dict)

    @classmethod
    def random(cls, stream: SampleStream) -> "MirrorEnvironment":
        return cls(source=stream.coin)

    @classmethod
    def constant(cls, mirror: int) -> "MirrorEnvironment":
        return cls(source=None, mirrors=ConstantMirrors(mirror))


class ConstantMirrors(dict):
    """Every L site holds the same mirror."""

    def __init__(self, mirror: int):
        super().__init__()
        self._mirror = mirror

    def __contains__(self, key) -> bool:
        return True

    def __getitem__(self, key) -> int:
        return self._mirror


def _mirror_for_turn(incoming: tuple[int, int], outgoing: tuple[int, int]) -> int:
    if reflect(NE, incoming) == outgoing:
        return NE
    if reflect(NW, incoming) == outgoing:
        return NW
    raise MirrorInconsistencyError(f"no mirror turns {incoming} into {outgoing}")


def deterministic_walk(env: MirrorEnvironment, d: DomainSpec, stop: StopRule) -> Walk:
    """Evolve the walk deterministically through the mirror environment."""
    start = d.start
    cx, cy = d.pole
    hit = isinstance(stop, FirstCircleHit)
    r2 = stop.radius * stop.radius if hit else 0.0
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
        u = lsite_ahead((x, y))
        w_in = _psi(x, y)
        if u in env.mirrors:
            # second passage through u (or a pre-assigned environment):
            # the stored mirror dictates the turn unconditionally
            mirror = env.mirrors[u]
        elif len(cands) == 2:
            mirror = NE if reflect(NE, w_in) == _psi(*cands[0]) else NW
            if env.source():  # bit 0 -> horizontal, matching generate_walk
                mirror = 1 - mirror
            env.mirrors[u] = mirror
        else:
            # boundary- or visit-forced first passage imprints the mirror
            mirror = _mirror_for_turn(w_in, _psi(*cands[0]))
            env.mirrors[u] = mirror
        w_out = reflect(mirror, w_in)
        nxt = (x + hx, y) if _psi(x + hx, y) == w_out else (x, y + vy)
        if nxt not in cands:
            raise MirrorInconsistencyError(
                f"mirror at {u} dictates a blocked step from ({x}, {y})"
            )
        x, y = nxt
        site = Site(x, y)
        visited.add(site)
        sites.append(site)
        if hit:
            dx, dy = x - cx, y - cy
            d2 = dx * dx + dy * dy
            if d2 == r2:
                raise DegenerateRadiusError("site exactly on the stop circle")
            if d2 > r2:
                return Walk(d, sites)
        elif len(sites) == stop.steps + 1:
            return Walk(d, sites)


@dataclass(frozen=True)
class ExactAtom:
    """One reachable first-hit point: the directed exit edge, its angle,
    and its exact dyadic probability."""

    edge: tuple[int, int, int, int]
    angle: float
    probability: Fraction


@dataclass
class ExactDistribution:
    domain: DomainSpec
    radius: float
    atoms: list[ExactAtom]

    @property
    def total(self) -> Fraction:
        return sum((a.probability for a in self.atoms), Fraction(0))

    def to_rows(self):
        """(angle, numerator, log2_denominator) rows for CSV export."""
        rows = []
        for a in self.atoms:
            den = a.probability.denominator
            rows.append((a.angle, a.probability.numerator, den.bit_length() - 1))
        return rows


def _exit_angle(d: DomainSpec, x0, y0, x1, y1, r2):
    cx, cy = d.pole
    bx, by = x0 - cx, y0 - cy
    ex, ey = x1 - x0, y1 - y0
    bdot = bx * ex + by * ey
    t = -bdot + math.sqrt(bdot * bdot - (bx * bx + by * by - r2))
    return d.wrap_angle(math.atan2(by + t * ey, bx + t * ex))


def enumerate_exact(
    d: DomainSpec, radius: float, leaf_budget: int = 1 << 25
) -> ExactDistribution:
    """Exact first-hit distribution at small radius by depth-first
    enumeration of every coin sequence.  Probabilities are dyadic
    rationals and sum to exactly 1."""
    r2 = radius * radius
    if float(r2).is_integer():
        raise DegenerateRadiusError("choose R with non-integer R^2")
    start = d.start
    cx, cy = d.pole
    sx, sy = start.x - cx, start.y - cy
    if sx * sx + sy * sy >= r2:
        raise ValueError("start must be strictly inside the circle")
    probs: dict[tuple[int, int, int, int], Fraction] = {}
    leaves = 0
    visited = {start}

    def rec(x: int, y: int, depth: int) -> None:
        nonlocal leaves
        (hx, _), (_, vy) = outgoing_directions((x, y))
        cands = []
        for nx, ny in ((x + hx, y), (x, y + vy)):
            if (nx, ny) not in visited and not d.boundary(nx, ny):
                cands.append((nx, ny))
        if not cands:
            raise TrappedWalkError(f"trapped at ({x}, {y}) during enumeration")
        branch = len(cands) == 2
        for nx, ny in cands:
            ndepth = depth + 1 if branch else depth
            dx, dy = nx - cx, ny - cy
            d2 = dx * dx + dy * dy
            if d2 > r2:
                leaves += 1
                if leaves > leaf_budget:
                    raise EnumerationBudgetError(
                        f"more than {leaf_budget} leaves at R={radius}"
                    )
                edge = (x, y, nx, ny)
                probs[edge] = probs.get(edge, Fraction(0)) + Fraction(1, 2**ndepth)
            else:
                visited.add((nx, ny))
                rec(nx, ny, ndepth)
                visited.remove((nx, ny))

    import sys

    sys.setrecursionlimit(100000)
    rec(start.x, start.y, 0)
    atoms = [
        ExactAtom(edge, _exit_angle(d, *edge, r2), p) for edge, p in probs.items()
    ]
    atoms.sort(key=lambda a: a.angle)
    return ExactDistribution(d, radius, atoms)


def export_csv(dist: ExactDistribution, path) -> None:
    with open(path, "w") as fh:
        fh.write("angle,numerator,log2_denominator\n")
        for angle, num, k in dist.to_rows():
            fh.write(f"{angle:.12g},{num},{k}\n")
