"""Manhattan lattice orientations, simulation domains, angle normalization.

Orientation convention (fixed): row y carries horizontal direction +x when
y is even and -x when y is odd; column x carries vertical direction +y when
x is even and -y when x is odd.  Every site therefore has exactly one
outgoing horizontal and one outgoing vertical bond.

The three domains are placed so that a walk started at `start` can never be
trapped.  Placement is constrained by the orientation convention: the slit
must lie on an odd row (its bonds point toward the tip) and the wedge apex
cell must have both outgoing bonds pointing into the wedge.  These exact
placements are validated by exhaustive search in the test suite and in
scripts/placement_search.py.  All three domains measure polar angles from
the pole (1,1), the tip of the slit / apex of the wedges, so interior sites
span exactly the stated open angular ranges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

TWO_PI = 2.0 * math.pi


class Site(NamedTuple):
    x: int
    y: int


Step = tuple[int, int]


class RangeError(ValueError):
    """Angle or parameter outside its documented range."""


def outgoing_directions(site) -> tuple[Step, Step]:
    """The (horizontal, vertical) unit steps leaving `site`."""
    x, y = site
    return (1 - 2 * (y & 1), 0), (0, 1 - 2 * (x & 1))


def incoming_directions(site) -> tuple[Step, Step]:
    """Unit steps by which `site` can be entered (negated, these point at
    the two in-neighbours)."""
    return outgoing_directions(site)


@dataclass(frozen=True)
class DomainSpec:
    """One of the restricted domains the walk cannot be trapped in.

    theta_eff for the hitting CDF is hit_scale*(theta - theta_min); the
    half-plane angle for the pass-right formula is
    pass_scale*(theta - theta_min).

    The oriented lattice is chiral: a domain whose start/boundary has no
    lattice symmetry mapping the setup to itself carries an odd-in-
    reflection finite-R correction.  `mirror_twin` is the reflected
    lattice realization of the same continuum domain; bulk runs average
    the two, cancelling that correction exactly for the hitting law.
    The 90 degree wedge is its own mirror image (the x<->y diagonal is a
    lattice symmetry and the start sits on it), so it has no twin.
    """

    kind: str
    start: Site
    pole: Site
    theta_min: float
    theta_max: float
    hit_scale: float
    pass_scale: float
    boundary: Callable[[int, int], bool] = field(repr=False)
    slit_x0: int = 0  # slit tip column, consumed by the kernels
    mirror_twin: "DomainSpec | None" = field(default=None, repr=False)

    def is_boundary(self, site) -> bool:
        x, y = site
        return self.boundary(x, y)

    @property
    def theta_range(self) -> tuple[float, float]:
        return (self.theta_min, self.theta_max)

    def normalize_angle(self, theta: float) -> float:
        """Map a polar angle in theta_range to Theta = theta / (2 pi)."""
        if not (self.theta_min <= theta <= self.theta_max):
            raise RangeError(
                f"angle {theta!r} outside {self.kind} range "
                f"({self.theta_min}, {self.theta_max})"
            )
        return theta / TWO_PI

    def wrap_angle(self, atan2_theta: float) -> float:
        """Map an atan2 result in (-pi, pi] into this domain's range."""
        if atan2_theta <= 0.0 and self.theta_max > math.pi:
            return atan2_theta + TWO_PI
        return atan2_theta


# glide reflection (x, y) -> (x+1, 2-y) preserves the orientations and
# reflects the slit plane setup; the twin's slit starts one column later
_SLIT_TWIN = DomainSpec(
    kind="slit",
    start=Site(1, 1),
    pole=Site(2, 1),
    theta_min=0.0,
    theta_max=TWO_PI,
    hit_scale=1.0,
    pass_scale=0.5,
    boundary=lambda x, y: y == 1 and x >= 2,
    slit_x0=2,
)

SLIT_PLANE = DomainSpec(
    kind="slit",
    start=Site(0, 1),
    pole=Site(1, 1),
    theta_min=0.0,
    theta_max=TWO_PI,
    hit_scale=1.0,
    pass_scale=0.5,
    boundary=lambda x, y: y == 1 and x >= 1,
    slit_x0=1,
    mirror_twin=_SLIT_TWIN,
)

WEDGE_90 = DomainSpec(
    kind="wedge90",
    start=Site(2, 2),
    pole=Site(1, 1),
    theta_min=0.0,
    theta_max=0.5 * math.pi,
    hit_scale=4.0,
    pass_scale=2.0,
    boundary=lambda x, y: x <= 1 or y <= 1,
)

# the x<->y diagonal is a lattice symmetry fixing the forbidden quadrant,
# so the twin differs only in its start site
_WEDGE_270_TWIN = DomainSpec(
    kind="wedge270",
    start=Site(1, 0),
    pole=Site(1, 1),
    theta_min=0.5 * math.pi,
    theta_max=TWO_PI,
    hit_scale=4.0 / 3.0,
    pass_scale=2.0 / 3.0,
    boundary=lambda x, y: x >= 1 and y >= 1,
)

WEDGE_270 = DomainSpec(
    kind="wedge270",
    start=Site(0, 1),
    pole=Site(1, 1),
    theta_min=0.5 * math.pi,
    theta_max=TWO_PI,
    hit_scale=4.0 / 3.0,
    pass_scale=2.0 / 3.0,
    boundary=lambda x, y: x >= 1 and y >= 1,
    mirror_twin=_WEDGE_270_TWIN,
)

# Half-plane pseudo-domain for the percolation explorer: the interface is
# generated by percolation.py, so there is no site boundary; only the
# angular range and the pass-right map (identity) are used.
HALF_PLANE = DomainSpec(
    kind="halfplane",
    start=Site(0, 0),
    pole=Site(0, 0),
    theta_min=0.0,
    theta_max=math.pi,
    hit_scale=math.nan,
    pass_scale=1.0,
    boundary=lambda x, y: False,
)

DOMAINS = {d.kind: d for d in (SLIT_PLANE, WEDGE_90, WEDGE_270)}
ALL_DOMAINS = {**DOMAINS, "halfplane": HALF_PLANE}

# integer codes shared with the numba kernels
DOMAIN_CODES = {"slit": 0, "wedge90": 1, "wedge270": 2}


def domain(kind: str) -> DomainSpec:
    try:
        return ALL_DOMAINS[kind]
    except KeyError:
        raise RangeError(f"unknown domain {kind!r}") from None
