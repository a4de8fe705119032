"""Non-intersecting Manhattan-lattice walk simulator with SLE6 analytics."""

__version__ = "0.1.0"

from .lattice import (  # noqa: F401
    ALL_DOMAINS,
    DOMAINS,
    HALF_PLANE,
    SLIT_PLANE,
    WEDGE_90,
    WEDGE_270,
    DomainSpec,
    Site,
    domain,
    outgoing_directions,
)
from .walker import (  # noqa: F401
    CrossingRecord,
    DegenerateRadiusError,
    FirstCircleHit,
    StepCount,
    TrappedWalkError,
    Walk,
    circle_crossings,
    generate_walk,
    validate_walk,
)
