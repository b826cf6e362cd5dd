from mpattractors.phase.arrow import TimeArrow, deep_time_sampler, depth
from mpattractors.phase.bornology import Bornology
from mpattractors.phase.cone import Cone, as_time, cone_contains
from mpattractors.phase.grid import (
    BOUNDARY,
    EXTERIOR,
    INTERIOR,
    Field,
    GridDomain,
    annulus,
    dumbbell,
    from_mask,
    interval,
    periodic_box,
    strip,
)
from mpattractors.phase.metric import LocMetric, WindowedSup, loc_distance

__all__ = [
    "BOUNDARY",
    "EXTERIOR",
    "INTERIOR",
    "Bornology",
    "Cone",
    "Field",
    "GridDomain",
    "LocMetric",
    "TimeArrow",
    "WindowedSup",
    "annulus",
    "as_time",
    "cone_contains",
    "deep_time_sampler",
    "depth",
    "dumbbell",
    "from_mask",
    "interval",
    "loc_distance",
    "periodic_box",
    "strip",
]
