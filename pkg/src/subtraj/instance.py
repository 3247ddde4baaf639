"""The clustering decision instance: one trajectory plus (m, ell, d)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import Trajectory


@dataclass(frozen=True)
class SCWitness:
    """A certificate for a YES answer.

    ``reference`` is the (s, t) parameter range of the reference
    subtrajectory.  ``paths`` holds the m-1 monotone free-space paths, each
    a list of diagram points from the vertical line at s to the one at t,
    and ``intervals`` their y-extents in the same order.
    """

    reference: tuple
    paths: list
    intervals: list


@dataclass(frozen=True)
class SCInstance:
    """A subtrajectory-clustering decision instance.

    Asks: does the trajectory contain m subtrajectories, pairwise overlapping
    in at most one point, one of which (the reference) has arclength at least
    ell, with every other member within Frechet distance d of the reference?

    ``margin`` is an optional robustness certificate emitted by generators:
    a lower bound on how far the construction sits from any decision-flipping
    degeneracy.  The approximate continuous oracle refuses instances without
    one.
    """

    t: Trajectory
    m: int
    ell: float
    d: float
    margin: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("m must be >= 2")
        if not (self.ell > 0) or not math.isfinite(self.ell):
            raise ValueError("ell must be a positive finite length")
        if self.d < 0 or not math.isfinite(self.d):
            raise ValueError("d must be a non-negative finite distance")
