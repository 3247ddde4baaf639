"""Subtrajectory-clustering decision algorithms under Frechet distances.

Core pieces: polyline geometry, discrete/continuous free-space diagrams,
a link-cut forest, a monotone interval store, reachability graphs over
free-space critical points, the clustering decision procedures themselves,
slow verification oracles, and hard-instance generators.
"""

from .continuous import sc_decide_continuous, sc_decide_continuous_v2v
from .discrete import BudgetViolation, sc_decide_discrete
from .freespace import build_continuous_fsd, build_discrete_grid
from .geometry import EPS, ParamInterval, Point2, Trajectory
from .instance import SCInstance, SCWitness
from .oracles import (
    continuous_frechet_decide_oracle,
    discrete_frechet_dp,
    sc_continuous_bruteforce,
    sc_discrete_bruteforce,
)

__all__ = [
    "EPS",
    "ParamInterval",
    "Point2",
    "Trajectory",
    "SCInstance",
    "SCWitness",
    "BudgetViolation",
    "sc_decide_discrete",
    "sc_decide_continuous",
    "sc_decide_continuous_v2v",
    "build_continuous_fsd",
    "build_discrete_grid",
    "discrete_frechet_dp",
    "continuous_frechet_decide_oracle",
    "sc_discrete_bruteforce",
    "sc_continuous_bruteforce",
]
__version__ = "0.1.0"
