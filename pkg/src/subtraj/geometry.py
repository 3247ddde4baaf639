"""Planar polyline geometry and arclength arithmetic.

A trajectory is a polyline v_1, ..., v_n in the plane.  Its parameter space
is [1, n]: the point at parameter i + mu (integer i, 0 <= mu < 1) is the
convex combination (1 - mu) * v_i + mu * v_{i+1}.  Consecutive duplicate
vertices are allowed; they contribute zero arclength.

All comparisons against a distance threshold d are closed and use the global
tolerance EPS (overridable through the SC_EPS environment variable): a point
is within distance d when dist <= d + EPS * max(1, d).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

EPS = float(os.environ.get("SC_EPS", "1e-9"))


def tol(scale: float = 1.0) -> float:
    """Absolute tolerance at a given natural scale (at least EPS)."""
    return EPS * max(1.0, abs(scale))


@dataclass(frozen=True)
class Point2:
    """A point in the plane.  Coordinates must be finite."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("non-finite coordinate: (%r, %r)" % (self.x, self.y))

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def dist(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class ParamInterval:
    """A closed parameter interval [lo, hi] on one segment or line."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError("interval lo > hi: [%r, %r]" % (self.lo, self.hi))

    def contains(self, v: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= v <= self.hi + slack

    def length(self) -> float:
        return self.hi - self.lo


class Trajectory:
    """Immutable polyline with a cumulative-arclength index.

    Parameters
    ----------
    points : iterable of (x, y) pairs or Point2
        The vertices, in order.  At least one vertex is required.

    Notes
    -----
    Vertices are exposed both as ``Point2`` objects (``vertices``) and as an
    (n, 2) float array (``xy``) for vectorized work.  ``arclen_prefix[i]`` is
    the arclength from v_1 to v_{i+1}; the first entry is 0.
    """

    __slots__ = ("vertices", "xy", "arclen_prefix", "n")

    def __init__(self, points):
        verts = []
        for p in points:
            if isinstance(p, Point2):
                verts.append(p)
            else:
                verts.append(Point2(float(p[0]), float(p[1])))
        if not verts:
            raise ValueError("trajectory needs at least one vertex")
        object.__setattr__(self, "vertices", tuple(verts))
        xy = np.array([(p.x, p.y) for p in verts], dtype=np.float64)
        object.__setattr__(self, "xy", xy)
        seg = np.hypot(np.diff(xy[:, 0]), np.diff(xy[:, 1]))
        prefix = np.concatenate(([0.0], np.cumsum(seg)))
        object.__setattr__(self, "arclen_prefix", prefix)
        object.__setattr__(self, "n", len(verts))

    def __setattr__(self, name, value):
        raise AttributeError("Trajectory is immutable")

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return "Trajectory(n=%d, length=%.6g)" % (self.n, self.total_length())

    def total_length(self) -> float:
        return float(self.arclen_prefix[-1])

    def vertex(self, i: int) -> Point2:
        """Vertex by 1-based index."""
        if not 1 <= i <= self.n:
            raise ValueError("vertex index %r out of [1, %d]" % (i, self.n))
        return self.vertices[i - 1]

    def _check_param(self, p: float) -> float:
        # absorb roundoff just past the ends, reject anything further out
        if p < 1.0:
            if p < 1.0 - tol(self.n):
                raise ValueError("parameter %r out of [1, %d]" % (p, self.n))
            return 1.0
        if p > self.n:
            if p > self.n + tol(self.n):
                raise ValueError("parameter %r out of [1, %d]" % (p, self.n))
            return float(self.n)
        return float(p)

    def point_at(self, p: float) -> Point2:
        """Point on the polyline at parameter p in [1, n]."""
        p = self._check_param(p)
        if p >= self.n:
            return self.vertices[-1]
        i = int(math.floor(p))
        mu = p - i
        a = self.vertices[i - 1]
        b = self.vertices[i]
        return Point2(a.x + mu * (b.x - a.x), a.y + mu * (b.y - a.y))

    def arclength_at(self, p: float) -> float:
        """Arclength from parameter 1 to parameter p."""
        p = self._check_param(p)
        if p >= self.n:
            return float(self.arclen_prefix[-1])
        i = int(math.floor(p))
        mu = p - i
        seg = self.arclen_prefix[i] - self.arclen_prefix[i - 1]
        return float(self.arclen_prefix[i - 1] + mu * seg)

    def arclength_between(self, a: float, b: float) -> float:
        """Arclength of the subtrajectory from parameter a to b (a <= b)."""
        if a > b:
            raise ValueError("arclength_between needs a <= b, got %r > %r" % (a, b))
        return self.arclength_at(b) - self.arclength_at(a)

    def advance_by_length(self, start: float, ell: float) -> float | None:
        """Smallest parameter b >= start with arclength_between(start, b) = ell.

        Returns None when the remaining length past ``start`` is less than
        ``ell`` (beyond tolerance).
        """
        if ell < 0:
            raise ValueError("ell must be >= 0")
        start = self._check_param(start)
        target = self.arclength_at(start) + ell
        total = float(self.arclen_prefix[-1])
        if target > total:
            if target > total + tol(total):
                return None
            return float(self.n)
        prefix = self.arclen_prefix
        j = int(np.searchsorted(prefix, target, side="left"))
        if j == 0:
            b = 1.0
        elif prefix[j] == target:
            b = float(j + 1)
        else:
            seg = prefix[j] - prefix[j - 1]
            b = j + (target - prefix[j - 1]) / seg
        return max(b, start)

    def param_at_arclength(self, arclen: float) -> float:
        """Smallest parameter p with arclength_at(p) = arclen (clamped to [0, total])."""
        total = float(self.arclen_prefix[-1])
        target = min(max(arclen, 0.0), total)
        prefix = self.arclen_prefix
        j = int(np.searchsorted(prefix, target, side="left"))
        if j == 0:
            return 1.0
        if prefix[j] == target:
            return float(j + 1)
        seg = prefix[j] - prefix[j - 1]
        return j + (target - prefix[j - 1]) / seg

    def advance_to_vertex(self, start: float, ell: float) -> int | None:
        """Vertex-index variant: the final vertex of the shortest subtrajectory
        starting at ``start`` with length >= ell, or None if none exists."""
        b = self.advance_by_length(start, ell)
        if b is None:
            return None
        near = round(b)
        if abs(b - near) <= tol(self.n):
            return max(int(near), int(math.ceil(start - tol(self.n))))
        return int(math.ceil(b))


def dist_point_segment(p: Point2, a: Point2, b: Point2) -> float:
    """Euclidean distance from point p to segment ab."""
    ux, uy = b.x - a.x, b.y - a.y
    wx, wy = p.x - a.x, p.y - a.y
    denom = ux * ux + uy * uy
    if denom == 0.0:
        return math.hypot(wx, wy)
    mu = (wx * ux + wy * uy) / denom
    mu = min(1.0, max(0.0, mu))
    return math.hypot(wx - mu * ux, wy - mu * uy)


def free_interval_point_vs_segment(p: Point2, a: Point2, b: Point2, d: float) -> ParamInterval | None:
    """The set of mu in [0, 1] with ||p - ((1-mu) a + mu b)|| <= d.

    The distance along a segment is a convex function of mu, so the result is
    a single closed interval, or None when empty.  A degenerate segment
    (a == b) yields [0, 1] iff ||p - a|| <= d.
    """
    if d < 0:
        raise ValueError("d must be >= 0")
    d_eff = d + tol(d)
    ux, uy = b.x - a.x, b.y - a.y
    wx, wy = p.x - a.x, p.y - a.y
    qa = ux * ux + uy * uy
    if qa == 0.0:
        if math.hypot(wx, wy) <= d_eff:
            return ParamInterval(0.0, 1.0)
        return None
    qb = -2.0 * (wx * ux + wy * uy)
    qc = wx * wx + wy * wy - d_eff * d_eff
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    r1 = (-qb - sq) / (2.0 * qa)
    r2 = (-qb + sq) / (2.0 * qa)
    lo = max(0.0, r1)
    hi = min(1.0, r2)
    if lo > hi:
        return None
    return ParamInterval(lo, hi)
