"""Shared random instance builders for the test suite."""

import math

from subtraj.geometry import Trajectory
from subtraj.instance import SCInstance


def square_laps(laps):
    base = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    return Trajectory(base * laps + [(0.0, 0.0)])


def random_walk_trajectory(rnd, n):
    pts = [(0.0, 0.0)]
    for _ in range(n - 1):
        ang = rnd.uniform(0.0, 2.0 * math.pi)
        step = rnd.uniform(0.3, 1.5)
        x, y = pts[-1]
        pts.append((x + step * math.cos(ang), y + step * math.sin(ang)))
    return Trajectory(pts)


def trajectory_diameter(t):
    pts = [(p.x, p.y) for p in t.vertices]
    return max(math.dist(a, b) for a in pts for b in pts)


def random_discrete_instance(rnd, n_max=12, m_max=4):
    n = rnd.randint(3, n_max)
    t = random_walk_trajectory(rnd, n)
    total = float(t.arclen_prefix[-1])
    ell = rnd.uniform(0.05, 0.95) * total
    d = rnd.uniform(0.0, 0.9) * trajectory_diameter(t)
    m = rnd.randint(2, m_max)
    return SCInstance(t=t, m=m, ell=ell, d=d)
