"""Clustering decisions under the continuous Frechet distance.

Two deciders share one machinery.  ``sc_decide_continuous_v2v`` restricts the
reference subtrajectory to run vertex to vertex and, per candidate range,
greedily extracts lowest-possible monotone paths from the reach graph,
reusing the search forest across candidates.  ``sc_decide_continuous`` lifts
the restriction: it sweeps the coupled start and end lines across the
diagram, maintains every minimal monotone path between them through five
kinds of internal critical points, keeps the paths' y-intervals rank-ordered
in an interval store, and answers as soon as enough pairwise-compatible
companions exist on the two sides of the reference band.

The sweep stores interval endpoints as rank surrogates, not coordinates:
stored numbers only realize the current relative order of all endpoints,
which the event kinds keep current, while exact endpoint values are
recomputed on demand (top ends by walking the free-space boundary right of
a stored root, bottom ends by a reachability query on the reversed
diagram).  Decisions between events are probed at membership crossings so
a window that opens and closes strictly inside a gap is still seen.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right

from .discrete import BudgetViolation, candidate_references_discrete
from .freespace import (
    KIND_ELL_PAIR,
    KIND_LEFTMOST,
    KIND_RIGHTMOST,
    KIND_SHARES_Y,
    build_continuous_fsd,
)
from .geometry import Trajectory
from .instance import SCInstance, SCWitness
from .intervals import MonotoneIntervalStore
from .linkcut import LinkCutForest
from .reachgraph import (
    EPS,
    ReachGraph,
    build_reach_graph,
    insert_extra_node,
    iter_line_trees,
)

YTOL = 1e-7  # comparison slack for recomputed heights


def _tree_index(g: ReachGraph):
    """Map every internal tree node id to its owning LineTree."""
    idx = {}
    for tree in iter_line_trees(g):
        for nid in tree._meta:
            idx[nid] = tree
    return idx


def _expanded(g, tree_idx, cache, v):
    """v's outgoing targets with tree nodes flattened to their leaves,
    deduplicated and sorted lowest first, rightmost first among equals."""
    lst = cache.get(v)
    if lst is None:
        coords = g.coords
        seen, lst = set(), []
        for w in g.adj[v]:
            tree = tree_idx.get(w)
            for u in tree.leaves_under(w) if tree is not None else (w,):
                if u != v and u not in seen:
                    seen.add(u)
                    lst.append(u)
        lst.sort(key=lambda u: (coords[u][1], -coords[u][0]))
        cache[v] = lst
    return lst


def _insert_clamped(g: ReachGraph, fsd, x, y):
    """insert_extra_node with a boundary nudge.

    Heights produced by frontier walks and reversals sit on the free-space
    boundary up to float error, so clamp into the nearest free interval of
    the slice; at a tangency (a leftmost or rightmost cell point) the slice
    itself degenerates, so also try stepping x off the touch point."""
    x = min(max(x, 1.0), float(fsd.n1))
    y = min(max(y, 1.0), float(fsd.n2))
    try:
        return insert_extra_node(g, (x, y))
    except ValueError:
        j0 = min(max(int(math.floor(y)), 1), fsd.n2 - 1)
        rows = [j for j in (j0, j0 - 1, j0 + 1) if 1 <= j <= fsd.n2 - 1]
        for dx in (0.0, 1e-9, -1e-9, 1e-8, -1e-8, 1e-7, -1e-7, 1e-6, -1e-6):
            x2 = min(max(x + dx, 1.0), float(fsd.n1))
            best = None
            for j in rows:
                iv = fsd.slice_v(x2, j)
                if iv is None:
                    continue
                yy = min(max(y, iv.lo), iv.hi)
                if best is None or abs(yy - y) < abs(best - y):
                    best = yy
            if best is not None and abs(best - y) <= 1e-6:
                try:
                    return insert_extra_node(g, (x2, best))
                except ValueError:
                    continue
        raise


def _ride_ok(fsd, x, y, tpos):
    """Whether a path may ride at constant height y from x to the line at
    tpos: every crossed wall and the final partial slice must contain y."""
    if tpos <= x + EPS:
        return True
    n2 = fsd.n2
    b0 = int(math.floor(x + EPS)) + 1
    last = int(math.floor(tpos + EPS))
    frac = tpos - math.floor(tpos + EPS) > EPS
    yj = round(y)
    if abs(y - yj) <= EPS and 1 <= yj <= n2:
        yj = int(yj)
        for b in range(b0, last + 1):
            if not fsd.corner_free(b, yj):
                return False
        if frac:
            j = min(yj, n2 - 1)
            if j < 1:
                return False
            iv = fsd.slice_v(tpos, j)
            return iv is not None and iv.lo - EPS <= yj <= iv.hi + EPS
        return True
    j = int(math.floor(y))
    for b in range(b0, last + 1):
        iv = fsd.vint(b, j)
        if iv is None or not (iv.lo - EPS <= y <= iv.hi + EPS):
            return False
    if frac:
        iv = fsd.slice_v(tpos, j)
        if iv is None or not (iv.lo - EPS <= y <= iv.hi + EPS):
            return False
    return True


class _Engine:
    """Greedy lowest-endpoint path search over a reach graph.

    Neighbor lists are leaf-expanded and visited lowest first.  Taken edges
    link the current chain root under the target in the search forest;
    exhausted nodes are knocked out permanently and their children cut.
    Both survive advancing the end line, so one engine serves a whole
    sweep.  Targets beyond the current end line are stepped over without
    consuming them; an edge taken past such a skip is not linked (the skip
    may become the better choice at a larger end position), only followed,
    with the hop recorded for chain reconstruction.
    """

    def __init__(self, g: ReachGraph):
        self.g = g
        self.forest = LinkCutForest()
        self.fid = {}
        self.nbrs = {}
        self.cursor = {}
        self.used = set()
        self.dead = set()
        self.node_memo = {}
        self.shadow = {}
        self.tree_idx = _tree_index(g)
        self.stats = {"stuck": 0, "inserts": 0}

    def fnode(self, v):
        f = self.fid.get(v)
        if f is None:
            f = self.forest.make_node(payload=v)
            self.fid[v] = f
        return f

    def node_at(self, x, y):
        """Graph node at (x, y), inserting a query node if none exists."""
        nid = self.g.node_at(x, y)
        if nid is not None:
            return nid
        key = (round(x, 9), round(y, 9))
        nid = self.node_memo.get(key)
        if nid is None:
            nid = _insert_clamped(self.g, self.g.fsd, x, y)
            self.node_memo[key] = nid
            self.stats["inserts"] += 1
        return nid

    def neighbors(self, v):
        lst = _expanded(self.g, self.tree_idx, self.nbrs, v)
        if v not in self.cursor:
            self.cursor[v] = 0
        return lst

    def lowest_root(self, start, tpos, band_hi=None):
        """Search from start toward the line x=tpos, lowest endpoint first.

        Returns ("done", end node), ("band", node) once the walk is forced
        above band_hi, or ("dead", None).
        """
        if start in self.dead:
            return ("dead", None)
        forest = self.forest
        coords = self.g.coords
        sf = self.fnode(start)
        self.shadow = {}
        cur = forest.payload[forest.find_root(sf)]
        while True:
            x, y = coords[cur]
            if band_hi is not None and y > band_hi + EPS:
                return ("band", cur)
            if x >= tpos - EPS:
                return ("done", cur)
            land = _frontier(self.g.fsd, (x, y), tpos)
            if land is not None:
                if band_hi is not None and land > band_hi + EPS:
                    return ("band", cur)
                e = self.node_at(tpos, land)
                if e != cur:
                    forest.link(self.fnode(cur), self.fnode(e))
                return ("done", e)
            lst = self.neighbors(cur)
            k = self.cursor[cur]
            commit = True
            chosen = -1
            while k < len(lst):
                w = lst[k]
                if w in self.dead or (cur, k) in self.used:
                    k += 1
                    if commit:
                        self.cursor[cur] = k
                    continue
                if coords[w][0] > tpos + EPS:
                    commit = False
                    k += 1
                    continue
                chosen = k
                break
            if chosen >= 0:
                w = lst[chosen]
                if commit:
                    self.used.add((cur, chosen))
                    self.cursor[cur] = chosen + 1
                    forest.link(self.fnode(cur), self.fnode(w))
                else:
                    self.shadow[cur] = w
                cur = forest.payload[forest.find_root(self.fnode(w))]
                continue
            if not commit:
                # exhausted only past skipped far targets: not knockable yet
                self.stats["stuck"] += 1
                return ("dead", None)
            self.dead.add(cur)
            cf = self.fid.get(cur)
            if cf is not None:
                for ch in self.forest.children_of(cf):
                    self.forest.cut(ch)
            if cur == start:
                return ("dead", None)
            cur = forest.payload[forest.find_root(sf)]

    def chain(self, start, end):
        """Node chain from start to end via forest parents and the soft
        hops recorded by the last completed search."""
        out = [start]
        v = start
        limit = 4 * len(self.g.coords) + 64
        while v != end:
            p = self.forest.parent_of(self.fnode(v))
            if p is not None:
                v = self.forest.payload[p]
            else:
                v = self.shadow.get(v)
                if v is None:
                    raise AssertionError("search chain broken")
            out.append(v)
            if len(out) > limit:
                raise AssertionError("search chain does not terminate")
        return out


def _paths_for_reference(eng: _Engine, s: float, t: float, m: int, stats: dict):
    """Greedy companion extraction for one reference range [s, t].

    Scans the start line bottom-up, stacking each found path's top endpoint
    as the floor for the next start; starts falling strictly inside the
    reference band snap up to its top.  Returns a list of m-1 triples
    (start node, end node, chain) or None.  A height-preserving path fills
    every remaining slot at once.
    """
    fsd = eng.g.fsd
    coords = eng.g.coords
    need = m - 1
    found = []
    bound = -math.inf
    seen_starts = set()
    s_int = abs(s - round(s)) <= EPS
    j = 1
    while j <= fsd.n2 - 1 and len(found) < need:
        iv = fsd.vint(int(round(s)), j) if s_int else fsd.slice_v(s, j)
        if iv is None:
            j += 1
            continue
        y0 = max(iv.lo, bound)
        while y0 <= iv.hi + EPS and len(found) < need:
            lower = y0 <= s + EPS
            if not lower and y0 < t - EPS:
                # starts strictly inside the band cannot be companions
                if t <= iv.hi + EPS:
                    y0 = t
                else:
                    break
            start = eng.node_at(s, y0)
            if start in seen_starts:
                break
            seen_starts.add(start)
            status, node = eng.lowest_root(start, t, band_hi=s if lower else None)
            if status == "done":
                ry = coords[node][1]
                triple = (start, node, eng.chain(start, node))
                found.append(triple)
                if ry <= y0 + EPS:
                    stats["horizontal"] = stats.get("horizontal", 0) + 1
                    while len(found) < need:
                        found.append(triple)
                    return found
                bound = ry
                y0 = max(y0, bound)
                continue
            if status == "band" and t <= iv.hi + EPS and t > y0:
                # the whole remaining lower range of this interval tops out
                # above s; only its part at or above t can still work
                y0 = max(t, bound)
                continue
            break
        j += 1
    return found if len(found) >= need else None


def _witness(g: ReachGraph, s: float, t: float, triples) -> SCWitness:
    paths, intervals = [], []
    for start, end, chain in triples:
        paths.append([tuple(g.coords[v]) for v in chain])
        intervals.append((g.coords[start][1], g.coords[end][1]))
    return SCWitness(reference=(s, t), paths=paths, intervals=intervals)


def sc_decide_continuous_v2v(inst: SCInstance, stats=None):
    """Decide clustering with the reference running vertex to vertex.

    Returns (decision, witness-or-None).  One reach graph and one search
    forest serve every candidate range; links and knockouts carry over
    because the end line only ever moves right.
    """
    st = stats if stats is not None else {}
    st.setdefault("horizontal", 0)
    traj = inst.t
    if traj.n < 2:
        return (False, None)
    cands = candidate_references_discrete(traj, inst.ell)
    if not cands:
        return (False, None)
    fsd = build_continuous_fsd(traj, traj, inst.d)
    d_eff = inst.d + 1e-9 * max(1.0, inst.d)
    check_points = _min_window_diameter(traj, inst.ell) <= 2.0 * d_eff + 1e-7
    g = build_reach_graph(fsd)
    eng = _Engine(g)
    answer = (False, None)
    for sv, tv in cands:
        if check_points:
            y = _h_point_in_window(fsd, float(sv), float(tv))
            if y is not None:
                st["horizontal"] += 1
                answer = (True, _point_witness(inst, (float(sv), float(tv), y)))
                break
        res = _paths_for_reference(eng, float(sv), float(tv), inst.m, st)
        if res is not None:
            answer = (True, _witness(g, float(sv), float(tv), res))
            break
    st["links"] = eng.forest.link_count
    st["cuts"] = eng.forest.cut_count
    st["stuck"] = eng.stats["stuck"]
    st["inserts"] = eng.stats["inserts"]
    return answer


# ---------------------------------------------------------------------------
# the general sweep


class MinimalPathRecord:
    """One tracked minimal monotone path between the sweep's two lines.

    start and root are graph node ids; ylo and yhi snapshot the endpoint
    heights when last touched (current values are recomputed on demand);
    slo and shi are the rank surrogates stored in the interval store; flag
    mirrors the overlap override against the rank successor.
    """

    __slots__ = ("start", "root", "ylo", "yhi", "slo", "shi", "flag")

    def __init__(self, start, root, ylo, yhi, slo, shi):
        self.start = start
        self.root = root
        self.ylo = ylo
        self.yhi = yhi
        self.slo = slo
        self.shi = shi
        self.flag = False

    def __repr__(self):
        return "MinimalPathRecord(start=%d, root=%d, y=[%.6g, %.6g])" % (
            self.start,
            self.root,
            self.ylo,
            self.yhi,
        )


class _QueuedEvent:
    __slots__ = ("s", "order", "y", "kind", "point")

    def __init__(self, s, order, y, kind, point):
        self.s = s
        self.order = order
        self.y = y
        self.kind = kind
        self.point = point

    def key(self):
        return (self.s, self.order, self.y)


class SweepState:
    """Mutable state of the general continuous sweep.

    Carries the coupled line positions s and t, the growing reach graph,
    the search forest (via the engine), the rank store over tracked
    y-intervals, the records themselves in rank order, and the pending
    event queue sorted by triggering position.
    """

    __slots__ = (
        "inst",
        "fsd",
        "graph",
        "engine",
        "store",
        "records",
        "surs",
        "events",
        "next_event",
        "s",
        "t",
        "s_max",
        "stats",
        "decided",
        "_vals",
        "_rev",
    )

    def __init__(self, inst, fsd, graph, engine, events, s_max, stats):
        self.inst = inst
        self.fsd = fsd
        self.graph = graph
        self.engine = engine
        self.store = MonotoneIntervalStore()
        self.records = []
        self.surs = []
        self.events = events
        self.next_event = 0
        self.s = 1.0
        self.t = None
        self.s_max = s_max
        self.stats = stats
        self.decided = None
        self._vals = {}
        self._rev = None

    @property
    def forest(self):
        return self.engine.forest


def _advance(inst: SCInstance, s: float):
    t = inst.t.advance_by_length(s, inst.ell)
    if t is None:
        total = inst.t.total_length()
        if inst.t.arclength_at(s) + inst.ell <= total + 1e-6 * max(1.0, total):
            return float(inst.t.n)
    return t


def _pullback(traj: Trajectory, x: float, ell: float):
    """The start position whose coupled end position is x, if any."""
    a = traj.arclength_at(x) - ell
    if a <= 0.0:
        return None
    return traj.param_at_arclength(a)


def _build_events(inst: SCInstance, fsd):
    traj = inst.t
    s_max = traj.param_at_arclength(traj.total_length() - inst.ell)
    evs = []
    for p in fsd.internal_points(inst.ell):
        if p.kind == KIND_LEFTMOST:
            evs.append(_QueuedEvent(p.x, 4, p.y, 1, p))
        elif p.kind == KIND_RIGHTMOST:
            sx = _pullback(traj, p.x, inst.ell)
            if sx is not None:
                evs.append(_QueuedEvent(sx, 0, p.y, 3, p))
        elif p.kind == KIND_SHARES_Y:
            evs.append(_QueuedEvent(p.x, 3, p.y, 2, p))
            sx = _pullback(traj, p.x, inst.ell)
            if sx is not None:
                evs.append(_QueuedEvent(sx, 1, p.y, 4, p))
        elif p.kind == KIND_ELL_PAIR:
            evs.append(_QueuedEvent(p.partner[0], 2, p.y, 5, p))
    evs = [e for e in evs if 1.0 + EPS < e.s <= s_max + EPS]
    evs.sort(key=_QueuedEvent.key)
    return evs, s_max


def _h_row_tube(fsd, s, t, j):
    """Intersection over x in [s, t] of row j's free heights: the interval
    of heights at which a point companion could ride the whole window."""
    iv = fsd.slice_v(s, j)
    if iv is None:
        return None
    lo, hi = iv.lo, iv.hi
    for b in range(int(math.floor(s + EPS)) + 1, int(math.ceil(t - EPS))):
        w = fsd.vint(b, j)
        if w is None:
            return None
        lo, hi = max(lo, w.lo), min(hi, w.hi)
        if lo > hi + EPS:
            return None
    iv = fsd.slice_v(t, j)
    if iv is None:
        return None
    lo, hi = max(lo, iv.lo), min(hi, iv.hi)
    if lo > hi + EPS:
        return None
    return (lo, hi)


def _h_point_in_window(fsd, s, t):
    """Height of a legal point companion for the reference [s, t], or
    None.  Legal means the horizontal ride spans the whole window and
    sits at or under s, or at or over t."""
    if t is None or t <= s + EPS:
        return None
    for j in range(1, fsd.n2):
        if j > s + EPS:
            break
        tube = _h_row_tube(fsd, s, t, j)
        if tube is not None and tube[0] <= min(tube[1], s) + EPS:
            return min(tube[1], s)
    j0 = max(1, int(math.floor(t - EPS)))
    for j in range(j0, fsd.n2):
        tube = _h_row_tube(fsd, s, t, j)
        if tube is not None and tube[1] >= max(tube[0], t) - EPS:
            return max(tube[0], t)
    return None


def _h_point_at(inst, fsd, s):
    return _h_point_in_window(fsd, s, _advance(inst, s))


def _h_candidates(inst, fsd, s_max):
    """Candidate reference starts at which a point-companion window can
    open or close: both trigger positions of every boundary feature, wall
    endpoint heights crossed by the diagonal, and whole grid lines."""
    traj = inst.t
    out = {1.0, s_max}
    n1 = fsd.n1
    for v in range(2, n1 + 1):
        out.add(float(v))
        pb = _pullback(traj, float(v), inst.ell)
        if pb is not None:
            out.add(pb)
    for p in fsd.internal_points(inst.ell):
        for x in (p.x,) if p.partner is None else (p.x, p.partner[0]):
            out.add(x)
            pb = _pullback(traj, x, inst.ell)
            if pb is not None:
                out.add(pb)
    for i in range(1, n1 + 1):
        for j in range(1, fsd.n2):
            w = fsd.vint(i, j)
            if w is None:
                continue
            # diagonal crossings of fixed wall endpoints, both sides
            for v in (w.lo, w.hi):
                out.add(v)
                pb = _pullback(traj, v, inst.ell)
                if pb is not None:
                    out.add(pb)
    return sorted(x for x in out if 1.0 - EPS <= x <= s_max + EPS)


def _h_refine(inst, fsd, cands):
    """Roots of the cap-pinch margins between consecutive candidates: the
    moments the diagonal (or its coupled end) grazes a moving tube edge."""
    extra = []

    def probe(s):
        t = _advance(inst, s)
        if t is None or t <= s + EPS:
            return None, None
        j_lo = min(int(math.floor(s + EPS)), fsd.n2 - 1)
        j_hi = min(max(1, int(math.floor(t - EPS))), fsd.n2 - 1)
        g_lo = g_hi = None
        tube = _h_row_tube(fsd, s, t, j_lo) if j_lo >= 1 else None
        if tube is not None:
            g_lo = tube[0] - s
        tube = _h_row_tube(fsd, s, t, j_hi)
        if tube is not None:
            g_hi = t - tube[1]
        return g_lo, g_hi

    for a, b in zip(cands[:-1], cands[1:]):
        if b - a <= 1e-9:
            continue
        xs = [a + (b - a) * k / 7.0 for k in range(1, 7)]
        vals = [probe(x) for x in xs]
        for side in (0, 1):
            for (x1, v1), (x2, v2) in zip(zip(xs, vals), zip(xs[1:], vals[1:])):
                f1, f2 = v1[side], v2[side]
                if f1 is None or f2 is None or (f1 <= 0.0) == (f2 <= 0.0):
                    continue
                lo_x, hi_x = x1, x2
                for _ in range(40):
                    mid = 0.5 * (lo_x + hi_x)
                    fm = probe(mid)[side]
                    if fm is None:
                        break
                    if (fm <= 0.0) == (f1 <= 0.0):
                        lo_x = mid
                    else:
                        hi_x = mid
                extra.append(0.5 * (lo_x + hi_x))
    return extra


def point_companion_window(inst: SCInstance, fsd=None):
    """First found reference start admitting a point companion, with its
    height, or None.  A point subtrajectory at or under the start (or at
    or over the end) duplicates into arbitrarily many valid companions, so
    any hit decides YES regardless of m."""
    traj = inst.t
    if traj.n < 2:
        return None
    total = traj.total_length()
    if inst.ell > total + EPS:
        return None
    # cheap gate: some window of length ell must have diameter <= 2 d
    d_eff = inst.d + 1e-9 * max(1.0, inst.d)
    if _min_window_diameter(traj, inst.ell) > 2.0 * d_eff + 1e-7:
        return None
    if fsd is None:
        fsd = build_continuous_fsd(traj, traj, inst.d)
    s_max = traj.param_at_arclength(total - inst.ell)
    cands = _h_candidates(inst, fsd, s_max)
    cands.extend(_h_refine(inst, fsd, cands))
    cands.sort()
    probes = []
    for x in cands:
        probes.append(x)
    for a, b in zip(cands[:-1], cands[1:]):
        if b - a > 1e-12:
            probes.append(0.5 * (a + b))
    probes.sort()
    for s in probes:
        y = _h_point_at(inst, fsd, s)
        if y is not None:
            return (s, _advance(inst, s), y)
    return None


def _min_window_diameter(traj: Trajectory, ell: float):
    """Lower bound on the diameter of any reference window: a window
    starting in [v, v+1] always covers the vertices v+1 .. floor(t(v))."""
    n = traj.n
    best = math.inf
    for v in range(1, n):
        t = traj.advance_by_length(float(v), ell)
        if t is None:
            t = float(n)
        pts = [traj.vertex(w) for w in range(v + 1, int(math.floor(t + EPS)) + 1)]
        diam = 0.0
        for i in range(len(pts)):
            for k in range(i + 1, len(pts)):
                diam = max(diam, pts[i].dist(pts[k]))
        best = min(best, diam)
        if best == 0.0:
            break
    return best


def _point_witness(inst, hit):
    s, t, y = hit
    seg = [(s, y), (t, y)]
    k = inst.m - 1
    return SCWitness(reference=(s, t), paths=[list(seg) for _ in range(k)],
                     intervals=[(y, y)] * k)


def _external_heights(g: ReachGraph):
    seen = set()
    out = []
    for v, kind in enumerate(g.kind):
        if kind != "crit":
            continue
        y = g.coords[v][1]
        key = round(y, 9)
        if key not in seen:
            seen.add(key)
            out.append(y)
    out.sort()
    return out


# ---- exact current endpoint values ----------------------------------------


def _frontier(fsd, root_pt, tpos):
    """Current top height of a tracked path whose stored end is root_pt,
    after the end line moved on to tpos: follow the free region's lower
    boundary rightward, climbing at walls.  None once the region closes."""
    x, y = root_pt
    if x >= tpos - EPS:
        return y
    n2 = fsd.n2
    a = y
    for b in range(int(math.floor(x + EPS)) + 1, int(math.floor(tpos + EPS)) + 1):
        aj = round(a)
        j = min(int(aj), n2 - 1) if abs(a - aj) <= EPS else int(math.floor(a))
        iv = fsd.vint(b, j)
        if iv is None or iv.hi < a - EPS:
            return None
        if iv.lo > a:
            a = iv.lo
    if tpos - math.floor(tpos + EPS) > EPS:
        aj = round(a)
        j = min(int(aj), n2 - 1) if abs(a - aj) <= EPS else int(math.floor(a))
        iv = fsd.slice_v(tpos, j)
        if iv is None or iv.hi < a - EPS:
            return None
        if iv.lo > a:
            a = iv.lo
    return a


def _max_landing(fsd, start_pt, tpos):
    """Greatest height on the line x=tpos reachable monotonically from start_pt.

    Interval propagation over grid cells: each cell's free region is
    convex, so the reachable part of any cell edge is a single
    subinterval and only the lowest seed height (for vertical targets)
    or leftmost seed position (for horizontal targets) matters."""
    x0, y0 = float(start_pt[0]), float(start_pt[1])
    n1, n2 = fsd.n1, fsd.n2
    x0 = min(max(x0, 1.0), float(n1))
    tpos = min(max(float(tpos), 1.0), float(n1))
    if tpos < x0 - 1e-9:
        return None
    tpos = max(tpos, x0)
    p = fsd.t1.point_at(x0)
    q = fsd.t2.point_at(y0)
    if math.hypot(p.x - q.x, p.y - q.y) > fsd.d + 1e-6 * max(1.0, fsd.d):
        raise ValueError("start is not in the free space")
    nc, nr = n1 - 1, n2 - 1
    # near a row line the start belongs to both adjacent rows
    seed_rows = {
        min(max(int(math.floor(y0 - EPS)), 1), nr),
        min(max(int(math.floor(y0 + EPS)), 1), nr),
    }
    c0 = min(int(math.floor(x0)), nc)
    ct = min(int(math.floor(tpos)), nc)
    R = [None] * (nr + 2)  # lowest reachable height per row, current grid line
    for i in range(c0, ct):
        top_in = None  # leftmost reachable position on the cell's bottom line
        new_r = [None] * (nr + 2)
        for j in range(1, nr + 1):
            msy = msx = None
            iv = fsd.vint(i, j)
            if R[j] is not None and iv is not None and R[j] <= iv.hi + EPS:
                msy, msx = max(R[j], iv.lo), float(i)
            hb = fsd.hint(i, j)
            if top_in is not None and hb is not None and top_in <= hb.hi + EPS:
                bx = max(top_in, hb.lo)
                if msy is None or j < msy:
                    msy = float(j)
                if msx is None or bx < msx:
                    msx = bx
            if i == c0 and j in seed_rows:
                if msy is None or y0 < msy:
                    msy = y0
                if msx is None or x0 < msx:
                    msx = x0
            if msy is None:
                top_in = None
                continue
            out = fsd.vint(i + 1, j)
            new_r[j] = (
                max(msy, out.lo)
                if out is not None and msy <= out.hi + EPS
                else None
            )
            ht = fsd.hint(i, j + 1)
            top_in = (
                max(msx, ht.lo) if ht is not None and msx <= ht.hi + EPS else None
            )
        R = new_r
    best = None
    top_in = None
    carry = False  # reachable at (tpos, j) exactly, climbing within the line
    for j in range(1, nr + 1):
        msy = msx = None
        iv = fsd.vint(ct, j)
        if R[j] is not None and iv is not None and R[j] <= iv.hi + EPS:
            msy, msx = max(R[j], iv.lo), float(ct)
        hb = fsd.hint(ct, j)
        if top_in is not None and hb is not None and top_in <= hb.hi + EPS:
            bx = max(top_in, hb.lo)
            if bx <= tpos + EPS:
                if msy is None or j < msy:
                    msy = float(j)
                if msx is None or bx < msx:
                    msx = bx
        if ct == c0 and j in seed_rows:
            if msy is None or y0 < msy:
                msy = y0
            if msx is None or x0 < msx:
                msx = x0
        sl = fsd.slice_v(tpos, j)
        part = None
        if sl is not None:
            if carry:
                part = sl.lo
            if msy is not None and msy <= sl.hi + EPS:
                v = max(msy, sl.lo)
                part = v if part is None else min(part, v)
        if part is not None:
            if best is None or sl.hi > best:
                best = sl.hi
            nxt = fsd.hint(ct, j + 1)
            carry = (
                sl.hi >= j + 1 - EPS
                and nxt is not None
                and nxt.lo - EPS <= tpos <= nxt.hi + EPS
            )
        else:
            carry = False
        if msy is None:
            top_in = None
        else:
            ht = fsd.hint(ct, j + 1)
            top_in = (
                max(msx, ht.lo) if ht is not None and msx <= ht.hi + EPS else None
            )
    return best


class _RevSide:
    """Reversed-diagram geometry for bottom-endpoint queries.

    The forward minimum start height of a tracked path equals n+1 minus
    the reversed maximum landing height from the path top's mirror
    image."""

    def __init__(self, inst):
        rt = Trajectory(inst.t.xy[::-1])
        self.fsd = build_continuous_fsd(rt, rt, inst.d)
        self.memo = {}

    def max_landing(self, x, y, tpos):
        key = (round(x, 9), round(y, 9), round(tpos, 9))
        if key not in self.memo:
            self.memo[key] = _max_landing(self.fsd, (x, y), tpos)
        return self.memo[key]


def _rev_side(state: SweepState) -> _RevSide:
    if state._rev is None:
        state._rev = _RevSide(state.inst)
    return state._rev


def _hi_at(state: SweepState, rec: MinimalPathRecord, t_p: float):
    key = (id(rec), rec.root, round(t_p, 9))
    if key in state._vals:
        return state._vals[key]
    val = _frontier(state.fsd, state.graph.coords[rec.root], t_p)
    state._vals[key] = val
    return val


def _lo_at(state: SweepState, rec: MinimalPathRecord, s_p: float, t_p: float):
    key = (id(rec), rec.root, rec.start, round(s_p, 9), round(t_p, 9))
    if key in state._vals:
        return state._vals[key]
    hi = _hi_at(state, rec, t_p)
    if hi is None:
        state._vals[key] = None
        return None
    rev = _rev_side(state)
    n1 = float(state.fsd.n1)
    got = rev.max_landing(n1 + 1.0 - t_p, n1 + 1.0 - hi, n1 + 1.0 - s_p)
    val = None if got is None else n1 + 1.0 - got
    state._vals[key] = val
    return val


def _flush_vals(state: SweepState):
    if len(state._vals) > 50000:
        state._vals.clear()


# ---- surrogate rank maintenance -------------------------------------------


def _sur_gap(state: SweepState, below: float):
    """A fresh surrogate value strictly between below and its successor."""
    surs = state.surs
    if not surs:
        return 0.0
    if below == -math.inf:
        return surs[0] - 1.0
    i = bisect_right(surs, below)
    if i >= len(surs):
        return below + 1.0
    hi = surs[i]
    if hi - below < 1e-12:
        _respread(state)
        return _sur_gap(state, _current_of(state, below))
    return below + 0.5 * (hi - below)


def _current_of(state, old):
    # after a respread the old anchor value is gone; map by rank instead
    return state.surs[min(bisect_left(state.surs, old), len(state.surs) - 1)]


def _respread(state: SweepState):
    """Reassign all surrogates to spaced integers, preserving order."""
    pairs = []
    for rec in state.records:
        pairs.append((rec.slo, rec, "lo"))
        pairs.append((rec.shi, rec, "hi"))
    pairs.sort(key=lambda p: p[0])
    store = MonotoneIntervalStore()
    surs = []
    for k, (_, rec, side) in enumerate(pairs):
        val = float(k)
        surs.append(val)
        if side == "lo":
            rec.slo = val
        else:
            rec.shi = val
    for rec in state.records:
        store.insert(rec.slo, rec.shi)
        if rec.flag:
            store.set_overlap_flag(rec.slo, rec.shi, True)
    state.store = store
    state.surs = surs
    state.stats["respreads"] = state.stats.get("respreads", 0) + 1


def _sur_add(state, val):
    state.surs.insert(bisect_left(state.surs, val), val)


def _sur_remove(state, val):
    i = bisect_left(state.surs, val)
    if i < len(state.surs) and state.surs[i] == val:
        state.surs.pop(i)


def _drop_record(state: SweepState, rec: MinimalPathRecord):
    state.store.remove(rec.slo, rec.shi)
    _sur_remove(state, rec.slo)
    _sur_remove(state, rec.shi)
    state.records.remove(rec)


def _rank_by_hi(state: SweepState, hi_true: float, t_p: float):
    recs = state.records
    lo, hi = 0, len(recs)
    while lo < hi:
        mid = (lo + hi) // 2
        v = _hi_at(state, recs[mid], t_p)
        if v is not None and v < hi_true:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _endpoint_floor_lo(state, p, lo_true, s_p, t_p):
    """Largest surrogate among endpoints truly below a new bottom value
    inserted at rank p: the predecessor's bottom always is; walking down,
    tops of records whose current top cleared it."""
    best = -math.inf
    if p > 0:
        best = state.records[p - 1].slo
        for q in range(p - 1, -1, -1):
            h = _hi_at(state, state.records[q], t_p)
            if h is not None and h <= lo_true + YTOL:
                best = max(best, state.records[q].shi)
                break
    return best


def _endpoint_floor_hi(state, p, slo_new, hi_true, s_p, t_p):
    """Largest surrogate among endpoints truly below a new top value:
    its own bottom, the predecessor's top, and bottoms of rank-later
    records whose current bottom stays under it."""
    best = slo_new
    if p > 0:
        best = max(best, state.records[p - 1].shi)
    for q in range(p, len(state.records)):
        l = _lo_at(state, state.records[q], s_p, t_p)
        if l is not None and l < hi_true - YTOL:
            best = max(best, state.records[q].slo)
        else:
            break
    return best


def _insert_record(state: SweepState, start, root, s_p, t_p):
    """Place a fresh record at its exact rank with fresh surrogates."""
    coords = state.graph.coords
    lo_true = coords[start][1]
    hi_true = _frontier(state.fsd, coords[root], t_p)
    if hi_true is None:
        return None
    if hi_true <= lo_true + EPS:
        if lo_true <= s_p + YTOL or lo_true >= t_p - YTOL:
            state.stats["horizontal"] += 1
            state.decided = (s_p, t_p, lo_true)
        else:
            state.stats["horizontal_midband"] = (
                state.stats.get("horizontal_midband", 0) + 1
            )
        return None
    p = _rank_by_hi(state, hi_true, t_p)
    # minimality: resolve nesting in favor of the inner interval
    for q in range(p - 1, -1, -1):
        h = _hi_at(state, state.records[q], t_p)
        if h is None or h < lo_true - YTOL:
            break
        l = _lo_at(state, state.records[q], s_p, t_p)
        if l is not None and l >= lo_true - YTOL:
            return None  # an existing record sits inside the new interval
    q = p
    while q < len(state.records):
        l = _lo_at(state, state.records[q], s_p, t_p)
        if l is not None and l <= lo_true + YTOL:
            _drop_record(state, state.records[q])
            continue
        break
    p = _rank_by_hi(state, hi_true, t_p)
    slo = _sur_gap(state, _endpoint_floor_lo(state, p, lo_true, s_p, t_p))
    _sur_add(state, slo)
    shi = _sur_gap(state, _endpoint_floor_hi(state, p, slo, hi_true, s_p, t_p))
    _sur_add(state, shi)
    rec = MinimalPathRecord(start, root, lo_true, hi_true, slo, shi)
    state.records.insert(p, rec)
    state.store.insert(slo, shi)
    state.stats["records_peak"] = max(
        state.stats.get("records_peak", 0), len(state.records)
    )
    return rec


def _replace_interval(state: SweepState, rec: MinimalPathRecord, s_p, t_p):
    """Recompute rec's surrogates after its exact endpoints moved (rank is
    preserved by non-crossing, interleavings with neighbors may not be)."""
    p = state.records.index(rec)
    state.store.remove(rec.slo, rec.shi)
    _sur_remove(state, rec.slo)
    _sur_remove(state, rec.shi)
    state.records.pop(p)
    lo_true = state.graph.coords[rec.start][1]
    hi_true = _hi_at(state, rec, t_p)
    if hi_true is None:
        return
    rec.ylo, rec.yhi = lo_true, hi_true
    slo = _sur_gap(state, _endpoint_floor_lo(state, p, lo_true, s_p, t_p))
    _sur_add(state, slo)
    shi = _sur_gap(state, _endpoint_floor_hi(state, p, slo, hi_true, s_p, t_p))
    _sur_add(state, shi)
    rec.slo, rec.shi = slo, shi
    state.records.insert(p, rec)
    state.store.insert(slo, shi)


def _sync_records(state: SweepState, fresh):
    """Reconcile records with the search forest after searches ran.

    Roots linked onward follow their chains; records collapsing onto one
    root keep the one with the highest bottom endpoint; fresh landings
    (end node -> start node) either raise an absorbed record's bottom or
    become new records.
    """
    engine = state.engine
    forest = engine.forest
    coords = state.graph.coords
    state._vals.clear()
    by_root = {}
    for rec in list(state.records):
        rf = engine.fnode(rec.root)
        nr = forest.payload[forest.find_root(rf)]
        if nr != rec.root:
            rec.root = nr
            rec.yhi = coords[nr][1]
        by_root.setdefault(nr, []).append(rec)
    for nr, group in by_root.items():
        if len(group) > 1:
            group.sort(key=lambda r: coords[r.start][1])
            for r in group[:-1]:
                _drop_record(state, r)
            by_root[nr] = [group[-1]]
    for end, start in fresh.items():
        nr = forest.payload[forest.find_root(engine.fnode(end))]
        group = by_root.get(nr)
        if group:
            rec = group[0]
            if coords[start][1] > coords[rec.start][1] + EPS:
                rec.start = start
                _replace_interval(state, rec, state.s, state.t)
        else:
            rec = _insert_record(state, start, nr, state.s, state.t)
            if rec is not None:
                by_root[nr] = [rec]


# ---- event handling --------------------------------------------------------


def _refresh_dead(state: SweepState):
    """Re-route or drop every record whose top extension just died."""
    for rec in list(state.records):
        if _hi_at(state, rec, state.t) is not None:
            continue
        status, node = state.engine.lowest_root(rec.root, state.t)
        if status != "done":
            _drop_record(state, rec)
        _sync_records(state, {})


def _new_start(state: SweepState, s, y):
    engine = state.engine
    node = engine.node_at(s, y)
    engine.forest.set_mark(engine.fnode(node), y)
    status, end = engine.lowest_root(node, state.t)
    if status == "done":
        if state.graph.coords[end][1] <= y + EPS:
            # a height-preserving path: a point companion, decisive only
            # when its height clears the reference band
            if y <= state.s + YTOL or y >= state.t - YTOL:
                state.stats["horizontal"] += 1
                state.decided = (state.s, state.t, y)
            else:
                state.stats["horizontal_midband"] = (
                    state.stats.get("horizontal_midband", 0) + 1
                )
                _sync_records(state, {})
            return
        _sync_records(state, {end: node})
    else:
        _sync_records(state, {})


def _toggle_at(state: SweepState, y_e):
    """Swap the rank order of the top and bottom endpoints meeting at y_e."""
    recs = state.records
    tops = [i for i, r in enumerate(recs) if _near(_hi_at(state, r, state.t), y_e)]
    bots = [
        j
        for j, r in enumerate(recs)
        if _near(_lo_at(state, r, state.s, state.t), y_e)
    ]
    if tops and bots:
        state.stats["toggle_cands"] = state.stats.get("toggle_cands", 0) + 1
    for i in tops:
        for j in bots:
            if i >= j:
                continue
            ri, rj = recs[i], recs[j]
            a, b = bisect_left(state.surs, ri.shi), bisect_left(state.surs, rj.slo)
            if abs(a - b) != 1:
                continue
            state.store.remove(ri.slo, ri.shi)
            state.store.remove(rj.slo, rj.shi)
            ri.shi, rj.slo = rj.slo, ri.shi
            state.store.insert(ri.slo, ri.shi)
            state.store.insert(rj.slo, rj.shi)
            overlapping = ri.shi > rj.slo
            ri.flag = overlapping
            state.store.set_overlap_flag(ri.slo, ri.shi, overlapping)
            state.stats["toggles"] += 1
            return
    state.stats["vacuous_toggles"] += 1


def _near(v, y):
    return v is not None and abs(v - y) <= 1e-6


def _check_budgets(state: SweepState):
    n = state.inst.t.n
    ev_budget = 64 * n * n * n + 1024
    if state.stats["events"] > ev_budget:
        raise BudgetViolation(
            "event count %d exceeds budget %d" % (state.stats["events"], ev_budget)
        )
    ops = state.forest.link_count + state.forest.cut_count
    op_budget = int(64 * n * n * n * max(1.0, math.log2(n + 2))) + 4096
    if ops > op_budget:
        raise BudgetViolation(
            "forest updates %d exceed budget %d" % (ops, op_budget)
        )


def handle_event(state: SweepState, e):
    """Apply the next queued event, which must be e.

    Kinds on the start line insert a new start (and, for shared-height
    points, check for an endpoint order swap); kinds on the end line
    refresh or remove records whose extension died (and check swaps);
    offset pairs only swap.  Raises ValueError when e is not the next
    event in queue order.
    """
    if state.next_event >= len(state.events):
        raise ValueError("event out of order: queue exhausted")
    q = state.events[state.next_event]
    if q.point is not e:
        raise ValueError("event out of order: expected %r at x=%.9g" % (q.point, q.s))
    state.next_event += 1
    state.s = q.s
    state.t = _advance(state.inst, q.s)
    state._vals.clear()
    state.stats["events"] += 1
    if q.kind in (3, 4):
        _refresh_dead(state)
    if q.kind in (2, 4, 5):
        _toggle_at(state, q.y)
    if q.kind in (1, 2):
        _new_start(state, state.s, q.y)
    _flush_vals(state)
    _check_budgets(state)


# ---- the decision layer ----------------------------------------------------


def _decision(state: SweepState, s_p=None):
    """Whether enough pairwise-compatible companions avoid the band now.

    Counts a greedy chain of records whose current top stays at or under
    the start line plus one of records whose current bottom stays at or
    over the end line, in rank order, using surrogate comparisons for
    chain compatibility."""
    if s_p is None:
        s_p, t_p = state.s, state.t
    else:
        t_p = _advance(state.inst, s_p)
        if t_p is None:
            return False
    need = state.inst.m - 1
    if state.store.max_nonoverlapping() < need:
        return False
    count = 0
    last = -math.inf
    for rec in state.records:
        hi = _hi_at(state, rec, t_p)
        if hi is None or hi > s_p + YTOL:
            continue
        if rec.slo > last:
            count += 1
            last = rec.shi
            if count >= need:
                return True
    last = -math.inf
    for rec in state.records:
        lo = _lo_at(state, rec, s_p, t_p)
        if lo is None or lo < t_p - YTOL:
            continue
        if rec.slo > last:
            count += 1
            last = rec.shi
            if count >= need:
                return True
    return count >= need


def _bisect_crossing(f, a, b, fa, fb):
    for _ in range(48):
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm is None:
            return None
        if (fm <= 0.0) == (fa <= 0.0):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    return 0.5 * (a + b)


def _gap_probes(state: SweepState, a, b):
    """Probe the open gap (a, b) for a decision window: uniform samples
    plus membership crossings of every record against either band edge."""
    if not b - a > 1e-9:
        return None
    cands = {a + (b - a) * k / 6.0 for k in range(1, 6)}
    eps_in = (b - a) * 1e-6
    lo_s, hi_s = a + eps_in, b - eps_in

    def below(rec):
        def f(s):
            h = _hi_at(state, rec, _advance(state.inst, s))
            return None if h is None else h - s

        return f

    def above(rec):
        def f(s):
            t_p = _advance(state.inst, s)
            l = _lo_at(state, rec, s, t_p)
            return None if l is None else t_p - l

        return f

    for rec in list(state.records):
        for f in (below(rec), above(rec)):
            fa, fb = f(lo_s), f(hi_s)
            if fa is None or fb is None:
                continue
            if (fa <= 0.0) != (fb <= 0.0):
                root = _bisect_crossing(f, lo_s, hi_s, fa, fb)
                if root is not None:
                    for delta in (-3e-6, 3e-6):
                        sp = root + delta * max(1.0, b - a)
                        if a < sp < b:
                            cands.add(sp)
    for sp in sorted(cands):
        state.stats["probes"] += 1
        if _decision(state, sp):
            return sp
    return None


def prepare_sweep(inst: SCInstance, stats=None, fsd=None) -> SweepState:
    """Build the sweep at its leftmost position, base state established.

    Raises ValueError when no reference of length ell fits at all."""
    st = stats if stats is not None else {}
    for k in ("events", "probes", "toggles", "vacuous_toggles", "horizontal"):
        st.setdefault(k, 0)
    t0 = _advance(inst, 1.0)
    if t0 is None:
        raise ValueError("trajectory shorter than ell; no sweep exists")
    if fsd is None:
        fsd = build_continuous_fsd(inst.t, inst.t, inst.d)
    graph = build_reach_graph(fsd)
    engine = _Engine(graph)
    events, s_max = _build_events(inst, fsd)
    state = SweepState(inst, fsd, graph, engine, events, s_max, st)
    state.t = t0
    heights = _external_heights(graph)
    for j in range(1, fsd.n2):
        iv = fsd.vint(1, j)
        if iv is None:
            continue
        lo_i = bisect_left(heights, iv.lo - EPS)
        hi_i = bisect_right(heights, iv.hi + EPS)
        cands = {round(iv.lo, 9)}
        cands.update(round(h, 9) for h in heights[lo_i:hi_i])
        for y0 in sorted(cands):
            if state.decided is not None:
                break
            _new_start(state, 1.0, float(y0))
    return state


def _materialize(state: SweepState, s_star, t_star):
    eng = _Engine(state.graph)
    for cand in (s_star, s_star + 1e-9, max(1.0, s_star - 1e-9)):
        t_c = _advance(state.inst, cand)
        if t_c is None:
            continue
        res = _paths_for_reference(eng, cand, t_c, state.inst.m, state.stats)
        if res is not None:
            return _witness(state.graph, cand, t_c, res)
    state.stats["witness_gap"] = state.stats.get("witness_gap", 0) + 1
    return None


def sc_decide_continuous(inst: SCInstance, stats=None):
    """Decide clustering with an arbitrary reference range.

    Sweeps the coupled lines over every internal critical point, keeps all
    minimal monotone paths current, and tests the companion count at every
    event and at membership crossings between events.  Returns (decision,
    witness-or-None)."""
    st = stats if stats is not None else {}
    traj = inst.t
    if traj.n < 2 or _advance(inst, 1.0) is None:
        return (False, None)
    fsd = build_continuous_fsd(traj, traj, inst.d)
    hit = point_companion_window(inst, fsd)
    if hit is not None:
        st["horizontal"] = st.get("horizontal", 0) + 1
        return (True, _point_witness(inst, hit))
    state = prepare_sweep(inst, st, fsd)
    try:
        if state.decided is not None:
            return (True, _point_witness(inst, state.decided))
        if _decision(state):
            return (True, _materialize(state, state.s, state.t))
        prev = 1.0
        for q in list(state.events):
            sp = _gap_probes(state, prev, q.s)
            if sp is not None:
                return (True, _materialize(state, sp, _advance(inst, sp)))
            handle_event(state, q.point)
            if state.decided is not None:
                return (True, _point_witness(inst, state.decided))
            if _decision(state):
                return (True, _materialize(state, state.s, state.t))
            prev = q.s
        sp = _gap_probes(state, prev, state.s_max)
        if sp is not None:
            return (True, _materialize(state, sp, _advance(inst, sp)))
        if state.s_max > prev and _decision(state, state.s_max):
            return (True, _materialize(state, state.s_max, _advance(inst, state.s_max)))
        return (False, None)
    finally:
        st["links"] = state.forest.link_count
        st["cuts"] = state.forest.cut_count
        st["stuck"] = state.engine.stats["stuck"]
        st["inserts"] = state.engine.stats["inserts"]
        st["records"] = len(state.records)


def minimal_paths_at(fsd, g: ReachGraph, s_pos: float, t_pos: float):
    """From-scratch minimal path family between the lines at s_pos, t_pos.

    Fresh engine, one greedy search per start candidate (interval bottoms
    and external heights), keeping per end node the highest start and
    pruning dominated ranges.  Returns (sorted (lo, hi) list, saw a
    height-preserving path)."""
    eng = _Engine(g)
    heights = _external_heights(g)
    s_int = abs(s_pos - round(s_pos)) <= EPS
    per_root = {}
    horizontal = False
    for j in range(1, fsd.n2):
        iv = fsd.vint(int(round(s_pos)), j) if s_int else fsd.slice_v(s_pos, j)
        if iv is None:
            continue
        lo_i = bisect_left(heights, iv.lo - EPS)
        hi_i = bisect_right(heights, iv.hi + EPS)
        cands = {round(iv.lo, 9)}
        cands.update(round(h, 9) for h in heights[lo_i:hi_i])
        for y0 in sorted(cands):
            node = eng.node_at(s_pos, float(y0))
            status, end = eng.lowest_root(node, t_pos)
            if status != "done":
                continue
            ey = g.coords[end][1]
            if ey <= y0 + EPS:
                horizontal = True
                continue
            if y0 > per_root.get(end, -math.inf):
                per_root[end] = y0
    pairs = sorted((lo, g.coords[end][1]) for end, lo in per_root.items())
    kept = []
    for lo, hi in pairs:
        dominated = False
        for lo2, hi2 in pairs:
            if (lo2, hi2) == (lo, hi):
                continue
            if lo2 >= lo - EPS and hi2 <= hi + EPS and (lo2 > lo + EPS or hi2 < hi - EPS):
                dominated = True
                break
        if not dominated:
            kept.append((lo, hi))
    return kept, horizontal
