"""Monotone reachability in continuous free space as graph reachability.

The free-space diagram of a trajectory pair is a grid of cells whose free
regions are convex.  Reachability by monotone (right/up) paths between the
finitely many *critical points* (free-interval endpoints on the grid lines,
including free cell corners) is captured exactly by a sparse digraph built
from a few edge families:

  * one static balanced binary tree per grid line, leaves the line's
    critical points in sorted order, with parent->child edges, so a single
    edge to O(log n) canonical nodes covers any contiguous run of points;
  * per vertical-boundary critical point, edges covering the contiguous
    run of top-line points reachable inside its row, up to the rightmost
    such target (found by a two-stack dominance scan over the row's
    boundary intervals);
  * an edge to the first forced-climb boundary's lowest free point (the
    nearest boundary whose interval lies entirely at or above the source),
    which chains same-row travel through rising interval bottoms;
  * edges covering the upper endpoints of every boundary interval strictly
    before the scan's first impassable boundary; those boundaries form a
    contiguous range, covered by a second per-row tree kept in boundary
    order;
  * an edge up each boundary segment's free interval, low end to high end,
    so travel along a grid line is never lost.

Horizontal-boundary points get the transposed column constructions.  A
decision procedure for the continuous Frechet distance falls out: the
distance is at most d exactly when the bottom-left corner of the diagram
built at threshold d reaches the top-right corner.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .freespace import FreeSpaceDiagram, build_continuous_fsd
from .geometry import Trajectory

__all__ = [
    "EPS",
    "BasicPathTarget",
    "LineTree",
    "ReachGraph",
    "build_reach_graph",
    "canonical_nodes",
    "frechet_decide_continuous",
    "insert_extra_node",
    "rightmost_reach_row",
]

# coordinate slack for deduplicating and comparing diagram coordinates
EPS = 1e-9

_INF = float("inf")


def _qkey(x: float, y: float) -> tuple:
    return (round(x / EPS), round(y / EPS))


# ---------------------------------------------------------------------------
# per-line balanced trees


class LineTree:
    """Static balanced binary tree over one grid line's critical points.

    Leaves are the line's critical points in sorted coordinate order; an
    internal node covers a contiguous leaf range.  Any coordinate interval
    decomposes into at most 2*ceil(log2(n)) canonical nodes.
    """

    __slots__ = ("coords", "leaf_ids", "root", "height", "_meta", "_leaf_idx")

    def __init__(self, coords, leaf_ids, alloc, add_edge):
        self.coords = list(coords)
        self.leaf_ids = list(leaf_ids)
        if not self.coords:
            raise ValueError("a line tree needs at least one point")
        if len(self.coords) != len(self.leaf_ids):
            raise ValueError("one id per coordinate required")
        self._meta = {}  # internal id -> (lo, hi, left, right), leaf range [lo, hi)
        self._leaf_idx = {nid: k for k, nid in enumerate(self.leaf_ids)}
        n = len(self.coords)
        self.height = math.ceil(math.log2(n)) if n > 1 else 0

        def build(lo, hi):
            if hi - lo == 1:
                return self.leaf_ids[lo]
            mid = (lo + hi) // 2
            left = build(lo, mid)
            right = build(mid, hi)
            nid = alloc(lo, hi)
            self._meta[nid] = (lo, hi, left, right)
            add_edge(nid, left)
            add_edge(nid, right)
            return nid

        self.root = build(0, n)

    def _span(self, nid):
        meta = self._meta.get(nid)
        if meta is not None:
            return meta[0], meta[1]
        k = self._leaf_idx[nid]
        return k, k + 1

    def canonical(self, li: int, ri: int) -> list:
        """Maximal nodes whose leaves tile the index range [li, ri]."""
        n = len(self.coords)
        li, ri = max(li, 0), min(ri, n - 1)
        if li > ri:
            return []
        out, stack = [], [self.root]
        while stack:
            nid = stack.pop()
            lo, hi = self._span(nid)
            if lo >= li and hi <= ri + 1:
                out.append(nid)
            elif lo <= ri and hi > li:
                meta = self._meta[nid]  # a partially covered node is internal
                stack.append(meta[3])
                stack.append(meta[2])
        return out

    def leaves_under(self, nid) -> list:
        lo, hi = self._span(nid)
        return self.leaf_ids[lo:hi]


def canonical_nodes(tree: LineTree, lo: float, hi: float) -> list:
    """Nodes whose leaf descendants are exactly the points in [lo, hi]."""
    li = bisect_left(tree.coords, lo - EPS)
    ri = bisect_right(tree.coords, hi + EPS) - 1
    return tree.canonical(li, ri)


# ---------------------------------------------------------------------------
# rightmost-reach scan
#
# One row is scanned right to left.  Boundary b (0-based, at scan
# coordinate pos0 + b) carries the free interval of its transverse grid
# line segment; targets live on the row's far line.  A monotone path from
# height h on boundary b crosses boundary b' > b exactly when the interval
# of b' meets [h, inf), so the path's fate is decided by the nearer of
#   jp: the first b' whose interval lies entirely at or above h; the path
#       is forced up to that interval's low end and inherits its answer,
#   jr: the first b' whose interval lies entirely below h; no crossing at
#       any height >= h, so reach is capped at that boundary.
# Suffix record maxima of interval low ends and record minima of high ends,
# kept as stacks, make both lookups a binary search.  A missing boundary
# interval enters both stacks as (+inf, -inf) and erases everything behind
# it, which is exact: nothing right of a fully blocked boundary is visible.
# Besides the rightmost far-line target, each query reports the first
# forced-climb boundary and the death boundary; those feed the climb-anchor
# and upper-endpoint edge families, whose target sets are contiguous by
# construction (the forced height only rises, and death cuts a prefix).


def _first_at_or_above(idxs, keys, h):
    # keys strictly descending; entries with key >= h form a prefix
    lo, hi = 0, len(keys)
    while lo < hi:
        mid = (lo + hi) // 2
        if keys[mid] >= h:
            lo = mid + 1
        else:
            hi = mid
    return idxs[lo - 1] if lo else None


def _first_below(idxs, keys, h):
    # keys strictly ascending; entries with key < h form a prefix
    lo, hi = 0, len(keys)
    while lo < hi:
        mid = (lo + hi) // 2
        if keys[mid] < h:
            lo = mid + 1
        else:
            hi = mid
    return idxs[lo - 1] if lo else None


def _rightmost_target(target_xs, pos, cap):
    """Rightmost target coordinate in [pos, cap], or None (cap None = +inf)."""
    k = (bisect_right(target_xs, cap + EPS) if cap is not None else len(target_xs)) - 1
    if k < 0 or target_xs[k] < pos - EPS:
        return None
    return target_xs[k]


def _scan_rightmost(walls, queries, target_xs, pos0=1.0):
    """Answer rightmost-reach queries for one row of boundaries.

    walls[b] is the transverse free interval (lo, hi) of boundary b, or
    None when the boundary segment has no free point.  queries[b] lists
    transverse heights to answer at boundary b.  Returns (qlo, dlo,
    answers): qlo[b] and dlo[b] are the far-line answer and the death
    boundary at the wall's own low end; answers[b] aligns with queries[b],
    each entry a triple (q, jp, death) holding the rightmost reachable
    far-line coordinate or None, the first forced-climb boundary index or
    None (always a boundary with an interval), and the first impassable
    boundary index or None for end of row.
    """
    nb = len(walls)
    qlo = [None] * nb
    dlo = [None] * nb
    answers = [[None] * len(qs) for qs in queries]
    p_bs, p_keys = [], []  # record maxima of interval low ends, right of b
    r_bs, r_keys = [], []  # record minima of interval high ends, right of b

    def resolve(pos, h):
        jp = _first_at_or_above(p_bs, p_keys, h)
        jr = _first_below(r_bs, r_keys, h)
        if jp is not None and (jr is None or jp < jr):
            if walls[jp] is None:
                return (_rightmost_target(target_xs, pos, pos0 + jp), None, jp)
            q = qlo[jp]
            if q is None:
                q = _rightmost_target(target_xs, pos, pos0 + jp)
            return (q, jp, dlo[jp])
        if jr is not None:
            return (_rightmost_target(target_xs, pos, pos0 + jr), None, jr)
        return (_rightmost_target(target_xs, pos, None), None, None)

    for b in range(nb - 1, -1, -1):
        pos = pos0 + b
        wall = walls[b]
        alo = None
        if wall is not None:
            alo = resolve(pos, wall[0])
            qlo[b], dlo[b] = alo[0], alo[2]
        for k, h in enumerate(queries[b]):
            if wall is not None and h == wall[0]:
                answers[b][k] = alo
            else:
                answers[b][k] = resolve(pos, h)
        lo, hi = wall if wall is not None else (_INF, -_INF)
        while p_keys and p_keys[-1] <= lo:
            p_keys.pop()
            p_bs.pop()
        p_bs.append(b)
        p_keys.append(lo)
        while r_keys and r_keys[-1] >= hi:
            r_keys.pop()
            r_bs.pop()
        r_bs.append(b)
        r_keys.append(hi)
    return qlo, dlo, answers


@dataclass
class _ScanState:
    """Retained row (or column) scan results, for post-build point queries."""

    walls: list
    qlo: list
    dlo: list
    tree: LineTree | None  # far-line tree (the targets)
    hitree: LineTree | None  # tree over interval high ends, in boundary order
    row: bool  # True: boundaries are vertical lines; False: transposed
    pos0: float = 1.0

    def query(self, b: int, h: float, pos: float | None = None):
        """Mirror of the scan's case analysis at boundary b, height h, by
        a linear walk over the stored walls.  pos overrides the source
        coordinate for sources between boundaries (b then names the last
        boundary at or left of the source)."""
        src = self.pos0 + b if pos is None else pos
        for b2 in range(b + 1, len(self.walls)):
            w = self.walls[b2]
            if w is None:
                return (self._target(src, self.pos0 + b2), None, b2)
            if w[0] >= h:
                q = self.qlo[b2]
                if q is None:
                    q = self._target(src, self.pos0 + b2)
                return (q, b2, self.dlo[b2])
            if w[1] < h:
                return (self._target(src, self.pos0 + b2), None, b2)
        return (self._target(src, None), None, None)

    def _target(self, src, cap):
        txs = self.tree.coords if self.tree is not None else []
        return _rightmost_target(txs, src, cap)


# ---------------------------------------------------------------------------
# the reach graph


class ReachGraph:
    """Digraph whose reachability between critical points equals
    monotone-path reachability in the source free-space diagram."""

    __slots__ = ("fsd", "coords", "adj", "kind", "vtrees", "htrees", "_by_key", "_rows", "_cols")

    def __init__(self, fsd: FreeSpaceDiagram):
        self.fsd = fsd
        self.coords = []  # node id -> (x, y)
        self.adj = []  # node id -> successor ids
        self.kind = []  # "crit" | "tree" | "extra"
        self.vtrees = {}  # line x=i -> LineTree
        self.htrees = {}  # line y=j -> LineTree
        self._by_key = {}  # quantized (x, y) -> critical node id
        self._rows = {}  # row j -> _ScanState (targets on line y=j+1)
        self._cols = {}  # column i -> _ScanState (targets on line x=i+1)

    def _node(self, x: float, y: float, kind: str) -> int:
        nid = len(self.coords)
        self.coords.append((x, y))
        self.adj.append([])
        self.kind.append(kind)
        return nid

    def _crit(self, x: float, y: float) -> int:
        key = _qkey(x, y)
        nid = self._by_key.get(key)
        if nid is None:
            nid = self._node(x, y, "crit")
            self._by_key[key] = nid
        return nid

    def node_at(self, x: float, y: float):
        """Critical node id at the given coordinates, or None."""
        return self._by_key.get(_qkey(x, y))

    def critical_points(self) -> list:
        return [self.coords[i] for i in range(len(self.coords)) if self.kind[i] == "crit"]

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj)

    def reachable_from(self, src: int) -> bytearray:
        """Visited marks for every node reachable from src (inclusive)."""
        seen = bytearray(len(self.adj))
        seen[src] = 1
        stack = [src]
        adj = self.adj
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = 1
                    stack.append(w)
        return seen

    def reachable(self, src: int, dst: int) -> bool:
        if src == dst:
            return True
        return bool(self.reachable_from(src)[dst])


def _line_points(fsd: FreeSpaceDiagram):
    """Deduplicated critical coordinates per vertical and horizontal line."""
    n1, n2 = fsd.n1, fsd.n2
    vpts = {i: {} for i in range(1, n1 + 1)}
    hpts = {j: {} for j in range(1, n2 + 1)}
    for i in range(1, n1 + 1):
        for j in range(1, n2):
            iv = fsd.vint(i, j)
            if iv is not None:
                vpts[i][round(iv.lo / EPS)] = iv.lo
                vpts[i][round(iv.hi / EPS)] = iv.hi
    for j in range(1, n2 + 1):
        for i in range(1, n1):
            iv = fsd.hint(i, j)
            if iv is not None:
                hpts[j][round(iv.lo / EPS)] = iv.lo
                hpts[j][round(iv.hi / EPS)] = iv.hi
    # free corners belong to both of their lines; on degenerate diagrams
    # (a single row or column of lines) they are the only points
    for pi, pj in zip(*np.nonzero(fsd.corners)):
        i, j = int(pi) + 1, int(pj) + 1
        vpts[i][round(float(j) / EPS)] = float(j)
        hpts[j][round(float(i) / EPS)] = float(i)
    return vpts, hpts


def _wall_queries(iv_of, nb):
    """Boundary intervals and the per-boundary query heights (lo, then hi
    when distinct) for one row or column."""
    walls = [None] * nb
    queries = [[] for _ in range(nb)]
    for b in range(nb):
        iv = iv_of(b)
        if iv is None:
            continue
        walls[b] = (iv.lo, iv.hi)
        hs = [iv.lo]
        if round(iv.hi / EPS) != round(iv.lo / EPS):
            hs.append(iv.hi)
        queries[b] = hs
    return walls, queries


def _add_scan_edges(g, state, walls, queries, answers, node_of):
    """Turn one scan's answers into graph edges.

    node_of(b, h) maps a boundary index and transverse coordinate to a
    critical node id.  Builds state.hitree (the boundary-order tree over
    interval high ends) as a side effect.
    """
    nb = len(walls)
    present = [b for b in range(nb) if walls[b] is not None]
    if present:
        coords = [float(b) for b in present]
        leaf_ids = [node_of(b, walls[b][1]) for b in present]

        def alloc(lo, hi):
            x, y = g.coords[leaf_ids[lo]]
            x2, y2 = g.coords[leaf_ids[hi - 1]]
            return g._node(0.5 * (x + x2), 0.5 * (y + y2), "tree")

        state.hitree = LineTree(coords, leaf_ids, alloc, lambda p, c: g.adj[p].append(c))
    for b in range(nb):
        w = walls[b]
        if w is None:
            continue
        for h, (q, jp, death) in zip(queries[b], answers[b]):
            out = g.adj[node_of(b, h)]
            if q is not None and state.tree is not None:
                out.extend(canonical_nodes(state.tree, state.pos0 + b, q))
            if jp is not None:
                out.append(node_of(jp, walls[jp][0]))
            last = (death - 1) if death is not None else nb - 1
            if last > b and state.hitree is not None:
                out.extend(canonical_nodes(state.hitree, float(b + 1), float(last)))
        a, c = node_of(b, w[0]), node_of(b, w[1])
        if a != c:
            g.adj[a].append(c)


def build_reach_graph(fsd: FreeSpaceDiagram) -> ReachGraph:
    g = ReachGraph(fsd)
    n1, n2 = fsd.n1, fsd.n2
    vpts, hpts = _line_points(fsd)

    add_edge = lambda p, c: g.adj[p].append(c)
    for i, pts in vpts.items():
        if not pts:
            continue
        ys = sorted(pts.values())
        leaf_ids = [g._crit(float(i), y) for y in ys]

        def valloc(lo, hi, _x=float(i), _ys=ys):
            return g._node(_x, 0.5 * (_ys[lo] + _ys[hi - 1]), "tree")

        g.vtrees[i] = LineTree(ys, leaf_ids, valloc, add_edge)
    for j, pts in hpts.items():
        if not pts:
            continue
        xs = sorted(pts.values())
        leaf_ids = [g._crit(x, float(j)) for x in xs]

        def halloc(lo, hi, _y=float(j), _xs=xs):
            return g._node(0.5 * (_xs[lo] + _xs[hi - 1]), _y, "tree")

        g.htrees[j] = LineTree(xs, leaf_ids, halloc, add_edge)

    # rows: sources on vertical boundaries, targets on the row's top line
    for j in range(1, n2):
        walls, queries = _wall_queries(lambda b: fsd.vint(b + 1, j), n1)
        tree = g.htrees.get(j + 1)
        txs = tree.coords if tree is not None else []
        qlo, dlo, answers = _scan_rightmost(walls, queries, txs)
        state = _ScanState(walls, qlo, dlo, tree, None, True)
        g._rows[j] = state
        node_of = lambda b, h: g._by_key[_qkey(float(b + 1), h)]
        _add_scan_edges(g, state, walls, queries, answers, node_of)

    # columns: sources on horizontal boundaries, targets on the right line
    for i in range(1, n1):
        walls, queries = _wall_queries(lambda b: fsd.hint(i, b + 1), n2)
        tree = g.vtrees.get(i + 1)
        tys = tree.coords if tree is not None else []
        qlo, dlo, answers = _scan_rightmost(walls, queries, tys)
        state = _ScanState(walls, qlo, dlo, tree, None, False)
        g._cols[i] = state
        node_of = lambda b, h: g._by_key[_qkey(h, float(b + 1))]
        _add_scan_edges(g, state, walls, queries, answers, node_of)
    return g


# ---------------------------------------------------------------------------
# public row operation


@dataclass(frozen=True)
class BasicPathTarget:
    """Rightmost reach of one vertical-boundary source within its row."""

    source: tuple  # (x, y) on a vertical boundary
    rightmost: tuple | None  # (x, y) on the row's top line
    run: tuple  # certified-reachable top-line points, left to right


def rightmost_reach_row(cells, d=None) -> list:
    """Per-source rightmost basic-path targets for one row of cells.

    cells lists CellFreeSpace entries left to right.  Sources are the free
    interval endpoints on the vertical boundaries, lowest first; targets
    are critical points on the row's top line.  d is accepted for
    signature parity and unused: the intervals already encode it.
    """
    if not cells:
        return []
    k = len(cells)
    i0, j = cells[0].cell
    top_y = float(j + 1)
    ivs = [c.left for c in cells] + [cells[-1].right]
    walls, queries = _wall_queries(lambda b: ivs[b], k + 1)
    tops = {}
    for c in cells:
        if c.top is not None:
            tops[round(c.top.lo / EPS)] = c.top.lo
            tops[round(c.top.hi / EPS)] = c.top.hi
    txs = sorted(tops.values())
    _, _, answers = _scan_rightmost(walls, queries, txs, pos0=float(i0))
    out = []
    for b in range(k + 1):
        pos = float(i0 + b)
        for h, (q, _, _) in zip(queries[b], answers[b]):
            if q is None:
                run = ()
            else:
                li = bisect_left(txs, pos - EPS)
                ri = bisect_right(txs, q + EPS)
                run = tuple((x, top_y) for x in txs[li:ri])
            out.append(
                BasicPathTarget(
                    source=(pos, h),
                    rightmost=None if q is None else (q, top_y),
                    run=run,
                )
            )
    return out


# ---------------------------------------------------------------------------
# decision procedure and post-build insertion


def frechet_decide_continuous(t1: Trajectory, t2: Trajectory, d: float) -> bool:
    """True exactly when the continuous Frechet distance is at most d."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    fsd = build_continuous_fsd(t1, t2, d)
    if not (fsd.corner_free(1, 1) and fsd.corner_free(fsd.n1, fsd.n2)):
        return False
    g = build_reach_graph(fsd)
    src = g.node_at(1.0, 1.0)
    dst = g.node_at(float(fsd.n1), float(fsd.n2))
    if src is None or dst is None:
        return False
    return g.reachable(src, dst)


def iter_line_trees(g: ReachGraph):
    """Every LineTree the graph owns, including the scans' high-end trees."""
    yield from g.vtrees.values()
    yield from g.htrees.values()
    for states in (g._rows, g._cols):
        for st in states.values():
            if st.hitree is not None:
                yield st.hitree


def insert_extra_node(g: ReachGraph, point) -> int:
    """Add a query node at a free point of the diagram.

    The node gets outgoing edges only, computed from the retained scan
    state of the rows and columns it lies in: the same edge families a
    critical point at the same coordinates would receive, O(log n) edges
    in total.  Points between grid lines are served by their row's scan
    alone, entered mid-cell.  Raises ValueError outside the free space.
    """
    x, y = float(point[0]), float(point[1])
    fsd = g.fsd
    n1, n2 = fsd.n1, fsd.n2
    if not (1.0 - EPS <= x <= n1 + EPS and 1.0 - EPS <= y <= n2 + EPS):
        raise ValueError("point outside the diagram")
    xi, yj = round(x), round(y)
    on_v = abs(x - xi) <= EPS and 1 <= xi <= n1
    on_h = abs(y - yj) <= EPS and 1 <= yj <= n2
    if on_v:
        x = float(xi)
    if on_h:
        y = float(yj)

    free = False
    hits = []  # (scan state, boundary index, query height, mid-cell source pos)
    if on_v:
        rows = [yj - 1, yj] if on_h else [int(math.floor(y))]
        for j in rows:
            state = g._rows.get(j)
            if state is None:
                continue
            w = state.walls[xi - 1]
            if w is not None and w[0] - EPS <= y <= w[1] + EPS:
                free = True
                hits.append((state, xi - 1, y, None))
    if on_h:
        cols = [xi - 1, xi] if on_v else [int(math.floor(x))]
        for i in cols:
            state = g._cols.get(i)
            if state is None:
                continue
            w = state.walls[yj - 1]
            if w is not None and w[0] - EPS <= x <= w[1] + EPS:
                free = True
                hits.append((state, yj - 1, x, None))
    if not (on_v or on_h):
        c, j = int(math.floor(x)), int(math.floor(y))
        iv = fsd.slice_v(x, j)
        if iv is not None and iv.lo - EPS <= y <= iv.hi + EPS:
            free = True
            state = g._rows.get(j)
            if state is not None:
                hits.append((state, c - 1, y, x))
            state = g._cols.get(c)
            if state is not None:
                hits.append((state, j - 1, x, y))
    if not free and on_v and on_h:
        free = fsd.corner_free(xi, yj)  # diagrams with no rows or columns
    if not free:
        raise ValueError("point is not in the free space")

    nid = g._node(x, y, "extra")
    out = g.adj[nid]
    for state, b, h, pos in hits:
        walls = state.walls

        def node_of(b2, h2, _s=state):
            bx = _s.pos0 + b2
            return g._by_key[_qkey(bx, h2) if _s.row else _qkey(h2, bx)]

        q, jp, death = state.query(b, h, pos)
        if q is not None and state.tree is not None:
            lower = state.pos0 + b if pos is None else pos
            out.extend(canonical_nodes(state.tree, lower, q))
        if jp is not None:
            out.append(node_of(jp, walls[jp][0]))
        last = (death - 1) if death is not None else len(walls) - 1
        if last > b and state.hitree is not None:
            out.extend(canonical_nodes(state.hitree, float(b + 1), float(last)))
        if pos is None and h < walls[b][1] - EPS:
            out.append(node_of(b, walls[b][1]))
    return nid
