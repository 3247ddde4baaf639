"""Slow, independent ground-truth procedures.

Everything here favors obvious correctness over speed and is deliberately
decoupled from the production data structures: the continuous decision oracle
derives its own edge intervals, the clustering oracles run plain reachability
sweeps over explicit grids, and the forest/interval oracles are direct
restatements of the contracts they check.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import EPS, Point2, Trajectory, tol
from .instance import SCInstance

SC_DISCRETE_ORACLE_MAX_N = 14
SC_CONTINUOUS_ORACLE_MAX_N = 10
INFINITE_PATHS = 10**9


class OracleRefusal(Exception):
    """Raised when an oracle cannot vouch for its own answer."""


# ---------------------------------------------------------------------------
# discrete Frechet distance


def discrete_frechet_dp(t1: Trajectory, t2: Trajectory) -> float:
    """Exact discrete Frechet distance by dynamic programming.

    D[i][j] is the best achievable bottleneck over couplings of the first
    i+1 and j+1 vertices; each entry takes the max of the local distance and
    the best of the three predecessor moves.
    """
    a = t1.xy
    b = t2.xy
    dx = a[:, 0:1] - b[None, :, 0]
    dy = a[:, 1:2] - b[None, :, 1]
    dist = np.hypot(dx, dy)
    n1, n2 = dist.shape
    dp = np.empty_like(dist)
    dp[0, 0] = dist[0, 0]
    for j in range(1, n2):
        dp[0, j] = max(dp[0, j - 1], dist[0, j])
    for i in range(1, n1):
        dp[i, 0] = max(dp[i - 1, 0], dist[i, 0])
        row = dp[i]
        prev = dp[i - 1]
        drow = dist[i]
        for j in range(1, n2):
            best = prev[j]
            if prev[j - 1] < best:
                best = prev[j - 1]
            if row[j - 1] < best:
                best = row[j - 1]
            row[j] = best if best > drow[j] else drow[j]
    return float(dp[n1 - 1, n2 - 1])


# ---------------------------------------------------------------------------
# continuous Frechet decision (reachable-interval propagation)


def _edge_free(p: Point2, a: Point2, b: Point2, d_eff: float):
    # projection form, kept separate from the production quadratic solver
    ux, uy = b.x - a.x, b.y - a.y
    wx, wy = p.x - a.x, p.y - a.y
    L2 = ux * ux + uy * uy
    if L2 == 0.0:
        if math.hypot(wx, wy) <= d_eff:
            return (0.0, 1.0)
        return None
    proj = (wx * ux + wy * uy) / L2
    cx, cy = wx - proj * ux, wy - proj * uy
    dmin2 = cx * cx + cy * cy
    w2 = (d_eff * d_eff - dmin2) / L2
    if w2 < 0.0:
        return None
    w = math.sqrt(w2)
    lo, hi = max(0.0, proj - w), min(1.0, proj + w)
    if lo > hi:
        return None
    return (lo, hi)


def continuous_frechet_decide_oracle(t1: Trajectory, t2: Trajectory, d: float) -> bool:
    """Classic reachability propagation over cell edges, cell by cell."""
    d_eff = d + tol(d)
    slop = 1e-12
    v1, v2 = t1.vertices, t2.vertices
    n1, n2 = t1.n, t2.n
    if n1 == 1 and n2 == 1:
        return v1[0].dist(v2[0]) <= d_eff
    if n1 == 1:
        return all(v1[0].dist(q) <= d_eff for q in v2)
    if n2 == 1:
        return all(v2[0].dist(p) <= d_eff for p in v1)
    if v1[0].dist(v2[0]) > d_eff or v1[-1].dist(v2[-1]) > d_eff:
        return False

    def left_iv(i, j):
        # vertical edge x = i, y in [j, j+1]
        return _edge_free(v1[i - 1], v2[j - 1], v2[j], d_eff)

    def bottom_iv(i, j):
        # horizontal edge y = j, x in [i, i+1]
        return _edge_free(v2[j - 1], v1[i - 1], v1[i], d_eff)

    # reach along the bottom boundary (y = 1)
    breach = [None] * (n1 - 1)
    cur = bottom_iv(1, 1)
    if cur is not None and cur[0] <= slop:
        breach[0] = (0.0, cur[1])
        for i in range(2, n1 - 1 + 1):
            if breach[i - 2] is None or breach[i - 2][1] < 1.0 - slop:
                break
            iv = bottom_iv(i, 1)
            if iv is None or iv[0] > slop:
                break
            breach[i - 1] = iv

    # reach on the left boundary of the current row's first cell
    lreach_first = left_iv(1, 1)
    if lreach_first is not None and lreach_first[0] > slop:
        lreach_first = None

    for j in range(1, n2):
        lreach = lreach_first
        new_breach = [None] * (n1 - 1)
        for i in range(1, n1):
            L = lreach
            B = breach[i - 1]
            riv = left_iv(i + 1, j)
            tiv = bottom_iv(i, j + 1)
            if B is not None:
                R = riv
            elif L is not None and riv is not None:
                lo = max(riv[0], L[0])
                R = (lo, riv[1]) if lo <= riv[1] else None
            else:
                R = None
            if L is not None:
                T = tiv
            elif B is not None and tiv is not None:
                lo = max(tiv[0], B[0])
                T = (lo, tiv[1]) if lo <= tiv[1] else None
            else:
                T = None
            new_breach[i - 1] = T
            lreach = R
        if j == n2 - 1:
            last_T = new_breach[n1 - 2]
            return (lreach is not None and lreach[1] >= 1.0 - slop) or (
                last_T is not None and last_T[1] >= 1.0 - slop
            )
        breach = new_breach
        # climb the left boundary into the next row
        if lreach_first is not None and lreach_first[1] >= 1.0 - slop:
            iv = left_iv(1, j + 1)
            lreach_first = iv if (iv is not None and iv[0] <= slop) else None
        else:
            lreach_first = None
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# discrete clustering brute force


def _min_end_row(free, s, t, lo_row, hi_row):
    """Minimal end row on column t over monotone grid paths from column s,
    restricted to rows [lo_row, hi_row], starting anywhere in that band.
    Rows/columns are 1-based; moves are right, diagonal, up.  Returns the
    end row or None."""
    rows = range(lo_row, hi_row + 1)
    reach = {y: free[s][y] for y in rows}
    for y in rows:
        if not reach[y] and free[s][y] and reach.get(y - 1, False):
            reach[y] = True
    for x in range(s + 1, t + 1):
        nxt = {}
        for y in rows:
            nxt[y] = free[x][y] and (reach[y] or reach.get(y - 1, False))
        for y in rows:
            if not nxt[y] and free[x][y] and nxt.get(y - 1, False):
                nxt[y] = True
        reach = nxt
    for y in rows:
        if reach[y]:
            return y
    return None


def _chain_count(free, s, t, lo_row, hi_row, cap):
    """Greedy count of stacked monotone paths (next start row >= previous
    end row) between columns s and t within the row band."""
    count = 0
    b = lo_row
    while count < cap:
        e = _min_end_row(free, s, t, b, hi_row)
        if e is None:
            break
        # a path ending where it may start would be a fully-free row,
        # which the caller has already excluded
        assert e > b, "no progress in chain count"
        count += 1
        b = e
        if b > hi_row:
            break
    return count


def sc_discrete_bruteforce(inst: SCInstance) -> bool:
    """Brute-force discrete clustering decision.

    For every candidate reference (start vertex s, minimal end vertex t with
    arclength >= ell): admissible companion paths live entirely in rows
    y <= s or y >= t (touching the reference's endpoints is the one allowed
    overlap point).  A fully-free admissible row yields unboundedly many
    coincident single-row paths, which is an immediate YES; otherwise stacked
    paths are counted greedily by minimal end row per region.
    """
    t_ = inst.t
    n = t_.n
    if n > SC_DISCRETE_ORACLE_MAX_N:
        raise OracleRefusal("instance too large for the discrete brute force: n=%d" % n)
    d_eff = inst.d + tol(inst.d)
    free = [[False] * (n + 1)]
    for x in range(1, n + 1):
        col = [False]
        px = t_.vertices[x - 1]
        for y in range(1, n + 1):
            col.append(px.dist(t_.vertices[y - 1]) <= d_eff)
        free.append(col)
    # free[x][y] with 1-based vertex indices
    freeT = free

    for s in range(1, n + 1):
        tv = t_.advance_to_vertex(float(s), inst.ell)
        if tv is None:
            break
        if tv <= s:
            continue
        full_row = None
        for y in list(range(1, s + 1)) + list(range(tv, n + 1)):
            if all(freeT[x][y] for x in range(s, tv + 1)):
                full_row = y
                break
        if full_row is not None:
            return True
        need = inst.m - 1
        cnt = _chain_count(freeT, s, tv, 1, s, need)
        if cnt < need:
            cnt += _chain_count(freeT, s, tv, tv, n, need - cnt)
        if cnt >= need:
            return True
    return False


# ---------------------------------------------------------------------------
# fine-grid machinery for the continuous oracles


def sample_params(n: int, res: int) -> np.ndarray:
    """Parameter grid over [1, n] with ``res`` subdivisions per unit."""
    return 1.0 + np.arange((n - 1) * res + 1, dtype=np.float64) / res


def sample_points(t: Trajectory, params: np.ndarray) -> np.ndarray:
    """(k, 2) array of points at the given parameters."""
    i = np.clip(np.floor(params).astype(np.int64), 1, max(t.n - 1, 1))
    mu = params - i
    a = t.xy[i - 1]
    if t.n == 1:
        return np.repeat(t.xy, len(params), axis=0)
    b = t.xy[i]
    return a + mu[:, None] * (b - a)


def grid_free_matrix(t1: Trajectory, t2: Trajectory, d: float, res: int) -> np.ndarray:
    """Boolean matrix free[ix, iy] over the sampled parameter grid."""
    d_eff = d + tol(d)
    p1 = sample_points(t1, sample_params(t1.n, res))
    p2 = sample_points(t2, sample_params(t2.n, res))
    out = np.empty((len(p1), len(p2)), dtype=bool)
    block = max(1, int(4e6) // max(len(p2), 1))
    for i0 in range(0, len(p1), block):
        chunk = p1[i0 : i0 + block]
        dx = chunk[:, 0:1] - p2[None, :, 0]
        dy = chunk[:, 1:2] - p2[None, :, 1]
        out[i0 : i0 + block] = dx * dx + dy * dy <= d_eff * d_eff
    return out


def _climb(free_col: np.ndarray, seed: np.ndarray) -> np.ndarray:
    """Upward closure within one column: a row is reachable when some seed at
    or below it connects through contiguous free rows."""
    idx = np.arange(len(free_col))
    last_block = np.maximum.accumulate(np.where(~free_col, idx, -1))
    last_seed = np.maximum.accumulate(np.where(seed & free_col, idx, -1))
    return free_col & (last_seed > last_block)


def propagate_columns(free: np.ndarray, c0: int, c1: int, init_rows: np.ndarray) -> np.ndarray:
    """Monotone reachability from column c0 (seeded by init_rows) to column c1.

    Moves are right, diagonal, and up on the sampled grid.  Returns the
    reachable-row boolean vector at column c1.
    """
    reach = _climb(free[c0], init_rows)
    for c in range(c0 + 1, c1 + 1):
        shifted = np.zeros_like(reach)
        shifted[1:] = reach[:-1]
        seed = reach | shifted
        reach = _climb(free[c], seed)
    return reach


def grid_reachable(free: np.ndarray, c0: int, r0: int, c1: int, r1: int) -> bool:
    """Monotone point-to-point reachability on the sampled grid."""
    if c1 < c0 or r1 < r0 or not free[c0, r0] or not free[c1, r1]:
        return False
    init = np.zeros(free.shape[1], dtype=bool)
    init[r0] = True
    return bool(propagate_columns(free, c0, c1, init)[r1])


def monotone_path_exists_between_cols(free: np.ndarray, c0: int, c1: int) -> bool:
    """Any-start-to-any-end monotone reachability between two columns."""
    init = np.ones(free.shape[1], dtype=bool)
    return bool(propagate_columns(free, c0, c1, init).any())


def max_paths_between_cols(free, c0, c1, row_lo, row_hi, cap):
    """Greedy count of stacked monotone paths between two columns, rows
    restricted to [row_lo, row_hi].  A fully-free row in the band means
    unboundedly many coincident paths and returns INFINITE_PATHS."""
    if row_hi < row_lo:
        return 0
    band = free[c0 : c1 + 1, row_lo : row_hi + 1]
    full = np.where(band.all(axis=0))[0]
    if len(full):
        return INFINITE_PATHS
    count = 0
    b = 0  # band-relative minimal start row
    nrows = row_hi - row_lo + 1
    while count < cap:
        init = np.zeros(nrows, dtype=bool)
        init[b:] = True
        reach = propagate_columns(band, 0, c1 - c0, init)
        hits = np.where(reach)[0]
        if len(hits) == 0:
            break
        e = int(hits[0])
        # only a horizontal path could end where it may start; those were
        # excluded by the full-row check above
        assert e > b, "no progress in path count"
        count += 1
        b = e
        if b >= nrows:
            break
    return count


# ---------------------------------------------------------------------------
# continuous clustering brute force


def _candidate_starts(inst: SCInstance, res: int) -> np.ndarray:
    xs = list(sample_params(inst.t.n, res))
    try:
        from .freespace import build_continuous_fsd, enumerate_internal_critical_points

        fsd = build_continuous_fsd(inst.t, inst.t, inst.d)
        xs.extend(p.x for p in fsd.external)
        for p in enumerate_internal_critical_points(inst.t, inst.d, inst.ell):
            xs.append(p.x)
            if p.partner is not None:
                xs.append(p.partner[0])
    except ImportError:  # pragma: no cover - early bootstrap only
        pass
    xs = sorted(set(float(x) for x in xs))
    return np.array(xs)


def sc_continuous_bruteforce(inst: SCInstance, res: int = 64) -> bool:
    """Fine-grid continuous clustering decision.

    Discretizes the free space at ``res`` samples per cell side, then for
    every candidate reference start s (all grid parameters plus critical
    point coordinates): snap s and its arclength-ell partner t to the grid,
    restrict companion paths to rows at or below s / at or above t, and count
    stacked paths per region.  Refuses instances without a margin
    certificate, since the answer is only trustworthy away from degeneracies.
    """
    t_ = inst.t
    if t_.n > SC_CONTINUOUS_ORACLE_MAX_N:
        raise OracleRefusal("instance too large for the continuous brute force: n=%d" % t_.n)
    if inst.margin is None or not (inst.margin > 0):
        raise OracleRefusal("continuous brute force needs a margin certificate")
    if t_.n == 1:
        return False
    free = grid_free_matrix(t_, t_, inst.d, res)
    need = inst.m - 1
    ncols = free.shape[0]
    for s in _candidate_starts(inst, res):
        t_par = t_.advance_by_length(float(s), inst.ell)
        if t_par is None:
            continue
        cs = int(round((s - 1.0) * res))
        ct = int(round((t_par - 1.0) * res))
        cs = min(max(cs, 0), ncols - 1)
        ct = min(max(ct, 0), ncols - 1)
        if ct <= cs:
            continue
        cnt = max_paths_between_cols(free, cs, ct, 0, cs, need)
        if cnt < need:
            cnt += max_paths_between_cols(free, cs, ct, ct, ncols - 1, need - cnt)
        if cnt >= need:
            return True
    return False


# ---------------------------------------------------------------------------
# data-structure oracles


class NaiveForest:
    """Plain parent-pointer rooted forest; the reference model for the
    link-cut structure."""

    def __init__(self):
        self.parent = []
        self.mark_y = []

    def make_node(self, mark_y=None):
        self.parent.append(None)
        self.mark_y.append(mark_y)
        return len(self.parent) - 1

    def find_root(self, v):
        while self.parent[v] is not None:
            v = self.parent[v]
        return v

    def link(self, child, parent):
        if self.parent[child] is not None:
            raise ValueError("link: child is not a root")
        if self.find_root(parent) == child:
            raise ValueError("link: nodes already share a tree")
        self.parent[child] = parent

    def cut(self, child):
        if self.parent[child] is None:
            raise ValueError("cut: node is a root")
        self.parent[child] = None

    def highest_marked_descendant(self, root):
        best = None
        for v in range(len(self.parent)):
            if self.mark_y[v] is None:
                continue
            if self.find_root(v) == root:
                if best is None or self.mark_y[v] > best[1]:
                    best = (v, self.mark_y[v])
        return best


def greedy_max_nonoverlapping(intervals) -> int:
    """Maximum number of pairwise non-overlapping intervals (sharing a single
    endpoint is allowed) by earliest-finish greedy scheduling.

    Exact for containment-free families, which is the store's invariant; with
    containment, a degenerate interval strictly inside a longer one would be
    compatible with it yet never chainable.
    """
    best = 0
    bound = -math.inf
    for lo, hi in sorted(intervals, key=lambda iv: (iv[1], iv[0])):
        if lo >= bound:
            best += 1
            bound = hi
    return best
