"""Subtrajectory clustering decisions under the discrete Fréchet distance.

The decision asks for m subtrajectories of one trajectory, pairwise
overlapping in at most one vertex, one of which (the reference) spans
arclength at least ell while the other m-1 stay within discrete Fréchet
distance d of it.  On the n-by-n grid of vertex pairs this reduces to: for
some candidate vertex range [s, t], find m-1 monotone grid paths from
column s to column t whose row spans meet [s, t] in at most one vertex and
pairwise share at most one row.

Two solvers are provided.  ``solve_subproblem_discrete`` answers one fixed
(s, t) by greedy depth-first search: always try the right neighbour first,
then the diagonal, then up, so every found path ends as low as possible;
a grid point is knocked out permanently when the search backtracks over
it, and only then.  ``sc_decide_discrete`` sweeps s across all candidate
ranges and reuses search work between rounds through a link-cut forest:
each move is recorded as a link, moving onto an already-explored point
jumps straight to its tree root (replaying every move made from there in
earlier rounds), and backtracking cuts the dead branch so it is never
replayed again.
"""

from __future__ import annotations

import numpy as np

from .freespace import build_discrete_grid
from .instance import SCInstance, SCWitness
from .linkcut import LinkCutForest

__all__ = [
    "BudgetViolation",
    "candidate_references_discrete",
    "solve_subproblem_discrete",
    "validate_subproblem_paths",
    "sc_decide_discrete",
]


class BudgetViolation(AssertionError):
    """An instrumented operation-count bound was exceeded."""


def candidate_references_discrete(traj, ell):
    """Candidate (s, t) vertex ranges for the reference subtrajectory.

    For each start vertex s the minimal end vertex t whose subtrajectory
    has arclength >= ell, keeping for every distinct t only the largest s
    so that no returned range contains another.  A solution for a dropped
    wider range restricts to one for the kept range inside it, so the
    pruning never changes the decision.
    """
    if not ell > 0:
        raise ValueError("ell must be positive")
    n = traj.n
    by_end = {}
    for s in range(1, n + 1):
        t = traj.advance_to_vertex(float(s), ell)
        if t is None:
            break
        if t > s:
            by_end[t] = s  # ascending s, so the largest s wins
    return sorted((s, t) for t, s in by_end.items())


def _next_free_row(col, y):
    """Lowest 1-based row >= y with col True, or None."""
    m = col.shape[0]
    if y > m:
        return None
    off = int(np.argmax(col[y - 1 :]))
    if not col[y - 1 + off]:
        return None
    return y + off


def _find_start(col, y, s, t):
    """Lowest admissible start row >= y on the start column.

    Rows strictly inside (s, t) can never begin a valid path (their span
    would meet the reference range in two or more vertices), so the scan
    hops over that band instead of entering it.
    """
    while True:
        y = _next_free_row(col, y)
        if y is None or not s < y < t:
            return y
        y = t


def solve_subproblem_discrete(grid, m, s, t, stats=None):
    """Greedy DFS answer to one fixed (s, t) range: m-1 paths or None.

    Operates on a private copy of the validity grid; knocked-out points do
    not leak between calls.  ``stats`` (optional dict) receives the visit
    and revisit counters.
    """
    if grid.n1 != grid.n2:
        raise ValueError("subtrajectory clustering needs a self free-space grid")
    n = grid.n1
    if not 1 <= s < t <= n:
        raise ValueError(f"need 1 <= s < t <= n, got ({s}, {t})")
    free = grid.free.copy()  # [x-1, y-1]; False covers non-free and knocked out
    seen_by = np.zeros((n, n), dtype=np.int16)  # last path index to visit
    revisits = 0
    visits = 0
    paths = []
    bound = 1
    for i in range(1, m):
        path = None
        y0 = bound
        while path is None:
            y0 = _find_start(free[s - 1], y0, s, t)
            if y0 is None:
                if stats is not None:
                    stats.update(visits=visits, revisits=revisits, completed=i - 1)
                return None
            lower = y0 <= s
            xs, ys, ks = [s], [y0], [0]
            if seen_by[s - 1, y0 - 1]:
                revisits += 1
            seen_by[s - 1, y0 - 1] = i
            visits += 1
            outcome = None
            while outcome is None:
                x, y, k = xs[-1], ys[-1], ks[-1]
                if x == t:
                    outcome = "done"
                    break
                moved = False
                while k < 3:
                    if k == 0:
                        nx, ny = x + 1, y
                    elif k == 1:
                        nx, ny = x + 1, y + 1
                    else:
                        nx, ny = x, y + 1
                    k += 1
                    if ny > n or not free[nx - 1, ny - 1]:
                        continue
                    ks[-1] = k
                    if seen_by[nx - 1, ny - 1] not in (0, i):
                        revisits += 1
                    seen_by[nx - 1, ny - 1] = i
                    visits += 1
                    if lower and ny > s:
                        # dipping below s and rising past it would meet the
                        # reference range twice; restart in the region >= t
                        outcome = "band"
                        break
                    xs.append(nx)
                    ys.append(ny)
                    ks.append(0)
                    moved = True
                    break
                if outcome is not None:
                    break
                if not moved:
                    free[x - 1, y - 1] = False  # dead end, knocked out for good
                    xs.pop(), ys.pop(), ks.pop()
                    if not xs:
                        outcome = "exhausted"
            if outcome == "done":
                path = list(zip(xs, ys))
            elif outcome == "band":
                y0 = t
            else:  # exhausted: the start itself was knocked out above
                y0 = y0 + 1
        paths.append(path)
        bound = path[-1][1]
    budget = 2 * m * (t - s)
    if revisits > budget:
        raise BudgetViolation(f"revisits {revisits} > 2m(t-s) = {budget} at ({s}, {t})")
    if stats is not None:
        stats.update(visits=visits, revisits=revisits, completed=m - 1)
    return paths


def validate_subproblem_paths(grid, s, t, paths):
    """List of constraint violations for a path family (empty if valid)."""
    problems = []
    spans = []
    for idx, path in enumerate(paths):
        if path[0][0] != s:
            problems.append(f"path {idx} does not start on column {s}")
        if path[-1][0] != t:
            problems.append(f"path {idx} does not end on column {t}")
        for (x0, y0), (x1, y1) in zip(path, path[1:]):
            if (x1 - x0, y1 - y0) not in ((1, 0), (1, 1), (0, 1)):
                problems.append(f"path {idx} has a non-monotone step")
                break
        if not all(grid.is_free(x, y) for x, y in path):
            problems.append(f"path {idx} leaves the free space")
        lo, hi = path[0][1], path[-1][1]
        if min(hi, t) - max(lo, s) > 0:
            problems.append(f"path {idx} span [{lo}, {hi}] meets [{s}, {t}] in 2+ vertices")
        spans.append((lo, hi))
    for a in range(len(spans)):
        for b in range(a + 1, len(spans)):
            lo = max(spans[a][0], spans[b][0])
            hi = min(spans[a][1], spans[b][1])
            if hi - lo > 0:
                problems.append(f"paths {a} and {b} overlap in 2+ rows")
    return problems


def sc_decide_discrete(inst: SCInstance, stats=None):
    """Full decision: sweep candidate ranges with link-cut path reuse.

    Returns (decision, witness-or-None).  Link, cut, and revisit counts are
    checked against their budgets and reported through ``stats``.
    """
    traj = inst.t
    n = traj.n
    cands = candidate_references_discrete(traj, inst.ell)
    if stats is None:
        stats = {}
    stats.update(rounds=0, links=0, cuts=0, revisit_max=0, nodes=0)
    if not cands:
        return False, None

    free = build_discrete_grid(traj, traj, inst.d).free.copy()
    ids = np.full(n * n, -1, dtype=np.int32)  # grid point -> forest node
    stamp = np.zeros(n * n, dtype=np.int32)  # last round to visit the point
    forest = LinkCutForest()
    nxt = []  # per node: first neighbour direction not yet settled
    px = []
    py = []

    def node_at(x, y):
        p = (x - 1) * n + (y - 1)
        v = int(ids[p])
        if v < 0:
            v = forest.make_node(payload=p)
            ids[p] = v
            nxt.append(0)
            px.append(x)
            py.append(y)
        return v

    answer = None
    for round_no, (s, t) in enumerate(cands, start=1):
        revisits = 0
        col = free[s - 1]
        scan_y = 1
        bound = 1
        paths_found = []
        while len(paths_found) < inst.m - 1:
            y0 = _find_start(col, max(scan_y, bound), s, t)
            if y0 is None:
                break
            scan_y = y0
            lower = y0 <= s
            start = node_at(s, y0)
            p0 = (s - 1) * n + (y0 - 1)
            if stamp[p0] == round_no:
                revisits += 1
            stamp[p0] = round_no
            cur = forest.find_root(start)
            from_backtrack = False
            outcome = None
            while outcome is None:
                cx, cy = px[cur], py[cur]
                if cur != start:
                    p = (cx - 1) * n + (cy - 1)
                    if stamp[p] == round_no:
                        # resuming one's own search after a backtrack is not
                        # a revisit; crossing another path's trail is
                        if not from_backtrack:
                            revisits += 1
                    else:
                        stamp[p] = round_no
                from_backtrack = False
                if lower and cy > s:
                    outcome = "band"  # a stored chain climbed past s
                    break
                while True:
                    if cx == t:
                        outcome = "done"
                        break
                    k = nxt[cur]
                    moved = False
                    while k < 3:
                        if k == 0:
                            nx_, ny_ = cx + 1, cy
                        elif k == 1:
                            nx_, ny_ = cx + 1, cy + 1
                        else:
                            nx_, ny_ = cx, cy + 1
                        k += 1
                        if ny_ > n or not free[nx_ - 1, ny_ - 1]:
                            continue
                        nxt[cur] = k
                        tgt = node_at(nx_, ny_)
                        p = (nx_ - 1) * n + (ny_ - 1)
                        if stamp[p] == round_no:
                            revisits += 1
                        stamp[p] = round_no
                        forest.link(cur, tgt)
                        cur = forest.find_root(tgt)
                        moved = True
                        break
                    if moved:
                        if cur == tgt:
                            # no stored chain: stay in the inner walk
                            cx, cy = px[cur], py[cur]
                            if lower and cy > s:
                                outcome = "band"
                                break
                            continue
                        break  # jumped: re-enter landing checks
                    nxt[cur] = 3
                    # dead end: sever and knock out, resume below the cut
                    for ch in forest.children_of(cur):
                        forest.cut(ch)
                    free[cx - 1, cy - 1] = False
                    if cur == start:
                        outcome = "exhausted"
                        break
                    cur = forest.find_root(start)
                    from_backtrack = True
                    break
            if outcome == "done":
                paths_found.append((start, cur))
                bound = py[cur]
            elif outcome == "band":
                scan_y = t
            else:
                scan_y = y0 + 1
        budget = 2 * inst.m * (t - s)
        if revisits > budget:
            raise BudgetViolation(
                f"revisits {revisits} > 2m(t-s) = {budget} in round ({s}, {t})"
            )
        stats["revisit_max"] = max(stats["revisit_max"], revisits)
        stats["rounds"] = round_no
        if len(paths_found) == inst.m - 1:
            witness_paths = []
            intervals = []
            for g, r in paths_found:
                chain = [g]
                while chain[-1] != r:
                    chain.append(forest.parent_of(chain[-1]))
                witness_paths.append([(px[v], py[v]) for v in chain])
                intervals.append((py[g], py[r]))
            answer = SCWitness(reference=(s, t), paths=witness_paths, intervals=intervals)
            break

    stats["links"] = forest.link_count
    stats["cuts"] = forest.cut_count
    stats["nodes"] = len(forest)
    update_budget = 6 * n * n
    if forest.link_count + forest.cut_count > update_budget:
        raise BudgetViolation(
            f"links+cuts {forest.link_count + forest.cut_count} > 6n^2 = {update_budget}"
        )
    return (answer is not None), answer
