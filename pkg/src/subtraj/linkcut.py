"""Dynamic rooted forests with logarithmic link, cut, and root queries.

The sweepline solvers grow forests over free-space grid points: every link
attaches a current root below some other node, and every cut detaches a
child of a root.  The queries they lean on (jump to the root of the tree a
node belongs to, report the highest marked node of a tree) must stay cheap
even when trees degenerate into long chains, which rules out a plain
parent-pointer forest.

Implementation: splay-based link-cut trees over the represented forest.
Auxiliary trees hold preferred paths keyed by depth, leftmost meaning
shallowest, so the represented root of a tree is the leftmost node of the
auxiliary tree produced by an access.  A parallel parent/children mirror of
the represented forest supports the subtree traversals (witness walks, lazy
aggregate rebuilds) that the auxiliary trees obscure.

The per-tree aggregate, the marked descendant with maximum y, is combined
eagerly on link (max of the two roots' values) and invalidated on cut only
when the severed subtree could hold the recorded best.  A query on an
invalidated root rebuilds it by one traversal of the mirror and bumps
``lazy_recompute_count``; the sweeps are expected to keep that counter at
zero on their hot path and assert so.

Contract violations (linking a non-root, cutting a root, aggregate query on
a non-root, unknown ids) raise ValueError.
"""

from __future__ import annotations

__all__ = ["LinkCutForest"]


class LinkCutForest:
    """Rooted dynamic forest: link, cut, find_root, highest marked descendant.

    Node ids are dense integers in creation order; per-node payload and mark
    live in parallel arrays.  ``link_count`` and ``cut_count`` feed the
    sweepline budget assertions.
    """

    __slots__ = (
        "_par",
        "_lc",
        "_rc",
        "_rep_parent",
        "_first_child",
        "_next_sib",
        "_prev_sib",
        "_mark_y",
        "payload",
        "_agg",
        "_dirty",
        "_n_marked",
        "link_count",
        "cut_count",
        "lazy_recompute_count",
    )

    def __init__(self):
        # splay layer: _par doubles as path-parent when the node is not a
        # left/right child of _par[node]
        self._par = []
        self._lc = []
        self._rc = []
        # represented-forest mirror, intrusive sibling lists
        self._rep_parent = []
        self._first_child = []
        self._next_sib = []
        self._prev_sib = []
        self._mark_y = []
        self.payload = []
        # aggregate bookkeeping: _agg holds (y, node) for clean roots that
        # have at least one marked descendant; clean roots without one have
        # no entry; roots in _dirty need a rebuild and never carry an entry
        self._agg = {}
        self._dirty = set()
        self._n_marked = 0
        self.link_count = 0
        self.cut_count = 0
        self.lazy_recompute_count = 0

    def __len__(self):
        return len(self._par)

    def _check(self, v):
        if not isinstance(v, int) or not 0 <= v < len(self._par):
            raise ValueError(f"unknown node id {v!r}")

    # splay layer ---------------------------------------------------------

    def _rotate(self, x):
        par, lc, rc = self._par, self._lc, self._rc
        p = par[x]
        g = par[p]
        p_is_aux_root = g < 0 or (lc[g] != p and rc[g] != p)
        if lc[p] == x:
            b = rc[x]
            lc[p] = b
            rc[x] = p
        else:
            b = lc[x]
            rc[p] = b
            lc[x] = p
        if b >= 0:
            par[b] = p
        par[p] = x
        par[x] = g
        if not p_is_aux_root:
            if lc[g] == p:
                lc[g] = x
            else:
                rc[g] = x

    def _splay(self, x):
        par, lc, rc = self._par, self._lc, self._rc
        rotate = self._rotate
        while True:
            p = par[x]
            if p < 0 or (lc[p] != x and rc[p] != x):
                return
            g = par[p]
            if g < 0 or (lc[g] != p and rc[g] != p):
                rotate(x)
                return
            if (lc[g] == p) == (lc[p] == x):
                rotate(p)
                rotate(x)
            else:
                rotate(x)
                rotate(x)

    def _access(self, v):
        # afterwards v is the auxiliary root of the path from its
        # represented root down to v, with no right (deeper) subtree
        self._splay(v)
        par, rc = self._par, self._rc
        if rc[v] >= 0:
            rc[v] = -1  # detached child keeps _par[child] = v as path parent
        w = par[v]
        while w >= 0:
            self._splay(w)
            rc[w] = v  # w's old preferred child falls back to a path parent
            self._rotate(v)
            w = par[v]

    # node lifecycle ------------------------------------------------------

    def make_node(self, payload=None, mark_y=None):
        """Create a singleton tree; returns the new dense integer id."""
        v = len(self._par)
        self._par.append(-1)
        self._lc.append(-1)
        self._rc.append(-1)
        self._rep_parent.append(-1)
        self._first_child.append(-1)
        self._next_sib.append(-1)
        self._prev_sib.append(-1)
        self._mark_y.append(mark_y)
        self.payload.append(payload)
        if mark_y is not None:
            self._n_marked += 1
            self._agg[v] = (mark_y, v)
        return v

    # structure queries ---------------------------------------------------

    def find_root(self, v):
        """Root of the tree currently containing v."""
        self._check(v)
        self._access(v)
        lc = self._lc
        x = v
        while lc[x] >= 0:
            x = lc[x]
        self._splay(x)
        return x

    def is_root(self, v):
        self._check(v)
        return self._rep_parent[v] < 0

    def parent_of(self, v):
        """Represented-forest parent of v, or None at a root."""
        self._check(v)
        p = self._rep_parent[v]
        return None if p < 0 else p

    def children_of(self, v):
        """List of v's current children (unspecified order)."""
        self._check(v)
        out = []
        c = self._first_child[v]
        nxt = self._next_sib
        while c >= 0:
            out.append(c)
            c = nxt[c]
        return out

    def mark_of(self, v):
        self._check(v)
        return self._mark_y[v]

    # structure updates ---------------------------------------------------

    def link(self, child, parent):
        """Attach the root ``child`` below ``parent``.

        The two nodes must lie in different trees and ``child`` must be a
        root; violations raise ValueError.
        """
        self._check(child)
        self._check(parent)
        if self._rep_parent[child] >= 0:
            raise ValueError("link: child is not a root")
        root_p = self.find_root(parent)
        if root_p == child:
            raise ValueError("link: nodes already share a tree")
        self._access(child)
        self._par[child] = parent  # path parent; child stays an aux root
        self._rep_parent[child] = parent
        fc = self._first_child[parent]
        self._next_sib[child] = fc
        self._prev_sib[child] = -1
        if fc >= 0:
            self._prev_sib[fc] = child
        self._first_child[parent] = child
        self.link_count += 1
        if self._n_marked == 0:
            return
        dirty = self._dirty
        agg = self._agg
        a_child = agg.pop(child, None)
        if child in dirty or root_p in dirty:
            dirty.discard(child)
            dirty.add(root_p)
            agg.pop(root_p, None)
            return
        a_root = agg.get(root_p)
        if a_child is not None and (a_root is None or a_child > a_root):
            agg[root_p] = a_child

    def cut(self, child):
        """Detach ``child`` from its parent, making it a root.

        Cutting a node that already is a root raises ValueError.
        """
        self._check(child)
        rep_par = self._rep_parent[child]
        if rep_par < 0:
            raise ValueError("cut: node is a root")
        old_root = self.find_root(child)
        self._access(child)
        above = self._lc[child]
        assert above >= 0, "non-root must have shallower path nodes"
        self._par[above] = -1
        self._lc[child] = -1
        self._rep_parent[child] = -1
        pv, nx = self._prev_sib[child], self._next_sib[child]
        if pv >= 0:
            self._next_sib[pv] = nx
        else:
            self._first_child[rep_par] = nx
        if nx >= 0:
            self._prev_sib[nx] = pv
        self._next_sib[child] = -1
        self._prev_sib[child] = -1
        self.cut_count += 1
        if self._n_marked == 0:
            return
        # severed side: contents unknown without a traversal, rebuild lazily
        self._dirty.add(child)
        if old_root in self._dirty:
            return
        best = self._agg.get(old_root)
        if best is not None and self.find_root(best[1]) != old_root:
            del self._agg[old_root]
            self._dirty.add(old_root)

    # marks and aggregate -------------------------------------------------

    def set_mark(self, v, y):
        """Mark v with y-coordinate y (replacing any previous mark)."""
        self._check(v)
        old = self._mark_y[v]
        self._mark_y[v] = y
        if old is None:
            self._n_marked += 1
        r = self.find_root(v)
        if r in self._dirty:
            return
        best = self._agg.get(r)
        if old is not None and best is not None and best[1] == v and y < best[0]:
            # lowered the recorded best, runner-up unknown
            del self._agg[r]
            self._dirty.add(r)
            return
        if best is None or (y, v) > best:
            self._agg[r] = (y, v)

    def clear_mark(self, v):
        """Remove v's mark, if any."""
        self._check(v)
        if self._mark_y[v] is None:
            return
        self._mark_y[v] = None
        self._n_marked -= 1
        r = self.find_root(v)
        if r in self._dirty:
            return
        best = self._agg.get(r)
        if best is not None and best[1] == v:
            del self._agg[r]
            self._dirty.add(r)

    def _subtree_best(self, root):
        best = None
        marks = self._mark_y
        fc, nxt = self._first_child, self._next_sib
        stack = [root]
        while stack:
            v = stack.pop()
            y = marks[v]
            if y is not None and (best is None or (y, v) > best):
                best = (y, v)
            c = fc[v]
            while c >= 0:
                stack.append(c)
                c = nxt[c]
        return best

    def highest_marked_descendant(self, root):
        """Max-y marked node in root's tree as (node, y), or None.

        ``root`` must currently be a root; anything else raises ValueError.
        """
        self._check(root)
        if self._rep_parent[root] >= 0:
            raise ValueError("highest_marked_descendant: not a root")
        if root in self._dirty:
            best = self._subtree_best(root)
            self._dirty.discard(root)
            if best is not None:
                self._agg[root] = best
            self.lazy_recompute_count += 1
        else:
            best = self._agg.get(root)
        return None if best is None else (best[1], best[0])
