"""Dynamic containment-free interval sets with chain-count queries.

``MonotoneIntervalStore`` keeps closed y-intervals (lo, hi) under the
monotone invariant: no stored interval strictly contains another (exact
duplicates are allowed).  Sorted by lo the intervals are then also sorted
by hi, and the maximum number of pairwise compatible intervals (two
intervals are compatible when they share at most one point) is found by
the earliest-finish greedy chain.

The store is a treap keyed by (lo, hi, insertion order).  Every node
carries the (chain length, exit) pair of the greedy chain through its
subtree started unconstrained; a parent composes its pair from the left
child's pair, its own interval, and a bounded-entry evaluation of the
right child, so an update costs O(log^2 n) while the full-store query
reads the root pair in O(1).

Coordinates do not always tell the whole story: during a sweep two
adjacent intervals can tie exactly while their true relative position is
known combinatorially.  ``set_overlap_flag`` marks a stored interval as
overlapping whatever its in-order successor currently is, overriding the
coordinate comparison for that one adjacency.
"""

from __future__ import annotations

import math
import random

__all__ = ["MonotoneIntervalStore"]


class _Node:
    __slots__ = (
        "lo",
        "hi",
        "seq",
        "prio",
        "left",
        "right",
        "flag",
        "prv",
        "nxt",
        "size",
        "min_lo",
        "max_lo",
        "first",
        "cnt",
        "exit_h",
        "exit_node",
    )

    def __init__(self, lo, hi, seq, prio):
        self.lo = lo
        self.hi = hi
        self.seq = seq
        self.prio = prio
        self.left = None
        self.right = None
        self.flag = False
        self.prv = None
        self.nxt = None
        self.size = 1
        self.min_lo = lo
        self.max_lo = lo
        self.first = self
        self.cnt = 1
        self.exit_h = hi
        self.exit_node = self

    def key(self):
        return (self.lo, self.hi, self.seq)


def _blocked(last, node):
    # the overlap flag forbids picking the flagged interval's successor
    # immediately after it
    return last is not None and last.flag and last.nxt is node


def _eval(v, h, last):
    """Greedy chain over v's subtree entered with bound (h, last)."""
    if v is None:
        return 0, h, last
    if h <= v.min_lo and not _blocked(last, v.first):
        return v.cnt, v.exit_h, v.exit_node
    if h > v.max_lo:
        return 0, h, last
    c1, h1, l1 = _eval(v.left, h, last)
    if v.lo >= h1 and not _blocked(l1, v):
        c2, h2, l2 = c1 + 1, v.hi, v
    else:
        c2, h2, l2 = c1, h1, l1
    c3, h3, l3 = _eval(v.right, h2, l2)
    return c2 + c3, h3, l3


def _pull(v):
    l, r = v.left, v.right
    v.size = 1 + (l.size if l else 0) + (r.size if r else 0)
    v.min_lo = l.min_lo if l else v.lo
    v.max_lo = r.max_lo if r else v.lo
    v.first = l.first if l else v
    if l:
        c1, h1, l1 = l.cnt, l.exit_h, l.exit_node
    else:
        c1, h1, l1 = 0, -math.inf, None
    if v.lo >= h1 and not _blocked(l1, v):
        c2, h2, l2 = c1 + 1, v.hi, v
    else:
        c2, h2, l2 = c1, h1, l1
    c3, h3, l3 = _eval(r, h2, l2)
    v.cnt, v.exit_h, v.exit_node = c2 + c3, h3, l3


def _merge(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if a.prio < b.prio:
        a.right = _merge(a.right, b)
        _pull(a)
        return a
    b.left = _merge(a, b.left)
    _pull(b)
    return b


def _split(v, key):
    """(nodes with key() < key, the rest)."""
    if v is None:
        return None, None
    if v.key() < key:
        a, b = _split(v.right, key)
        v.right = a
        _pull(v)
        return v, b
    a, b = _split(v.left, key)
    v.left = b
    _pull(v)
    return a, v


def _contains(a_lo, a_hi, b_lo, b_hi):
    # strict containment; exact duplicates do not count
    return a_lo <= b_lo and b_hi <= a_hi and (a_lo, a_hi) != (b_lo, b_hi)


class MonotoneIntervalStore:
    def __init__(self):
        self._root = None
        self._seq = 0
        self._rng = random.Random(0x1D1E57)

    def __len__(self):
        return self._root.size if self._root else 0

    def __contains__(self, iv):
        lo, hi = iv
        return self._find(lo, hi) is not None

    # navigation ----------------------------------------------------------

    def _neighbors(self, key):
        """In-order predecessor and successor of an (absent or present) key."""
        prv = nxt = None
        v = self._root
        while v is not None:
            if v.key() < key:
                prv = v
                v = v.right
            else:
                nxt = v
                v = v.left
        return prv, nxt

    def _find(self, lo, hi):
        """Leftmost stored node with these coordinates, or None."""
        _, nxt = self._neighbors((lo, hi, -1))
        if nxt is not None and nxt.lo == lo and nxt.hi == hi:
            return nxt
        return None

    def _repull_path(self, node):
        """Recompute aggregates on the root path of an in-place change."""
        path = []
        v = self._root
        key = node.key()
        while v is not node:
            path.append(v)
            v = v.left if key < v.key() else v.right
        _pull(node)
        for v in reversed(path):
            _pull(v)

    # mutation ------------------------------------------------------------

    def insert(self, lo, hi):
        if not lo <= hi:
            raise ValueError(f"not an interval: ({lo!r}, {hi!r})")
        key = (lo, hi, self._seq)
        prv, nxt = self._neighbors(key)
        for other in (prv, nxt):
            if other is None:
                continue
            if _contains(other.lo, other.hi, lo, hi) or _contains(lo, hi, other.lo, other.hi):
                raise ValueError(
                    f"containment violation: ({lo!r}, {hi!r}) vs ({other.lo!r}, {other.hi!r})"
                )
        node = _Node(lo, hi, self._seq, self._rng.random())
        self._seq += 1
        # splice the neighbour list first: aggregate recomputation during
        # the merge reads successor pointers
        node.prv, node.nxt = prv, nxt
        if prv is not None:
            prv.nxt = node
        if nxt is not None:
            nxt.prv = node
        a, b = _split(self._root, key)
        self._root = _merge(_merge(a, node), b)

    def remove(self, lo, hi):
        node = self._find(lo, hi)
        if node is None:
            raise ValueError(f"interval ({lo!r}, {hi!r}) is not stored")
        key = node.key()
        if node.prv is not None:
            node.prv.nxt = node.nxt
        if node.nxt is not None:
            node.nxt.prv = node.prv
        a, rest = _split(self._root, key)
        mid, b = _split(rest, (lo, hi, node.seq + 1))
        assert mid is node and mid.left is None and mid.right is None
        self._root = _merge(a, b)

    def set_overlap_flag(self, lo, hi, flag=True):
        """Mark (or unmark) the stored interval as overlapping its current
        in-order successor regardless of coordinates."""
        node = self._find(lo, hi)
        if node is None:
            raise ValueError(f"interval ({lo!r}, {hi!r}) is not stored")
        if node.flag != bool(flag):
            node.flag = bool(flag)
            self._repull_path(node)

    # queries -------------------------------------------------------------

    def max_nonoverlapping(self):
        """Size of a maximum subset of pairwise compatible intervals."""
        return self._root.cnt if self._root else 0

    def intervals(self):
        """Stored intervals in (lo, hi) order."""
        out = []
        v = self._root.first if self._root else None
        while v is not None:
            out.append((v.lo, v.hi))
            v = v.nxt
        return out

    def nonoverlapping_chain(self):
        """One maximum compatible subset, as the greedy chain picks it."""
        out = []
        h, last = -math.inf, None
        v = self._root.first if self._root else None
        while v is not None:
            if v.lo >= h and not _blocked(last, v):
                out.append((v.lo, v.hi))
                h, last = v.hi, v
            v = v.nxt
        return out

    # audit ---------------------------------------------------------------

    def _audit(self):
        """Recompute every invariant from scratch; raises on mismatch."""
        seen = []

        def rec(v):
            if v is None:
                return 0, None, None, []
            ls, lmin, lmax, lfirst = rec(v.left)
            seen.append(v)
            rs, rmin, rmax, _ = rec(v.right)
            assert v.size == ls + rs + 1
            assert v.min_lo == (lmin if lmin is not None else v.lo)
            assert v.max_lo == (rmax if rmax is not None else v.lo)
            assert v.first is (lfirst[0] if lfirst else v)
            return v.size, v.min_lo, v.max_lo, (lfirst or [v])

        rec(self._root)
        for a, b in zip(seen, seen[1:]):
            assert a.key() < b.key()
            assert a.hi <= b.hi or (a.lo, a.hi) == (b.lo, b.hi)
            assert a.nxt is b and b.prv is a
        if seen:
            assert seen[0].prv is None and seen[-1].nxt is None

        def chain(nodes):
            c, h, last = 0, -math.inf, None
            for v in nodes:
                if v.lo >= h and not _blocked(last, v):
                    c, h, last = c + 1, v.hi, v
            return c, h, last

        def rec2(v, acc):
            if v is None:
                return
            pre = len(acc)
            rec2(v.left, acc)
            acc.append(v)
            rec2(v.right, acc)
            c, h, last = chain(acc[pre:])
            assert (v.cnt, v.exit_h, v.exit_node) == (c, h, last), v.key()

        rec2(self._root, [])
