"""Link-cut forest: oracle replay, aggregate semantics, amortized timing."""

import random
import time

import pytest

from subtraj.linkcut import LinkCutForest
from subtraj.oracles import NaiveForest


class TestBasics:
    def test_singletons(self):
        f = LinkCutForest()
        a = f.make_node()
        b = f.make_node()
        assert a != b
        assert f.find_root(a) == a
        assert f.find_root(b) == b
        assert f.is_root(a) and f.is_root(b)
        assert f.parent_of(a) is None

    def test_link_cut_inverse(self):
        f = LinkCutForest()
        a, b = f.make_node(), f.make_node()
        f.link(a, b)
        assert f.find_root(a) == b
        assert f.parent_of(a) == b
        assert f.children_of(b) == [a]
        f.cut(a)
        assert f.find_root(a) == a
        assert f.find_root(b) == b
        assert f.children_of(b) == []
        assert f.link_count == 1 and f.cut_count == 1

    def test_chain_of_1000(self):
        f = LinkCutForest()
        ids = [f.make_node() for _ in range(1000)]
        for i in range(1, 1000):
            f.link(ids[i], ids[i - 1])
        assert f.find_root(ids[-1]) == ids[0]
        for i in range(0, 1000, 97):
            assert f.find_root(ids[i]) == ids[0]
        # sever the middle: two chains with correct membership
        f.cut(ids[500])
        for i in range(0, 500, 61):
            assert f.find_root(ids[i]) == ids[0]
        for i in range(500, 1000, 61):
            assert f.find_root(ids[i]) == ids[500]

    def test_payloads(self):
        f = LinkCutForest()
        a = f.make_node(payload=("cell", 3, 4))
        assert f.payload[a] == ("cell", 3, 4)
        assert f.mark_of(a) is None


class TestContractViolations:
    def test_link_non_root(self):
        f = LinkCutForest()
        a, b, c = f.make_node(), f.make_node(), f.make_node()
        f.link(a, b)
        with pytest.raises(ValueError, match="not a root"):
            f.link(a, c)

    def test_link_same_tree(self):
        f = LinkCutForest()
        a, b = f.make_node(), f.make_node()
        f.link(a, b)
        with pytest.raises(ValueError, match="share a tree"):
            f.link(b, a)
        with pytest.raises(ValueError, match="share a tree"):
            f.link(b, b)

    def test_cut_root(self):
        f = LinkCutForest()
        a = f.make_node()
        with pytest.raises(ValueError, match="root"):
            f.cut(a)

    def test_aggregate_query_non_root(self):
        f = LinkCutForest()
        a, b = f.make_node(), f.make_node()
        f.link(a, b)
        with pytest.raises(ValueError, match="not a root"):
            f.highest_marked_descendant(a)

    def test_unknown_ids(self):
        f = LinkCutForest()
        f.make_node()
        with pytest.raises(ValueError, match="unknown"):
            f.find_root(7)
        with pytest.raises(ValueError, match="unknown"):
            f.link(0, 7)
        with pytest.raises(ValueError, match="unknown"):
            f.cut(-1)


def replay_against_naive(seed, n_ops, check_every=20):
    """Drive both structures with one random valid op stream; compare often."""
    rnd = random.Random(seed)
    fast = LinkCutForest()
    slow = NaiveForest()

    def rand_node():
        return rnd.randrange(len(slow.parent))

    for step in range(n_ops):
        r = rnd.random()
        if not slow.parent or r < 0.18:
            y = rnd.uniform(0.0, 1000.0) if rnd.random() < 0.5 else None
            assert fast.make_node(mark_y=y) == slow.make_node(mark_y=y)
        elif r < 0.48:
            child = slow.find_root(rand_node())
            parent = rand_node()
            if slow.find_root(parent) != child:
                fast.link(child, parent)
                slow.link(child, parent)
        elif r < 0.63:
            for _ in range(10):
                v = rand_node()
                if slow.parent[v] is not None:
                    fast.cut(v)
                    slow.cut(v)
                    break
        elif r < 0.73:
            v = rand_node()
            y = rnd.uniform(0.0, 1000.0)
            fast.set_mark(v, y)
            slow.mark_y[v] = y
        elif r < 0.78:
            v = rand_node()
            fast.clear_mark(v)
            slow.mark_y[v] = None
        else:
            v = rand_node()
            assert fast.find_root(v) == slow.find_root(v)

        if step % check_every == 0:
            for _ in range(4):
                v = rand_node()
                assert fast.find_root(v) == slow.find_root(v)
                assert fast.parent_of(v) == slow.parent[v]
            v = rand_node()
            root = slow.find_root(v)
            got = fast.highest_marked_descendant(root)
            want = slow.highest_marked_descendant(root)
            if want is None:
                assert got is None
            else:
                # tie-break between equal-y marks is unspecified
                assert got is not None and got[1] == want[1]
                assert slow.mark_y[got[0]] == got[1]


class TestOracleReplay:
    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_random_ops_match_naive(self, seed):
        replay_against_naive(seed, 5000)

    def test_long_replay(self):
        replay_against_naive(99, 20000, check_every=50)


class TestAggregate:
    def test_single_marked_node(self):
        f = LinkCutForest()
        a = f.make_node(mark_y=4.5)
        assert f.highest_marked_descendant(a) == (a, 4.5)
        b = f.make_node()
        assert f.highest_marked_descendant(b) is None

    def test_merge_takes_max(self):
        f = LinkCutForest()
        a = f.make_node(mark_y=1.0)
        b = f.make_node(mark_y=7.0)
        c = f.make_node()
        f.link(a, c)
        f.link(c, b)
        assert f.highest_marked_descendant(b) == (b, 7.0)
        assert f.lazy_recompute_count == 0

    def test_links_never_trigger_lazy_rebuild(self):
        rnd = random.Random(5)
        f = LinkCutForest()
        ids = [f.make_node(mark_y=rnd.uniform(0, 100) if i % 2 else None) for i in range(400)]
        for v in ids[1:]:
            f.link(v, rnd.choice(ids[: v]))
        root = f.find_root(ids[0])
        best = f.highest_marked_descendant(root)
        marks = [(f.mark_of(v), v) for v in ids if f.mark_of(v) is not None]
        assert best == tuple(reversed(max(marks)))
        assert f.lazy_recompute_count == 0

    def test_cut_then_query_rebuilds_correctly(self):
        rnd = random.Random(11)
        f = LinkCutForest()
        slow = NaiveForest()
        ids = []
        for i in range(300):
            y = rnd.uniform(0, 100) if rnd.random() < 0.6 else None
            ids.append(f.make_node(mark_y=y))
            slow.make_node(mark_y=y)
        for v in ids[1:]:
            p = rnd.choice(ids[: v])
            f.link(v, p)
            slow.link(v, p)
        for v in rnd.sample(ids[1:], 80):
            f.cut(v)
            slow.cut(v)
        roots = {slow.find_root(v) for v in ids}
        for root in sorted(roots):
            got = f.highest_marked_descendant(root)
            want = slow.highest_marked_descendant(root)
            if want is None:
                assert got is None
            else:
                assert got is not None and got[1] == want[1]
        # severed subtrees had to be rescanned at least once
        assert f.lazy_recompute_count > 0

    def test_lowering_the_best_mark(self):
        f = LinkCutForest()
        r = f.make_node()
        hi = f.make_node(mark_y=5.0)
        lo = f.make_node(mark_y=3.0)
        f.link(hi, r)
        f.link(lo, r)
        assert f.highest_marked_descendant(r) == (hi, 5.0)
        f.set_mark(hi, 1.0)
        assert f.highest_marked_descendant(r) == (lo, 3.0)
        f.clear_mark(lo)
        assert f.highest_marked_descendant(r) == (hi, 1.0)
        f.clear_mark(hi)
        assert f.highest_marked_descendant(r) is None


def timed_chain_workload(n, seed):
    """Chain build, root queries, then random teardown; returns (ops, seconds)."""
    rnd = random.Random(seed)
    f = LinkCutForest()
    ids = [f.make_node() for _ in range(n)]
    ops = 0
    t0 = time.perf_counter()
    for i in range(1, n):
        f.link(ids[i], ids[i - 1])
        ops += 1
        if i % 4 == 0:
            f.find_root(ids[rnd.randrange(i)])
            ops += 1
    for _ in range(n):
        f.find_root(ids[rnd.randrange(n)])
        ops += 1
    order = list(range(1, n))
    rnd.shuffle(order)
    for k, i in enumerate(order):
        f.cut(ids[i])
        ops += 1
        if k % 4 == 0:
            f.find_root(ids[rnd.randrange(n)])
            ops += 1
    return ops, time.perf_counter() - t0


class TestAmortizedScaling:
    def test_doubling_nodes_keeps_per_op_cost_flat(self):
        sizes = [1 << 13, 1 << 14, 1 << 15]
        per_op = []
        for n in sizes:
            best = min(timed_chain_workload(n, rep) for rep in range(3))
            per_op.append(best[1] / best[0])
        assert per_op[1] / per_op[0] <= 1.5, per_op
        assert per_op[2] / per_op[1] <= 1.5, per_op
