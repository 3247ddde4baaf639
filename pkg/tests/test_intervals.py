"""Tests for the monotone interval store."""

import math
import random
import time

import pytest

from subtraj.intervals import MonotoneIntervalStore
from subtraj.oracles import greedy_max_nonoverlapping


def random_monotone(rnd, n, max_span=3.0):
    """A containment-free family: lo and hi both strictly increasing."""
    lo = 0.0
    hi_prev = -1.0
    out = []
    for _ in range(n):
        lo += rnd.uniform(0.1, 1.0)
        hi = max(hi_prev + 0.01, lo + rnd.uniform(0.1, max_span))
        out.append((lo, hi))
        hi_prev = hi
    return out


def flag_aware_chain_count(entries):
    """Linear greedy over (lo, hi, flagged) triples in sorted order; a
    flagged entry forbids picking the entry right after it next."""
    count = 0
    h = -math.inf
    block_idx = None
    for idx, (lo, hi, flagged) in enumerate(entries):
        if lo >= h and idx != block_idx:
            count += 1
            h = hi
            block_idx = idx + 1 if flagged else None
    return count


class TestBasics:
    def test_single_insert(self):
        s = MonotoneIntervalStore()
        s.insert(1.0, 3.0)
        assert s.intervals() == [(1.0, 3.0)]
        assert len(s) == 1
        assert (1.0, 3.0) in s and (1.0, 2.0) not in s

    def test_containment_rejected(self):
        s = MonotoneIntervalStore()
        s.insert(1.0, 3.0)
        with pytest.raises(ValueError):
            s.insert(0.0, 10.0)
        with pytest.raises(ValueError):
            s.insert(1.5, 2.5)
        with pytest.raises(ValueError):
            s.insert(1.0, 2.5)  # shares lo, shorter
        assert s.intervals() == [(1.0, 3.0)]

    def test_small_chain_counts(self):
        s = MonotoneIntervalStore()
        for lo, hi in [(1.0, 3.0), (2.0, 4.0), (5.0, 6.0)]:
            s.insert(lo, hi)
        assert s.max_nonoverlapping() == 2
        assert s.nonoverlapping_chain() == [(1.0, 3.0), (5.0, 6.0)]

    def test_empty_store(self):
        s = MonotoneIntervalStore()
        assert s.max_nonoverlapping() == 0
        assert len(s) == 0
        assert s.intervals() == []
        assert s.nonoverlapping_chain() == []

    def test_touching_endpoints_are_compatible(self):
        s = MonotoneIntervalStore()
        for lo, hi in [(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]:
            s.insert(lo, hi)
        assert s.max_nonoverlapping() == 3

    def test_insert_then_remove_roundtrip(self):
        s = MonotoneIntervalStore()
        s.insert(1.0, 2.0)
        s.remove(1.0, 2.0)
        assert len(s) == 0 and s.max_nonoverlapping() == 0

    def test_remove_absent_raises(self):
        s = MonotoneIntervalStore()
        s.insert(1.0, 2.0)
        with pytest.raises(ValueError):
            s.remove(1.0, 3.0)
        with pytest.raises(ValueError):
            s.remove(0.0, 0.5)

    def test_duplicates_are_a_multiset(self):
        s = MonotoneIntervalStore()
        s.insert(1.0, 2.0)
        s.insert(1.0, 2.0)
        assert len(s) == 2
        assert s.max_nonoverlapping() == 1
        s.remove(1.0, 2.0)
        assert len(s) == 1 and (1.0, 2.0) in s
        s.remove(1.0, 2.0)
        assert len(s) == 0

    def test_degenerate_interval_rejected(self):
        s = MonotoneIntervalStore()
        with pytest.raises(ValueError):
            s.insert(2.0, 1.0)
        s.insert(2.0, 2.0)  # a point interval is fine
        assert s.max_nonoverlapping() == 1


class TestAgainstOracle:
    def test_bulk_inserts_match_sorted_reference(self):
        rnd = random.Random(11)
        family = random_monotone(rnd, 10_000)
        shuffled = family[:]
        rnd.shuffle(shuffled)
        s = MonotoneIntervalStore()
        for lo, hi in shuffled:
            s.insert(lo, hi)
        assert s.intervals() == sorted(family)
        assert s.max_nonoverlapping() == greedy_max_nonoverlapping(family)
        s._audit()

    def test_interleaved_ops_match_reference(self):
        rnd = random.Random(23)
        pool = random_monotone(rnd, 600, max_span=rnd.choice([0.5, 3.0]))
        s = MonotoneIntervalStore()
        live = []
        prev = 0
        for step in range(3000):
            if live and rnd.random() < 0.4:
                iv = live.pop(rnd.randrange(len(live)))
                s.remove(*iv)
                got = s.max_nonoverlapping()
                assert prev - 1 <= got <= prev
            else:
                iv = pool[rnd.randrange(len(pool))]
                live.append(iv)
                s.insert(*iv)
                got = s.max_nonoverlapping()
                assert prev <= got <= prev + 1
            assert len(s) == len(live)
            assert got == greedy_max_nonoverlapping(live)
            prev = got
            if step % 250 == 0:
                s._audit()
        s._audit()

    def test_query_is_insert_order_invariant(self):
        rnd = random.Random(5)
        family = random_monotone(rnd, 300, max_span=1.5)
        counts = set()
        for _ in range(5):
            order = family[:]
            rnd.shuffle(order)
            s = MonotoneIntervalStore()
            for lo, hi in order:
                s.insert(lo, hi)
            counts.add(s.max_nonoverlapping())
        assert len(counts) == 1

    def test_chain_is_valid_and_maximum(self):
        rnd = random.Random(31)
        for _ in range(30):
            family = random_monotone(rnd, rnd.randint(1, 60), max_span=2.0)
            s = MonotoneIntervalStore()
            for lo, hi in family:
                s.insert(lo, hi)
            chain = s.nonoverlapping_chain()
            assert len(chain) == s.max_nonoverlapping()
            for (_, h0), (l1, _) in zip(chain, chain[1:]):
                assert l1 >= h0


class TestOverlapFlag:
    def test_flag_blocks_successor(self):
        s = MonotoneIntervalStore()
        for lo, hi in [(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]:
            s.insert(lo, hi)
        s.set_overlap_flag(0.0, 1.0)
        assert s.max_nonoverlapping() == 2
        assert s.nonoverlapping_chain() == [(0.0, 1.0), (2.0, 3.0)]
        s.set_overlap_flag(0.0, 1.0, False)
        assert s.max_nonoverlapping() == 3

    def test_flag_rebinds_to_new_successor(self):
        s = MonotoneIntervalStore()
        for lo, hi in [(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]:
            s.insert(lo, hi)
        s.set_overlap_flag(0.0, 1.0)
        s.remove(1.0, 2.0)
        # the flagged interval now overlaps (2,3) by decree
        assert s.max_nonoverlapping() == 1
        s.insert(1.0, 2.0)
        # and binds back to the reinserted middle interval
        assert s.max_nonoverlapping() == 2

    def test_flag_on_absent_interval_raises(self):
        s = MonotoneIntervalStore()
        with pytest.raises(ValueError):
            s.set_overlap_flag(0.0, 1.0)

    def test_flag_on_last_interval_is_inert(self):
        s = MonotoneIntervalStore()
        s.insert(0.0, 1.0)
        s.insert(1.0, 2.0)
        s.set_overlap_flag(1.0, 2.0)
        assert s.max_nonoverlapping() == 2

    def test_random_flags_match_linear_replay(self):
        rnd = random.Random(47)
        for _ in range(25):
            family = random_monotone(rnd, rnd.randint(2, 80), max_span=1.8)
            s = MonotoneIntervalStore()
            for lo, hi in family:
                s.insert(lo, hi)
            flagged = set()
            for _ in range(rnd.randint(1, 12)):
                iv = family[rnd.randrange(len(family))]
                if iv in flagged:
                    flagged.discard(iv)
                    s.set_overlap_flag(*iv, False)
                else:
                    flagged.add(iv)
                    s.set_overlap_flag(*iv, True)
                entries = [(lo, hi, (lo, hi) in flagged) for lo, hi in sorted(family)]
                assert s.max_nonoverlapping() == flag_aware_chain_count(entries)
            s._audit()


class TestScaling:
    @staticmethod
    def _workload(n, seed, span):
        import gc

        rnd = random.Random(seed)
        family = random_monotone(rnd, n, max_span=span)
        order = family[:]
        rnd.shuffle(order)
        gc.collect()
        gc.disable()
        try:
            t0 = time.perf_counter()
            s = MonotoneIntervalStore()
            for lo, hi in order:
                s.insert(lo, hi)
                s.max_nonoverlapping()
            rnd.shuffle(order)
            for lo, hi in order:
                s.remove(lo, hi)
                s.max_nonoverlapping()
            return (time.perf_counter() - t0) / (2 * n)
        finally:
            gc.enable()

    def test_per_op_cost_doubles_gracefully(self):
        # light-overlap regime: chain bounds rarely reach into later
        # intervals, so stored aggregates absorb the recursion and per-op
        # cost grows polylogarithmically
        sizes = [4096, 8192, 16384]
        per_op = [
            min(self._workload(n, rep, span=0.6) for rep in range(3)) for n in sizes
        ]
        for small, big in zip(per_op, per_op[1:]):
            assert big <= 2.0 * small, per_op

    def test_heavy_overlap_regression_guard(self):
        # when most picks' exits land inside later intervals the bounded
        # re-evaluation adds a chain-linear term; guard against anything
        # worse than that
        sizes = [4096, 8192, 16384]
        per_op = [
            min(self._workload(n, rep, span=2.0) for rep in range(3)) for n in sizes
        ]
        for small, big in zip(per_op, per_op[1:]):
            assert big <= 3.0 * small, per_op
