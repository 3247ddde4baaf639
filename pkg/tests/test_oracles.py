import itertools
import math
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subtraj.geometry import Trajectory
from subtraj.instance import SCInstance
from subtraj.oracles import (
    INFINITE_PATHS,
    NaiveForest,
    OracleRefusal,
    _climb,
    continuous_frechet_decide_oracle,
    discrete_frechet_dp,
    greedy_max_nonoverlapping,
    grid_free_matrix,
    grid_reachable,
    max_paths_between_cols,
    sc_continuous_bruteforce,
    sc_discrete_bruteforce,
)


def coupling_frechet(t1, t2):
    """Exhaustive discrete Frechet by recursion over all couplings."""
    a, b = t1.vertices, t2.vertices

    @lru_cache(maxsize=None)
    def go(i, j):
        d = a[i].dist(b[j])
        if i == 0 and j == 0:
            return d
        opts = []
        if i > 0:
            opts.append(go(i - 1, j))
        if j > 0:
            opts.append(go(i, j - 1))
        if i > 0 and j > 0:
            opts.append(go(i - 1, j - 1))
        return max(d, min(opts))

    return go(len(a) - 1, len(b) - 1)


def square_laps(laps):
    pts = []
    for _ in range(laps):
        pts.extend([(0, 0), (1, 0), (1, 1), (0, 1)])
    pts.append((0, 0))
    return Trajectory(pts)


class TestDiscreteFrechetDP:
    def test_identical(self):
        t = Trajectory([(0, 0), (1, 2), (3, 1)])
        assert discrete_frechet_dp(t, t) == 0.0

    def test_translation(self):
        t1 = Trajectory([(0, 0), (1, 0)])
        t2 = Trajectory([(0, 1), (1, 1)])
        assert discrete_frechet_dp(t1, t2) == pytest.approx(1.0)

    def test_single_points(self):
        t1 = Trajectory([(0, 0)])
        t2 = Trajectory([(3, 4)])
        assert discrete_frechet_dp(t1, t2) == pytest.approx(5.0)

    def test_forced_detour(self):
        # second curve must wait at the far vertex while the first advances
        t1 = Trajectory([(0, 0), (4, 0)])
        t2 = Trajectory([(0, 0), (2, 3), (4, 0)])
        assert discrete_frechet_dp(t1, t2) == pytest.approx(math.hypot(2, 3))

    @given(st.integers(0, 10**6))
    @settings(max_examples=60, deadline=None)
    def test_matches_coupling_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        n1, n2 = rng.integers(1, 7, size=2)
        t1 = Trajectory(rng.uniform(-5, 5, size=(n1, 2)))
        t2 = Trajectory(rng.uniform(-5, 5, size=(n2, 2)))
        assert discrete_frechet_dp(t1, t2) == pytest.approx(coupling_frechet(t1, t2), abs=1e-12)


class TestContinuousFrechetOracle:
    def test_identical(self):
        t = Trajectory([(0, 0), (2, 1), (4, 0)])
        assert continuous_frechet_decide_oracle(t, t, 0.0)

    def test_parallel_segments(self):
        t1 = Trajectory([(0, 0), (1, 0)])
        t2 = Trajectory([(0, 2), (1, 2)])
        assert not continuous_frechet_decide_oracle(t1, t2, 1.0)
        assert continuous_frechet_decide_oracle(t1, t2, 2.0)

    def test_point_vs_segment(self):
        t1 = Trajectory([(0, 0)])
        t2 = Trajectory([(-1, 1), (1, 1)])
        assert continuous_frechet_decide_oracle(t1, t2, math.sqrt(2) + 1e-9)
        assert not continuous_frechet_decide_oracle(t1, t2, 1.2)

    def test_segment_vs_spike(self):
        # continuous distance is the spike height, reached mid-edge
        t1 = Trajectory([(0, 0), (4, 0)])
        t2 = Trajectory([(0, 0), (2, 3), (4, 0)])
        assert continuous_frechet_decide_oracle(t1, t2, 3.0 + 1e-9)
        assert not continuous_frechet_decide_oracle(t1, t2, 3.0 - 1e-6)

    def test_continuous_at_most_discrete(self):
        # any vertex coupling also bounds the continuous distance
        rng = np.random.default_rng(7)
        for _ in range(80):
            n1, n2 = rng.integers(2, 9, size=2)
            t1 = Trajectory(rng.uniform(-5, 5, size=(n1, 2)))
            t2 = Trajectory(rng.uniform(-5, 5, size=(n2, 2)))
            ddf = discrete_frechet_dp(t1, t2)
            assert continuous_frechet_decide_oracle(t1, t2, ddf + 1e-9)

    def test_matches_fine_grid_away_from_threshold(self):
        # bisect the oracle's own threshold, then demand the independent
        # sampled-grid reachability agrees on both sides of a wide gap
        rng = np.random.default_rng(11)
        for _ in range(50):
            n1, n2 = rng.integers(2, 6, size=2)
            t1 = Trajectory(rng.uniform(-3, 3, size=(n1, 2)))
            t2 = Trajectory(rng.uniform(-3, 3, size=(n2, 2)))
            lo = max(
                t1.vertices[0].dist(t2.vertices[0]),
                t1.vertices[-1].dist(t2.vertices[-1]),
            )
            hi = discrete_frechet_dp(t1, t2) + 1e-9
            assert continuous_frechet_decide_oracle(t1, t2, hi)
            if not continuous_frechet_decide_oracle(t1, t2, lo):
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    if continuous_frechet_decide_oracle(t1, t2, mid):
                        hi = mid
                    else:
                        lo = mid
            dstar = hi

            def grid_says(d):
                a = grid_free_matrix(t1, t2, d, 64)
                return grid_reachable(a, 0, 0, a.shape[0] - 1, a.shape[1] - 1)

            d_yes = dstar * 1.25 + 0.2
            assert continuous_frechet_decide_oracle(t1, t2, d_yes)
            assert grid_says(d_yes)
            d_no = dstar * 0.8 - 0.2
            if d_no > 0:
                assert not continuous_frechet_decide_oracle(t1, t2, d_no)
                assert not grid_says(d_no)

    def test_threshold_monotonicity(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            n1, n2 = rng.integers(2, 8, size=2)
            t1 = Trajectory(rng.uniform(-4, 4, size=(n1, 2)))
            t2 = Trajectory(rng.uniform(-4, 4, size=(n2, 2)))
            prev = False
            for d in np.linspace(0.2, 9.0, 6):
                cur = continuous_frechet_decide_oracle(t1, t2, float(d))
                assert cur or not prev
                prev = prev or cur


class TestClimb:
    @given(st.integers(0, 10**6))
    @settings(max_examples=80, deadline=None)
    def test_matches_loop_reference(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(1, 40))
        free = rng.random(k) < 0.7
        seed_rows = rng.random(k) < 0.3
        got = _climb(free, seed_rows)
        ref = np.zeros(k, dtype=bool)
        carry = False
        for y in range(k):
            if not free[y]:
                carry = False
                continue
            carry = carry or bool(seed_rows[y])
            ref[y] = carry
        assert np.array_equal(got, ref)


class TestSCDiscreteBruteforce:
    def test_three_lap_square_yes(self):
        inst = SCInstance(square_laps(3), m=3, ell=4.0, d=0.1)
        assert sc_discrete_bruteforce(inst)

    def test_all_far_no(self):
        t = Trajectory([(0, 0), (10, 0), (20, 0), (30, 0)])
        inst = SCInstance(t, m=2, ell=5.0, d=0.5)
        assert not sc_discrete_bruteforce(inst)

    def test_everything_free_yes(self):
        t = Trajectory([(0, 0), (1, 0), (1, 1), (0, 1)])
        inst = SCInstance(t, m=2, ell=0.5, d=2.0)
        assert sc_discrete_bruteforce(inst)

    def test_two_laps_not_three_clusters(self):
        # two laps only: a lap-long reference leaves one matching lap,
        # so m=2 succeeds and m=3 fails
        inst2 = SCInstance(square_laps(2), m=2, ell=4.0, d=0.1)
        inst3 = SCInstance(square_laps(2), m=3, ell=4.0, d=0.1)
        assert sc_discrete_bruteforce(inst2)
        assert not sc_discrete_bruteforce(inst3)

    def test_size_guard(self):
        t = Trajectory([(i, 0) for i in range(20)])
        with pytest.raises(OracleRefusal):
            sc_discrete_bruteforce(SCInstance(t, m=2, ell=1.0, d=1.0))


class TestSCContinuousBruteforce:
    def test_two_lap_square_m2_yes(self):
        inst = SCInstance(square_laps(2), m=2, ell=4.0, d=0.1, margin=0.05)
        assert sc_continuous_bruteforce(inst, res=16)

    def test_two_lap_square_m3_no(self):
        inst = SCInstance(square_laps(2), m=3, ell=4.0, d=0.1, margin=0.05)
        assert not sc_continuous_bruteforce(inst, res=16)

    def test_far_no(self):
        t = Trajectory([(0, 0), (10, 0), (20, 10), (30, 0)])
        inst = SCInstance(t, m=2, ell=5.0, d=0.25, margin=0.1)
        assert not sc_continuous_bruteforce(inst, res=16)

    def test_refuses_without_margin(self):
        inst = SCInstance(square_laps(2), m=2, ell=4.0, d=0.1)
        with pytest.raises(OracleRefusal):
            sc_continuous_bruteforce(inst)

    def test_resolution_stability_on_laps(self):
        inst = SCInstance(square_laps(2), m=2, ell=4.0, d=0.1, margin=0.05)
        assert sc_continuous_bruteforce(inst, res=8) == sc_continuous_bruteforce(inst, res=16)


class TestMaxPathsBetweenCols:
    def test_full_row_is_infinite(self):
        free = np.ones((4, 5), dtype=bool)
        assert max_paths_between_cols(free, 0, 3, 0, 4, cap=10) == INFINITE_PATHS

    def test_two_stacked_paths(self):
        free = np.zeros((3, 7), dtype=bool)
        free[0, 0] = free[1, 1] = free[2, 1] = True  # lower path ends at row 1
        free[0, 3] = free[1, 4] = free[2, 4] = True  # upper path ends at row 4
        assert max_paths_between_cols(free, 0, 2, 0, 6, cap=10) == 2
        assert max_paths_between_cols(free, 0, 2, 0, 6, cap=1) == 1

    def test_band_restriction(self):
        free = np.zeros((3, 7), dtype=bool)
        free[0, 0] = free[1, 1] = free[2, 1] = True
        free[0, 3] = free[1, 4] = free[2, 4] = True
        assert max_paths_between_cols(free, 0, 2, 0, 2, cap=10) == 1
        assert max_paths_between_cols(free, 0, 2, 5, 6, cap=10) == 0
        assert max_paths_between_cols(free, 0, 2, 4, 3, cap=10) == 0

    def test_shared_endpoint_rows_chain(self):
        # second path may start on the row where the first one ended
        free = np.zeros((3, 4), dtype=bool)
        free[0, 0] = free[1, 0] = free[2, 1] = True
        free[0, 1] = free[1, 2] = free[2, 2] = True
        assert max_paths_between_cols(free, 0, 2, 0, 3, cap=10) == 2


class TestNaiveForest:
    def test_basic(self):
        f = NaiveForest()
        a, b, c = f.make_node(), f.make_node(), f.make_node(mark_y=5.0)
        f.link(a, b)
        f.link(c, a)
        assert f.find_root(c) == b
        assert f.highest_marked_descendant(b) == (c, 5.0)
        f.cut(a)
        assert f.find_root(c) == a
        assert f.highest_marked_descendant(b) is None

    def test_link_guards(self):
        f = NaiveForest()
        a, b = f.make_node(), f.make_node()
        f.link(a, b)
        with pytest.raises(ValueError):
            f.link(a, b)
        with pytest.raises(ValueError):
            f.link(b, a)  # would close a cycle
        with pytest.raises(ValueError):
            f.cut(b)


def pairwise_compatible(ivs):
    for (l1, h1), (l2, h2) in itertools.combinations(ivs, 2):
        if min(h1, h2) > max(l1, l2):  # sharing more than one point
            return False
    return True


def brute_max_nonoverlapping(ivs):
    best = 0
    for r in range(len(ivs) + 1):
        for sub in itertools.combinations(ivs, r):
            if pairwise_compatible(sub):
                best = max(best, r)
    return best


def containment_free_intervals(rng, k):
    """Random family where sorting by lo also sorts hi (the store invariant)."""
    los = np.sort(rng.integers(0, 12, size=k))
    lens = rng.integers(0, 6, size=k)
    ivs = []
    h = -math.inf
    for lo, ln in zip(los, lens):
        h = max(float(lo + ln), h)
        ivs.append((float(lo), h))
    return ivs


class TestGreedyScheduling:
    def test_small(self):
        assert greedy_max_nonoverlapping([(1, 3), (2, 4), (5, 6)]) == 2
        assert greedy_max_nonoverlapping([]) == 0
        assert greedy_max_nonoverlapping([(1, 2), (2, 3), (3, 4)]) == 3

    @given(st.integers(0, 10**6))
    @settings(max_examples=100, deadline=None)
    def test_matches_subset_bruteforce(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(0, 9))
        ivs = containment_free_intervals(rng, k)
        assert greedy_max_nonoverlapping(ivs) == brute_max_nonoverlapping(ivs)
