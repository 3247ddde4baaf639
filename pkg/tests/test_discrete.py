"""Tests for the discrete clustering decision solvers."""

import random

import numpy as np
import pytest

from instgen import random_discrete_instance, random_walk_trajectory, square_laps
from subtraj.discrete import (
    BudgetViolation,
    candidate_references_discrete,
    sc_decide_discrete,
    solve_subproblem_discrete,
    validate_subproblem_paths,
)
from subtraj.freespace import DiscreteFreeGrid, build_discrete_grid
from subtraj.geometry import Trajectory
from subtraj.instance import SCInstance, SCWitness
from subtraj.oracles import (
    INFINITE_PATHS,
    _chain_count,
    _min_end_row,
    sc_discrete_bruteforce,
)


def line_traj(xs):
    return Trajectory([(float(x), 0.0) for x in xs])


def subproblem_oracle_count(grid, s, t, cap):
    """Reference count of stackable companion paths for one (s, t) range.

    Mirrors the brute-force decision: a fully free row outside the open
    band means unboundedly many coincident one-row paths; otherwise paths
    are counted greedily per region (rows <= s, rows >= t).
    """
    n = grid.n1
    free = [[False] * (n + 1)]
    for x in range(1, n + 1):
        free.append([False] + [bool(grid.free[x - 1, y - 1]) for y in range(1, n + 1)])
    for y in list(range(1, s + 1)) + list(range(t, n + 1)):
        if all(free[x][y] for x in range(s, t + 1)):
            return INFINITE_PATHS
    cnt = _chain_count(free, s, t, 1, s, cap)
    if cnt < cap:
        cnt += _chain_count(free, s, t, t, n, cap - cnt)
    return cnt


def as_row_lists(grid):
    n = grid.n1
    out = [[False] * (n + 1)]
    for x in range(1, n + 1):
        out.append([False] + [bool(grid.free[x - 1, y - 1]) for y in range(1, n + 1)])
    return out


class TestCandidates:
    def test_uniform_spacing(self):
        t = line_traj(range(8))
        cands = candidate_references_discrete(t, 2.5)
        assert cands == [(s, s + 3) for s in range(1, 6)]

    def test_ell_exceeds_total_length(self):
        t = line_traj(range(4))
        assert candidate_references_discrete(t, 3.5) == []

    def test_ell_equals_total_length(self):
        t = line_traj(range(4))
        assert candidate_references_discrete(t, 3.0) == [(1, 4)]

    def test_ell_must_be_positive(self):
        t = line_traj(range(4))
        with pytest.raises(ValueError):
            candidate_references_discrete(t, 0.0)

    def test_minimality_and_no_containment(self):
        rnd = random.Random(7)
        for _ in range(40):
            t = random_walk_trajectory(rnd, rnd.randint(3, 15))
            total = t.total_length()
            ell = rnd.uniform(0.05, 0.95) * total
            cands = candidate_references_discrete(t, ell)
            for s, tv in cands:
                assert 1 <= s < tv <= t.n
                assert t.arclength_between(float(s), float(tv)) >= ell - 1e-6
                # minimal end: one vertex earlier is too short
                assert t.arclength_between(float(s), float(tv - 1)) < ell + 1e-6
            # strictly increasing in both coordinates = containment-free
            for (s0, t0), (s1, t1) in zip(cands, cands[1:]):
                assert s0 < s1 and t0 < t1


class TestSubproblem:
    def test_all_free_duplicate_rows(self):
        # everything within distance: the lowest row repeats as m-1
        # coincident one-row paths, each meeting [s, t] in one vertex
        t = Trajectory([(0.01 * i, 0.0) for i in range(6)])
        grid = build_discrete_grid(t, t, 1.0)
        assert grid.free.all()
        paths = solve_subproblem_discrete(grid, 4, 2, 4)
        assert paths is not None and len(paths) == 3
        for path in paths:
            assert path == [(2, 1), (3, 1), (4, 1)]
        assert validate_subproblem_paths(grid, 2, 4, paths) == []

    def test_empty_start_column(self):
        free = np.ones((4, 4), dtype=bool)
        free[1, :] = False  # column x=2 fully blocked
        grid = DiscreteFreeGrid(4, 4, free)
        assert solve_subproblem_discrete(grid, 2, 2, 4) is None

    def test_rejects_band_crossing_when_band_is_empty(self):
        # adjacent reference range (t = s+1): a path dipping to row s and
        # then climbing to row t would meet the range in two vertices.
        # The free space here offers exactly that temptation and nothing
        # else, so the answer must be no.
        t = line_traj([0, 1, 100, 200])
        grid = build_discrete_grid(t, t, 2.0)
        cands = candidate_references_discrete(t, 50.0)
        assert (2, 3) in cands
        assert grid.is_free(2, 1) and grid.is_free(2, 2) and grid.is_free(3, 3)
        assert solve_subproblem_discrete(grid, 2, 2, 3) is None
        inst = SCInstance(t=t, m=2, ell=50.0, d=2.0)
        assert sc_discrete_bruteforce(inst) is False
        assert sc_decide_discrete(inst) == (False, None)

    def test_invalid_ranges_raise(self):
        t = line_traj(range(5))
        grid = build_discrete_grid(t, t, 1.0)
        with pytest.raises(ValueError):
            solve_subproblem_discrete(grid, 2, 3, 3)
        with pytest.raises(ValueError):
            solve_subproblem_discrete(grid, 2, 0, 3)
        with pytest.raises(ValueError):
            solve_subproblem_discrete(build_discrete_grid(t, line_traj(range(4)), 1.0), 2, 1, 3)

    def test_against_oracle_counts(self):
        rnd = random.Random(101)
        checked = 0
        for _ in range(150):
            inst = random_discrete_instance(rnd)
            grid = build_discrete_grid(inst.t, inst.t, inst.d)
            for s, t in candidate_references_discrete(inst.t, inst.ell):
                stats = {}
                paths = solve_subproblem_discrete(grid, inst.m, s, t, stats)
                want = subproblem_oracle_count(grid, s, t, inst.m - 1) >= inst.m - 1
                assert (paths is not None) == want, (inst, s, t)
                if paths is not None:
                    assert validate_subproblem_paths(grid, s, t, paths) == []
                    assert stats["completed"] == inst.m - 1
                checked += 1
        assert checked > 200

    def test_greedy_paths_end_lowest(self):
        # each returned path ends on the minimal reachable end row for
        # starts at or above its own start, within its region
        rnd = random.Random(55)
        for _ in range(80):
            inst = random_discrete_instance(rnd)
            grid = build_discrete_grid(inst.t, inst.t, inst.d)
            rows = as_row_lists(grid)
            n = grid.n1
            for s, t in candidate_references_discrete(inst.t, inst.ell):
                paths = solve_subproblem_discrete(grid, inst.m, s, t)
                if paths is None:
                    continue
                for path in paths:
                    y0, ye = path[0][1], path[-1][1]
                    if ye <= s:
                        assert _min_end_row(rows, s, t, y0, s) == ye
                    else:
                        assert _min_end_row(rows, s, t, max(y0, t), n) == ye


class TestSweep:
    def test_three_lap_square(self):
        t = square_laps(3)
        assert t.n == 13
        inst = SCInstance(t=t, m=3, ell=4.0, d=0.1)
        stats = {}
        yes, wit = sc_decide_discrete(inst, stats)
        assert yes
        assert isinstance(wit, SCWitness)
        s, tv = wit.reference
        grid = build_discrete_grid(t, t, inst.d)
        assert validate_subproblem_paths(grid, s, tv, wit.paths) == []
        assert stats["rounds"] >= 1

    def test_everything_free_is_trivially_yes(self):
        rnd = random.Random(3)
        t = random_walk_trajectory(rnd, 9)
        from instgen import trajectory_diameter

        inst = SCInstance(t=t, m=2, ell=0.25, d=1.01 * trajectory_diameter(t))
        yes, wit = sc_decide_discrete(inst)
        assert yes and wit is not None

    def test_far_halves_is_no(self):
        inst = SCInstance(t=line_traj([0, 1, 100, 101]), m=2, ell=1.5, d=0.5)
        assert sc_decide_discrete(inst) == (False, None)

    def test_single_vertex_has_no_candidates(self):
        inst = SCInstance(t=Trajectory([(0.0, 0.0)]), m=2, ell=1.0, d=1.0)
        assert sc_decide_discrete(inst) == (False, None)

    def test_against_bruteforce(self):
        rnd = random.Random(2024)
        yes_seen = no_seen = 0
        for _ in range(300):
            inst = random_discrete_instance(rnd)
            stats = {}
            got, wit = sc_decide_discrete(inst, stats)
            want = sc_discrete_bruteforce(inst)
            assert got == want, inst
            n = inst.t.n
            assert stats["links"] + stats["cuts"] <= 6 * n * n
            if got:
                yes_seen += 1
                s, tv = wit.reference
                grid = build_discrete_grid(inst.t, inst.t, inst.d)
                assert len(wit.paths) == inst.m - 1
                assert validate_subproblem_paths(grid, s, tv, wit.paths) == []
                assert wit.intervals == [(p[0][1], p[-1][1]) for p in wit.paths]
            else:
                no_seen += 1
                assert wit is None
        # the generator should exercise both answers heavily
        assert yes_seen > 50 and no_seen > 50

    def test_matches_standalone_on_larger_instances(self):
        rnd = random.Random(77)
        for _ in range(25):
            inst = random_discrete_instance(rnd, n_max=40)
            got, _ = sc_decide_discrete(inst)
            grid = build_discrete_grid(inst.t, inst.t, inst.d)
            want = any(
                solve_subproblem_discrete(grid, inst.m, s, t) is not None
                for s, t in candidate_references_discrete(inst.t, inst.ell)
            )
            assert got == want, inst

    def test_budget_stats_reported(self):
        inst = SCInstance(t=square_laps(4), m=4, ell=4.0, d=0.05)
        stats = {}
        sc_decide_discrete(inst, stats)
        for key in ("rounds", "links", "cuts", "revisit_max", "nodes"):
            assert key in stats and stats[key] >= 0
