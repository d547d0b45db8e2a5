import math
import random

from geomapf.envgen import Roadmap
from geomapf.lowlevel import default_t_cap, plan_spacetime, reverse_bfs_dists
from oracles import bfs_min_arrival

INF = float("inf")


def line_roadmap(n=3):
    # chain 0 -> 1 -> ... -> n-1 with wait loops
    positions = [(float(i), 0.0) for i in range(n)]
    edges = {(i, i) for i in range(n)} | {(i, i + 1) for i in range(n - 1)}
    return Roadmap(positions, edges)


def random_roadmap(rng, n_max=12):
    n = rng.randint(3, n_max)
    positions = [(rng.random(), rng.random()) for _ in range(n)]
    edges = {(i, i) for i in range(n)}
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < 0.25:
                edges.add((i, j))
    return Roadmap(positions, edges)


class TestReverseBfs:
    def test_goal_zero(self):
        assert reverse_bfs_dists(line_roadmap(), 2)[2] == 0

    def test_line_distance(self):
        assert reverse_bfs_dists(line_roadmap(), 2)[0] == 2

    def test_unreachable(self):
        rm = Roadmap([(0, 0), (1, 0)], {(0, 0), (1, 1)})
        assert reverse_bfs_dists(rm, 1)[0] == INF


class TestPlanSpacetime:
    def test_start_is_goal(self):
        res = plan_spacetime(line_roadmap(), 2, 2, set())
        assert res.status == "solved" and res.path == [2] and res.arrival == 0

    def test_forced_wait(self):
        # constraint at (vertex 1, t=1) forces a wait; oracle confirms T=3
        rm = line_roadmap(3)
        cs = {(1, 1)}
        res = plan_spacetime(rm, 0, 2, cs)
        assert res.status == "solved"
        assert res.path == [0, 0, 1, 2]
        assert bfs_min_arrival(rm, 0, 2, cs, cap=4) == 3

    def test_goal_blocked_forever(self):
        rm = line_roadmap(3)
        cap = 6
        cs = {(2, t) for t in range(cap + 1)}
        res = plan_spacetime(rm, 0, 2, cs, t_cap=cap)
        assert res.path is None and res.status == "cap_exhausted"

    def test_disconnected(self):
        rm = Roadmap([(0, 0), (1, 0)], {(0, 0), (1, 1)})
        res = plan_spacetime(rm, 0, 1, set())
        assert res.path is None and res.status == "disconnected"

    def test_matches_bfs_oracle_random(self):
        rng = random.Random(2024)
        for _ in range(200):
            rm = random_roadmap(rng)
            s = rng.randrange(rm.num_vertices)
            g = rng.randrange(rm.num_vertices)
            cs = {
                (rng.randrange(rm.num_vertices), rng.randint(0, 6))
                for _ in range(rng.randint(0, 5))
            }
            dists = reverse_bfs_dists(rm, g)
            cap = default_t_cap(rm, dists, len(cs))
            res = plan_spacetime(rm, s, g, cs, t_cap=cap)
            expected = bfs_min_arrival(rm, s, g, cs, cap)
            if expected is None:
                assert res.path is None
            else:
                assert res.path is not None
                assert res.arrival == expected
                # replay: path obeys constraints and edges
                for t, v in enumerate(res.path):
                    assert (v, t) not in cs
                for a, b in zip(res.path, res.path[1:]):
                    assert (a, b) in rm.edges

    def test_heuristic_admissible(self):
        rng = random.Random(5)
        for _ in range(50):
            rm = random_roadmap(rng)
            g = rng.randrange(rm.num_vertices)
            dists = reverse_bfs_dists(rm, g)
            for v in range(rm.num_vertices):
                true = bfs_min_arrival(rm, v, g, set(), cap=2 * rm.num_vertices)
                if true is not None:
                    assert dists[v] <= true

    def test_monotone_replan(self):
        rng = random.Random(77)
        for _ in range(50):
            rm = random_roadmap(rng)
            s, g = 0, rm.num_vertices - 1
            res = plan_spacetime(rm, s, g, set())
            if res.path is None:
                continue
            cs = {(rng.randrange(rm.num_vertices), rng.randint(1, 4))}
            res2 = plan_spacetime(rm, s, g, cs)
            if res2.path is not None:
                assert res2.arrival >= res.arrival
