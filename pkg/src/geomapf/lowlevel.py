"""Optimal single-agent space-time A* on the roadmap under vertex-time
constraints. Each edge (including a self-loop wait) costs exactly 1 step.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from .envgen import Roadmap

INF = float("inf")

# (agent, vertex, time): agent must not be at vertex at that time step
Constraint = Tuple[int, int, int]


@dataclass
class PlanResult:
    path: Optional[List[int]]  # vertex ids, index = time step
    status: str  # "solved" | "cap_exhausted" | "disconnected"

    @property
    def arrival(self) -> int:
        assert self.path is not None
        return len(self.path) - 1


def reverse_bfs_dists(roadmap: Roadmap, goal: int) -> List[float]:
    """Exact minimum hop counts to goal on the reversed graph (inf if
    unreachable); admissible heuristic for unit-cost space-time search."""
    rev: Dict[int, List[int]] = {i: [] for i in range(roadmap.num_vertices)}
    for s, d in roadmap.edges:
        if s != d:
            rev[d].append(s)
    dist = [INF] * roadmap.num_vertices
    dist[goal] = 0
    queue = [goal]
    while queue:
        nxt = []
        for v in queue:
            for u in rev[v]:
                if dist[u] == INF:
                    dist[u] = dist[v] + 1
                    nxt.append(u)
        queue = nxt
    return dist


def default_t_cap(roadmap: Roadmap, dists: List[float], n_constraints: int) -> int:
    finite = [d for d in dists if d != INF]
    max_hops = int(max(finite)) if finite else 0
    return roadmap.num_vertices + n_constraints + max_hops


def plan_spacetime(
    roadmap: Roadmap,
    start: int,
    goal: int,
    constraints: Set[Tuple[int, int]],  # (vertex, time) pairs for this agent
    t_cap: Optional[int] = None,
    dists: Optional[List[float]] = None,
) -> PlanResult:
    """Minimum-arrival-time path start -> goal avoiding constrained (v, t).

    The goal test requires no constraint on the goal vertex at any later
    time, so stay-at-goal semantics hold for the returned path.
    """
    if dists is None:
        dists = reverse_bfs_dists(roadmap, goal)
    if dists[start] == INF:
        return PlanResult(None, "disconnected")
    if t_cap is None:
        t_cap = default_t_cap(roadmap, dists, len(constraints))

    latest_goal_block = max((t for v, t in constraints if v == goal), default=-1)

    # frontier entries: (f, -g, vertex); ties by deeper time then vertex id
    start_key = (start, 0)
    came: Dict[Tuple[int, int], Tuple[int, int]] = {}
    best_g: Dict[Tuple[int, int], int] = {start_key: 0}
    open_heap: List[Tuple[float, int, int]] = []
    if (start, 0) not in constraints:
        heapq.heappush(open_heap, (dists[start], 0, start))
    while open_heap:
        f, neg_g, v = heapq.heappop(open_heap)
        g = -neg_g
        key = (v, g)
        if best_g.get(key, INF) < g:
            continue
        if v == goal and g > latest_goal_block:
            path = [v]
            while key in came:
                key = came[key]
                path.append(key[0])
            path.reverse()
            return PlanResult(path, "solved")
        if g >= t_cap:
            continue
        t = g + 1
        for u in roadmap.neighbors(v):
            if (u, t) in constraints:
                continue
            ukey = (u, t)
            if ukey in best_g:
                continue
            if dists[u] == INF:
                continue
            best_g[ukey] = t
            came[ukey] = key
            heapq.heappush(open_heap, (t + dists[u], -t, u))
    return PlanResult(None, "cap_exhausted")
