"""High-level CBS tree search: optimal best-first CBS, bounded-suboptimal
focal CBS with a pluggable heuristic, conflict detection, and an
independent solution validator.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .envgen import Instance, Roadmap
from .geometry import Segment2, edge_free, segment_segment_distance, vertex_free
from .lowlevel import Constraint, plan_spacetime, reverse_bfs_dists

INF = float("inf")


@dataclass(frozen=True)
class Conflict:
    i: int
    j: int  # i < j
    t: int  # t >= 1
    vi_prev: int
    vj_prev: int
    vi: int
    vj: int


@dataclass
class SearchNode:
    constraints: FrozenSet[Constraint]
    solution: List[List[int]]
    cost: int
    depth: int
    parent: Optional["SearchNode"]
    node_id: int
    num_conflicts: int
    added_constraint: Optional[Constraint] = None


@dataclass
class SolveResult:
    outcome: str  # "solved" | "timeout" | "infeasible" | "no_solution"
    solution: Optional[List[List[int]]] = None
    flowtime: Optional[int] = None
    stats: Dict[str, float] = field(default_factory=dict)
    tree_log: Optional[List[dict]] = None
    solved_node_id: Optional[int] = None


def _vertex_at(path: Sequence[int], t: int) -> int:
    return path[t] if t < len(path) else path[-1]


def iter_conflicts(solution: Sequence[Sequence[int]], roadmap: Roadmap, r: float):
    """Yield conflicts in (t, i, j) order over the stay-at-goal horizon."""
    m = len(solution)
    horizon = max(len(p) - 1 for p in solution)
    pos = roadmap.positions
    for t in range(1, horizon + 1):
        for i in range(m):
            for j in range(i + 1, m):
                vi_prev = _vertex_at(solution[i], t - 1)
                vi = _vertex_at(solution[i], t)
                vj_prev = _vertex_at(solution[j], t - 1)
                vj = _vertex_at(solution[j], t)
                d = segment_segment_distance(
                    Segment2(pos[vi_prev], pos[vi]), Segment2(pos[vj_prev], pos[vj])
                )
                if d < 2.0 * r:
                    yield Conflict(i, j, t, vi_prev, vj_prev, vi, vj)


def detect_first_conflict(
    solution: Sequence[Sequence[int]], roadmap: Roadmap, r: float
) -> Optional[Conflict]:
    return next(iter_conflicts(solution, roadmap, r), None)


def count_conflicts(solution: Sequence[Sequence[int]], roadmap: Roadmap, r: float) -> int:
    return sum(1 for _ in iter_conflicts(solution, roadmap, r))


def split_conflict(c: Conflict) -> Tuple[Constraint, Constraint]:
    """Destination-vertex constraints for both conflicting agents."""
    return (c.i, c.vi, c.t), (c.j, c.vj, c.t)


def expand_constraints(c: Conflict) -> Tuple[Constraint, ...]:
    """Child constraints used by the solvers: destination constraints first,
    then source constraints.

    With swept-disc conflicts the two destination constraints alone are
    lossy: a solution may re-enter the same destination vertex at the same
    time over a different, non-conflicting edge. The conflicting edge pair
    recurs iff all four endpoint occupancies recur, so branching on all
    four keeps the search complete and optimal while using only
    vertex-time constraints."""
    return (
        (c.i, c.vi, c.t),
        (c.j, c.vj, c.t),
        (c.i, c.vi_prev, c.t - 1),
        (c.j, c.vj_prev, c.t - 1),
    )


# ---------------------------------------------------------------------------
# heuristics over search nodes


def psi_conflict_count(node: SearchNode) -> tuple:
    return (node.num_conflicts,)


def psi_cost(node: SearchNode) -> tuple:
    return (node.cost,)


def psi_depth_phi(phi_eval: Callable[[List[List[int]]], float]) -> Callable[[SearchNode], tuple]:
    """Key <-depth, phi(solution)>: deeper nodes first, then lower phi."""

    def psi(node: SearchNode) -> tuple:
        return (-node.depth, phi_eval(node.solution))

    return psi


# ---------------------------------------------------------------------------
# solvers


class _Search:
    """Shared machinery for CBS and focal CBS."""

    def __init__(
        self,
        inst: Instance,
        timeout: float,
        log_tree: bool,
        max_expansions: Optional[int] = None,
    ):
        self.inst = inst
        self.roadmap = inst.roadmap
        self.r = inst.radius
        self.deadline = time.monotonic() + timeout if timeout is not None else None
        self.max_expansions = max_expansions
        self.dists = [reverse_bfs_dists(self.roadmap, g) for g in inst.goals]
        self.next_id = 0
        self.expansions = 0
        self.generated = 0
        self.recurring_conflicts = 0
        self.seen_constraint_sets: Set[FrozenSet[Constraint]] = set()
        self.tree_log: Optional[List[dict]] = [] if log_tree else None
        self.t0 = time.monotonic()

    def timed_out(self) -> bool:
        # the expansion budget gives runs a machine-independent, reproducible
        # cutoff; the wall-clock deadline stays as the hard backstop
        if self.max_expansions is not None and self.expansions >= self.max_expansions:
            return True
        return self.deadline is not None and time.monotonic() > self.deadline

    def _log(self, node: SearchNode) -> None:
        if self.tree_log is not None:
            self.tree_log.append(
                {
                    "id": node.node_id,
                    "parent": node.parent.node_id if node.parent else None,
                    "depth": node.depth,
                    "cost": node.cost,
                    "constraint": list(node.added_constraint) if node.added_constraint else None,
                    "solution": [list(p) for p in node.solution],
                }
            )

    def make_root(self) -> Optional[SearchNode]:
        solution = []
        for a, (s, g) in enumerate(zip(self.inst.starts, self.inst.goals)):
            res = plan_spacetime(self.roadmap, s, g, set(), dists=self.dists[a])
            if res.path is None:
                return None
            solution.append(res.path)
        cost = sum(len(p) - 1 for p in solution)
        root = SearchNode(
            frozenset(), solution, cost, 0, None, self.next_id,
            count_conflicts(solution, self.roadmap, self.r),
        )
        self.next_id += 1
        self.generated += 1
        self._log(root)
        return root

    def make_child(self, parent: SearchNode, constraint: Constraint) -> Optional[SearchNode]:
        agent = constraint[0]
        constraints = parent.constraints | {constraint}
        # identical constraint sets reached in a different branch order are
        # the same subproblem; keep only the first copy
        if constraints in self.seen_constraint_sets:
            return None
        self.seen_constraint_sets.add(constraints)
        agent_cs = {(v, t) for a, v, t in constraints if a == agent}
        res = plan_spacetime(
            self.roadmap, self.inst.starts[agent], self.inst.goals[agent],
            agent_cs, dists=self.dists[agent],
        )
        if res.path is None:
            return None
        solution = [list(p) for p in parent.solution]
        solution[agent] = res.path
        cost = sum(len(p) - 1 for p in solution)
        child = SearchNode(
            constraints, solution, cost, parent.depth + 1, parent, self.next_id,
            count_conflicts(solution, self.roadmap, self.r),
            added_constraint=constraint,
        )
        self.next_id += 1
        self.generated += 1
        self._log(child)
        return child

    def result(self, outcome: str, node: Optional[SearchNode] = None) -> SolveResult:
        stats = {
            "expansions": self.expansions,
            "generated": self.generated,
            "wall_time": time.monotonic() - self.t0,
            "recurring_conflicts": self.recurring_conflicts,
        }
        if node is not None:
            return SolveResult(
                outcome, [list(p) for p in node.solution], node.cost, stats,
                self.tree_log, node.node_id,
            )
        return SolveResult(outcome, stats=stats, tree_log=self.tree_log)


def cbs_solve(
    inst: Instance,
    timeout: float = 300.0,
    log_tree: bool = False,
    max_expansions: Optional[int] = None,
) -> SolveResult:
    """Optimal CBS: best-first on cost, ties by fewer conflicts then FIFO."""
    search = _Search(inst, timeout, log_tree, max_expansions)
    root = search.make_root()
    if root is None:
        return search.result("infeasible")
    open_heap: List[Tuple[int, int, int, SearchNode]] = []
    heapq.heappush(open_heap, (root.cost, root.num_conflicts, root.node_id, root))
    while open_heap:
        if search.timed_out():
            return search.result("timeout")
        _, _, _, node = heapq.heappop(open_heap)
        search.expansions += 1
        conflict = detect_first_conflict(node.solution, search.roadmap, search.r)
        if conflict is None:
            return search.result("solved", node)
        children = []
        for constraint in expand_constraints(conflict):
            child = search.make_child(node, constraint)
            if child is not None:
                children.append(child)
                heapq.heappush(
                    open_heap, (child.cost, child.num_conflicts, child.node_id, child)
                )
        # loop sentinel: surface (via stats) a conflict every child repeats
        if children and all(
            detect_first_conflict(ch.solution, search.roadmap, search.r) == conflict
            for ch in children
        ):
            search.recurring_conflicts += 1
    return search.result("no_solution")


def focal_solve(
    inst: Instance,
    w: float,
    psi: Callable[[SearchNode], tuple],
    timeout: float = 300.0,
    log_tree: bool = False,
    debug: bool = False,
    max_expansions: Optional[int] = None,
) -> SolveResult:
    """Bounded-suboptimal CBS: best-first over Focal = {N in Open :
    c(N) <= w * LB} ordered by psi, ties broken FIFO by node id."""
    if w < 1.0:
        raise ValueError("suboptimality factor w must be >= 1")
    search = _Search(inst, timeout, log_tree, max_expansions)
    root = search.make_root()
    if root is None:
        return search.result("infeasible")

    open_nodes: Dict[int, SearchNode] = {root.node_id: root}
    open_heap: List[Tuple[int, int, int]] = [(root.cost, root.num_conflicts, root.node_id)]
    lb = root.cost
    focal_heap: List[Tuple[tuple, int]] = [(psi(root), root.node_id)]
    focal_ids: Set[int] = {root.node_id}

    def open_min_cost() -> Optional[int]:
        while open_heap and open_heap[0][2] not in open_nodes:
            heapq.heappop(open_heap)
        return open_heap[0][0] if open_heap else None

    while open_nodes:
        if search.timed_out():
            return search.result("timeout")
        # select argmin psi over Focal (lazy removal)
        node = None
        while focal_heap:
            _, nid = heapq.heappop(focal_heap)
            if nid in focal_ids and nid in open_nodes:
                node = open_nodes[nid]
                focal_ids.discard(nid)
                break
        assert node is not None, "Focal empty while Open non-empty"
        if debug:
            mc = open_min_cost()
            assert mc is not None and mc >= lb, "LB above minimum Open cost"
            assert node.cost <= w * lb, "selected node violates focal bound"
        search.expansions += 1
        conflict = detect_first_conflict(node.solution, search.roadmap, search.r)
        if conflict is None:
            return search.result("solved", node)
        del open_nodes[node.node_id]
        children = []
        for constraint in expand_constraints(conflict):
            child = search.make_child(node, constraint)
            if child is None:
                continue
            children.append(child)
            open_nodes[child.node_id] = child
            heapq.heappush(open_heap, (child.cost, child.num_conflicts, child.node_id))
            if child.cost <= w * lb:
                focal_ids.add(child.node_id)
                heapq.heappush(focal_heap, (psi(child), child.node_id))
        if children and all(
            detect_first_conflict(ch.solution, search.roadmap, search.r) == conflict
            for ch in children
        ):
            search.recurring_conflicts += 1
        # LB update; done after child insertion so Open is never empty here
        # and the minimum-cost node is always (re)admitted to Focal
        mc = open_min_cost()
        if mc is not None and mc > lb:
            lb = mc
            focal_ids = {nid for nid, n in open_nodes.items() if n.cost <= w * lb}
            focal_heap = [(psi(n), nid) for nid, n in open_nodes.items() if nid in focal_ids]
            heapq.heapify(focal_heap)
            if debug:
                assert mc == min(n.cost for n in open_nodes.values())
    return search.result("no_solution")


# ---------------------------------------------------------------------------
# validator (independent re-check; reads no planner internals)


def validate_solution(inst: Instance, solution: Sequence[Sequence[int]]) -> List[dict]:
    violations: List[dict] = []
    roadmap = inst.roadmap
    pos = roadmap.positions
    if len(solution) != inst.num_agents:
        return [{"kind": "shape", "msg": "wrong number of paths"}]
    for i, path in enumerate(solution):
        if not path:
            violations.append({"kind": "shape", "agent": i, "msg": "empty path"})
            continue
        if path[0] != inst.starts[i]:
            violations.append({"kind": "endpoint", "agent": i, "msg": "path does not start at s"})
        if path[-1] != inst.goals[i]:
            violations.append({"kind": "endpoint", "agent": i, "msg": "path does not end at g"})
        for t in range(len(path)):
            v = path[t]
            if not 0 <= v < roadmap.num_vertices:
                violations.append({"kind": "shape", "agent": i, "t": t, "msg": "bad vertex id"})
                continue
            if not vertex_free(pos[v], inst.obstacles, inst.radius):
                violations.append({"kind": "obstacle", "agent": i, "t": t, "msg": "vertex in collision"})
            if t > 0:
                if (path[t - 1], v) not in roadmap.edges:
                    violations.append(
                        {"kind": "edge", "agent": i, "t": t, "msg": "move not a roadmap edge"}
                    )
                elif not edge_free(Segment2(pos[path[t - 1]], pos[v]), inst.obstacles, inst.radius):
                    violations.append(
                        {"kind": "obstacle", "agent": i, "t": t, "msg": "edge in collision"}
                    )
    horizon = max((len(p) - 1 for p in solution if p), default=0)
    for t in range(1, horizon + 1):
        for i in range(len(solution)):
            for j in range(i + 1, len(solution)):
                if not solution[i] or not solution[j]:
                    continue
                ei = Segment2(
                    pos[_vertex_at(solution[i], t - 1)], pos[_vertex_at(solution[i], t)]
                )
                ej = Segment2(
                    pos[_vertex_at(solution[j], t - 1)], pos[_vertex_at(solution[j], t)]
                )
                if segment_segment_distance(ei, ej) < 2.0 * inst.radius:
                    violations.append({"kind": "inter-agent", "t": t, "agents": (i, j)})
    # parked agents at t=0 as well: coincident starts
    for i in range(len(solution)):
        for j in range(i + 1, len(solution)):
            pi, pj = pos[solution[i][0]], pos[solution[j][0]]
            if ((pi[0] - pj[0]) ** 2 + (pi[1] - pj[1]) ** 2) ** 0.5 < 2.0 * inst.radius:
                violations.append({"kind": "inter-agent", "t": 0, "agents": (i, j)})
    return violations
