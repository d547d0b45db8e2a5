"""Maze / Box world generation, roadmap sampling, endpoint assignment, and
the versioned instance file format.

All generators are deterministic functions of (spec, seed).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .geometry import Rect, Segment2, edge_free, swept_discs_disjoint, vertex_free

Bounds = Tuple[float, float, float, float]  # (xmin, ymin, xmax, ymax)

FORMAT_HEADER = "geo-mapf v1"


class GenerationError(RuntimeError):
    """Raised when a generator exhausts its attempt budget."""


class ParseError(ValueError):
    """Instance file parse/validation failure; message names line and field."""


@dataclass(frozen=True)
class WorldSpec:
    kind: str = "box"  # "maze" or "box"
    bounds: Bounds = (0.0, 0.0, 1.0, 1.0)
    seed: int = 0
    # maze parameters
    maze_cells: int = 4
    wall_thickness: float = 0.02
    wall_removal_prob: float = 0.15
    # box parameters
    box_count: int = 8
    box_size_min: float = 0.05
    box_size_max: float = 0.2

    def __post_init__(self):
        if self.kind not in ("maze", "box"):
            raise ValueError(f"unknown world kind {self.kind!r}")
        xmin, ymin, xmax, ymax = self.bounds
        if not (xmin < xmax and ymin < ymax):
            raise ValueError("bounds are empty")
        if not 0.0 <= self.wall_removal_prob <= 1.0:
            raise ValueError("wall_removal_prob outside [0,1]")


@dataclass
class Roadmap:
    positions: List[Tuple[float, float]]
    edges: Set[Tuple[int, int]]  # directed (src, dst), includes self loops
    adj: Dict[int, List[int]] = field(init=False)

    def __post_init__(self):
        self.adj = {i: [] for i in range(len(self.positions))}
        for s, d in sorted(self.edges):
            self.adj[s].append(d)

    @property
    def num_vertices(self) -> int:
        return len(self.positions)

    def neighbors(self, v: int) -> List[int]:
        return self.adj[v]

    def edge_segment(self, src: int, dst: int) -> Segment2:
        return Segment2(self.positions[src], self.positions[dst])


@dataclass
class Instance:
    roadmap: Roadmap
    starts: List[int]
    goals: List[int]
    radius: float
    world_kind: str
    bounds: Bounds
    obstacles: List[Rect]

    @property
    def num_agents(self) -> int:
        return len(self.starts)


def gen_world(spec: WorldSpec) -> List[Rect]:
    rng = random.Random(spec.seed)
    if spec.kind == "box":
        return _gen_box(spec, rng)
    return _gen_maze(spec, rng)


def _gen_box(spec: WorldSpec, rng: random.Random) -> List[Rect]:
    xmin, ymin, xmax, ymax = spec.bounds
    rects: List[Rect] = []
    for _ in range(spec.box_count):
        w = rng.uniform(spec.box_size_min, spec.box_size_max)
        h = rng.uniform(spec.box_size_min, spec.box_size_max)
        x = rng.uniform(xmin, xmax - w)
        y = rng.uniform(ymin, ymax - h)
        rects.append((x, y, x + w, y + h))
    return rects


def maze_walls(spec: WorldSpec, rng: random.Random) -> List[Tuple[Tuple[int, int], Tuple[int, int]]]:
    """Internal walls kept after carving a random spanning tree over the
    cell grid plus extra removals with probability wall_removal_prob.

    Returns kept walls as pairs of adjacent cells."""
    g = spec.maze_cells
    cells = [(i, j) for i in range(g) for j in range(g)]
    walls = []
    for i in range(g):
        for j in range(g):
            if i + 1 < g:
                walls.append(((i, j), (i + 1, j)))
            if j + 1 < g:
                walls.append(((i, j), (i, j + 1)))
    # randomized Kruskal: union-find over cells
    parent = {c: c for c in cells}

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    order = walls[:]
    rng.shuffle(order)
    carved = set()
    for a, b in order:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            carved.add((a, b))
    kept = []
    for wall in walls:
        if wall in carved:
            continue
        if rng.random() < spec.wall_removal_prob:
            continue
        kept.append(wall)
    return kept


def _gen_maze(spec: WorldSpec, rng: random.Random) -> List[Rect]:
    xmin, ymin, xmax, ymax = spec.bounds
    g = spec.maze_cells
    cw = (xmax - xmin) / g
    ch = (ymax - ymin) / g
    t = spec.wall_thickness
    if cw - t < 2 * t or ch - t < 2 * t:
        raise GenerationError("maze parameters leave no free corridor")
    rects: List[Rect] = []
    for (i1, j1), (i2, j2) in maze_walls(spec, rng):
        if i2 == i1 + 1:  # vertical wall between horizontally adjacent cells
            x = xmin + i2 * cw
            y0 = ymin + j1 * ch
            rects.append((x - t / 2, y0 - t / 2, x + t / 2, y0 + ch + t / 2))
        else:  # horizontal wall between vertically adjacent cells
            y = ymin + j2 * ch
            x0 = xmin + i1 * cw
            rects.append((x0 - t / 2, y - t / 2, x0 + cw + t / 2, y + t / 2))
    return rects


def sample_roadmap(
    obstacles: Sequence[Rect],
    n: int,
    k: int,
    r: float,
    seed: int,
    bounds: Bounds = (0.0, 0.0, 1.0, 1.0),
    max_attempts_per_vertex: int = 2000,
) -> Roadmap:
    """Rejection-sample n collision-free vertices and connect each to its k
    nearest neighbors with collision-free directed edges; every vertex gets a
    self-loop wait edge."""
    if n < 2:
        raise ValueError("need n >= 2")
    if k < 1:
        raise ValueError("need k >= 1")
    rng = random.Random(seed)
    xmin, ymin, xmax, ymax = bounds
    positions: List[Tuple[float, float]] = []
    for _ in range(n):
        for _attempt in range(max_attempts_per_vertex):
            p = (rng.uniform(xmin, xmax), rng.uniform(ymin, ymax))
            if vertex_free(p, obstacles, r):
                positions.append(p)
                break
        else:
            raise GenerationError(
                f"could not sample a free vertex after {max_attempts_per_vertex} attempts"
            )
    edges: Set[Tuple[int, int]] = set()
    for i in range(n):
        edges.add((i, i))
        px, py = positions[i]
        others = sorted(
            (j for j in range(n) if j != i),
            key=lambda j: ((positions[j][0] - px) ** 2 + (positions[j][1] - py) ** 2, j),
        )
        for j in others[:k]:
            seg = Segment2(positions[i], positions[j])
            if edge_free(seg, obstacles, r):
                edges.add((i, j))
    return Roadmap(positions, edges)


def reachable_from(roadmap: Roadmap, s: int) -> Set[int]:
    seen = {s}
    stack = [s]
    while stack:
        v = stack.pop()
        for u in roadmap.neighbors(v):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def assign_endpoints(
    roadmap: Roadmap,
    m: int,
    r: float,
    seed: int,
    max_attempts: int = 5000,
) -> Tuple[List[int], List[int]]:
    """Pick M distinct pairwise disc-disjoint starts and goals with each goal
    reachable from its start."""
    if roadmap.num_vertices < m:
        raise ValueError("roadmap too small for requested agent count")
    rng = random.Random(seed)
    pos = roadmap.positions

    def disjoint(ids: List[int], v: int) -> bool:
        px, py = pos[v]
        for u in ids:
            qx, qy = pos[u]
            if (px - qx) ** 2 + (py - qy) ** 2 < (2 * r) ** 2:
                return False
        return True

    for _attempt in range(max_attempts):
        verts = list(range(roadmap.num_vertices))
        rng.shuffle(verts)
        starts: List[int] = []
        for v in verts:
            if disjoint(starts, v):
                starts.append(v)
                if len(starts) == m:
                    break
        if len(starts) < m:
            continue
        goals: List[int] = []
        ok = True
        for s in starts:
            reach = reachable_from(roadmap, s)
            candidates = [v for v in verts if v in reach and v not in goals and disjoint(goals, v)]
            if not candidates:
                ok = False
                break
            goals.append(rng.choice(candidates))
        if ok:
            return starts, goals
    raise GenerationError(f"no valid endpoint assignment found in {max_attempts} attempts")


def make_instance(
    spec: WorldSpec,
    m: int,
    n: int = 100,
    k: int = 8,
    r: float = 0.05,
    seed: Optional[int] = None,
) -> Instance:
    """Convenience pipeline: world -> roadmap -> endpoints."""
    seed = spec.seed if seed is None else seed
    obstacles = gen_world(spec)
    roadmap = sample_roadmap(obstacles, n, k, r, seed=seed + 1, bounds=spec.bounds)
    starts, goals = assign_endpoints(roadmap, m, r, seed=seed + 2)
    return Instance(roadmap, starts, goals, r, spec.kind, spec.bounds, obstacles)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_instance(inst: Instance, path: str) -> None:
    lines = [FORMAT_HEADER]
    lines.append(f"world {inst.world_kind}")
    lines.append("bounds " + " ".join(_fmt(v) for v in inst.bounds))
    lines.append(f"rects {len(inst.obstacles)}")
    for rect in inst.obstacles:
        lines.append(" ".join(_fmt(v) for v in rect))
    lines.append(f"V {inst.roadmap.num_vertices}")
    for i, (x, y) in enumerate(inst.roadmap.positions):
        lines.append(f"{i} {_fmt(x)} {_fmt(y)}")
    edges = sorted(inst.roadmap.edges)
    lines.append(f"E {len(edges)}")
    for s, d in edges:
        lines.append(f"{s} {d}")
    lines.append(f"A {inst.num_agents}")
    for s, g in zip(inst.starts, inst.goals):
        lines.append(f"{s} {g}")
    lines.append(f"R {_fmt(inst.radius)}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


class _Reader:
    def __init__(self, path: str):
        with open(path) as f:
            self.lines = [ln.rstrip("\n") for ln in f]
        self.idx = 0

    def next(self, field: str) -> str:
        if self.idx >= len(self.lines):
            raise ParseError(f"line {self.idx + 1}: unexpected end of file, expected {field}")
        line = self.lines[self.idx]
        self.idx += 1
        return line

    def error(self, field: str, msg: str) -> ParseError:
        return ParseError(f"line {self.idx}: field {field!r}: {msg}")


def read_instance(path: str) -> Instance:
    rd = _Reader(path)
    header = rd.next("header")
    if header != FORMAT_HEADER:
        raise rd.error("header", f"expected {FORMAT_HEADER!r}, got {header!r}")
    parts = rd.next("world").split()
    if len(parts) != 2 or parts[0] != "world" or parts[1] not in ("maze", "box"):
        raise rd.error("world", "expected 'world maze|box'")
    kind = parts[1]
    parts = rd.next("bounds").split()
    if len(parts) != 5 or parts[0] != "bounds":
        raise rd.error("bounds", "expected 'bounds xmin ymin xmax ymax'")
    bounds = tuple(float(v) for v in parts[1:])
    parts = rd.next("rects").split()
    if len(parts) != 2 or parts[0] != "rects":
        raise rd.error("rects", "expected 'rects K'")
    rects = []
    for _ in range(int(parts[1])):
        vals = rd.next("rect").split()
        if len(vals) != 4:
            raise rd.error("rect", "expected 4 floats")
        rects.append(tuple(float(v) for v in vals))
    parts = rd.next("V").split()
    if len(parts) != 2 or parts[0] != "V":
        raise rd.error("V", "expected 'V n'")
    nv = int(parts[1])
    positions = [None] * nv
    for _ in range(nv):
        vals = rd.next("vertex").split()
        if len(vals) != 3:
            raise rd.error("vertex", "expected 'id x y'")
        vid = int(vals[0])
        if not 0 <= vid < nv:
            raise rd.error("vertex", f"vertex id {vid} out of range")
        positions[vid] = (float(vals[1]), float(vals[2]))
    if any(p is None for p in positions):
        raise rd.error("vertex", "vertex ids not dense 0..n-1")
    parts = rd.next("E").split()
    if len(parts) != 2 or parts[0] != "E":
        raise rd.error("E", "expected 'E m'")
    edges = set()
    for _ in range(int(parts[1])):
        vals = rd.next("edge").split()
        if len(vals) != 2:
            raise rd.error("edge", "expected 'src dst'")
        s, d = int(vals[0]), int(vals[1])
        if not (0 <= s < nv and 0 <= d < nv):
            raise rd.error("edge", f"dangling edge ({s},{d})")
        edges.add((s, d))
    parts = rd.next("A").split()
    if len(parts) != 2 or parts[0] != "A":
        raise rd.error("A", "expected 'A M'")
    starts, goals = [], []
    for _ in range(int(parts[1])):
        vals = rd.next("agent").split()
        if len(vals) != 2:
            raise rd.error("agent", "expected 'start goal'")
        s, g = int(vals[0]), int(vals[1])
        if not (0 <= s < nv and 0 <= g < nv):
            raise rd.error("agent", f"endpoint ({s},{g}) out of range")
        starts.append(s)
        goals.append(g)
    parts = rd.next("R").split()
    if len(parts) != 2 or parts[0] != "R":
        raise rd.error("R", "expected 'R r'")
    radius = float(parts[1])
    if radius <= 0:
        raise rd.error("R", "radius must be positive")
    return Instance(Roadmap(positions, edges), starts, goals, radius, kind, bounds, rects)
