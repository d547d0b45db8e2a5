"""Benchmark harness: suite generation, solver runs, and metric reports.

Metrics follow the standard MAPF conventions: success rate per agent
count, mean computation time with failed runs counted at the timeout, and
flowtime ratios computed only over instances co-solved by both compared
solvers.
"""

from __future__ import annotations

import csv
import glob
import json
import os
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import bridge, datagen, highlevel
from .envgen import (
    GenerationError,
    Instance,
    WorldSpec,
    make_instance,
    read_instance,
    write_instance,
)

RUN_FIELDS = [
    "instance", "solver", "w", "agents", "outcome", "wall_time_s", "flowtime", "expansions",
]


@dataclass
class RunRecord:
    instance: str
    solver: str
    w: float
    agents: int
    outcome: str  # "solved" | "timeout" | "infeasible" | "error"
    wall_time_s: float
    flowtime: Optional[int]
    expansions: int

    def row(self) -> List[str]:
        return [
            self.instance, self.solver, repr(self.w), str(self.agents), self.outcome,
            f"{self.wall_time_s:.6f}",
            "" if self.flowtime is None else str(self.flowtime),
            str(self.expansions),
        ]


def generate_suite(
    out_dir: str,
    kind: str,
    count: int,
    agents: int,
    n: int,
    k: int,
    radius: float,
    seed: int,
    maze_cells: int = 4,
    box_count: int = 8,
) -> Tuple[List[str], List[str]]:
    """Write `count` instance files; returns (written paths, failure messages)."""
    os.makedirs(out_dir, exist_ok=True)
    written, failures = [], []
    for i in range(count):
        s = seed + 1000 * i
        spec = WorldSpec(kind=kind, seed=s, maze_cells=maze_cells, box_count=box_count)
        name = f"{kind}_m{agents}_s{s}.txt"
        path = os.path.join(out_dir, name)
        try:
            inst = make_instance(spec, agents, n=n, k=k, r=radius)
        except (GenerationError, ValueError) as e:
            failures.append(f"{name}: {e}")
            continue
        write_instance(inst, path)
        written.append(path)
    return written, failures


def run_solver(
    inst: Instance,
    instance_id: str,
    solver: str,
    w: float,
    timeout: float,
    phi_endpoint: Optional[str] = None,
    log_tree: bool = False,
) -> Tuple[RunRecord, highlevel.SolveResult]:
    """solver in {"cbs", "focal", "focal-phi"}; focal uses the conflict-count
    heuristic, focal-phi the learned evaluator behind `phi_endpoint`."""
    t0 = time.monotonic()
    client = None
    try:
        if solver == "cbs":
            res = highlevel.cbs_solve(inst, timeout=timeout, log_tree=log_tree)
        elif solver == "focal":
            res = highlevel.focal_solve(
                inst, w, highlevel.psi_conflict_count, timeout=timeout, log_tree=log_tree
            )
        elif solver == "focal-phi":
            if not phi_endpoint:
                raise ValueError("focal-phi requires --phi-endpoint")
            host, port = phi_endpoint.rsplit(":", 1)
            client = bridge.PhiClient(host, int(port))
            phi = bridge.phi_evaluator(client, inst.roadmap)
            res = highlevel.focal_solve(
                inst, w, highlevel.psi_depth_phi(phi), timeout=timeout, log_tree=log_tree
            )
        else:
            raise ValueError(f"unknown solver {solver!r}")
    finally:
        if client is not None:
            client.close()
    wall = time.monotonic() - t0
    outcome = res.outcome
    if outcome == "solved" and highlevel.validate_solution(inst, res.solution):
        outcome = "error"  # planner returned an invalid solution
    if outcome == "no_solution":
        outcome = "infeasible"
    record = RunRecord(
        instance_id, solver, w, inst.num_agents, outcome, wall,
        res.flowtime if outcome == "solved" else None,
        int(res.stats.get("expansions", 0)),
    )
    return record, res


def write_runs(records: Sequence[RunRecord], path: str) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(RUN_FIELDS)
        for rec in records:
            writer.writerow(rec.row())


def read_runs(paths: Sequence[str]) -> List[RunRecord]:
    records = []
    for path in paths:
        with open(path, newline="") as f:
            reader = csv.DictReader(f)
            for row in reader:
                records.append(
                    RunRecord(
                        row["instance"], row["solver"], float(row["w"]), int(row["agents"]),
                        row["outcome"], float(row["wall_time_s"]),
                        int(row["flowtime"]) if row["flowtime"] else None,
                        int(row["expansions"]),
                    )
                )
    return records


def _solver_key(rec: RunRecord) -> str:
    if rec.solver == "cbs":
        return "cbs"
    return f"{rec.solver}(w={rec.w:g})"


def summarize(records: Sequence[RunRecord], timeout: float) -> List[dict]:
    """Success rate and mean computation time per (solver, agent count);
    failed runs contribute the timeout duration to the mean time."""
    groups: Dict[Tuple[str, int], List[RunRecord]] = {}
    for rec in records:
        groups.setdefault((_solver_key(rec), rec.agents), []).append(rec)
    rows = []
    for (solver, agents), recs in sorted(groups.items()):
        solved = [r for r in recs if r.outcome == "solved"]
        times = [r.wall_time_s if r.outcome == "solved" else timeout for r in recs]
        rows.append(
            {
                "solver": solver,
                "agents": agents,
                "instances": len(recs),
                "success_rate": len(solved) / len(recs),
                "mean_time_s": sum(times) / len(times),
                "mean_flowtime": (
                    sum(r.flowtime for r in solved) / len(solved) if solved else None
                ),
            }
        )
    return rows


def flowtime_ratios(records: Sequence[RunRecord], baseline: str = "cbs") -> List[dict]:
    """Per-solver flowtime ratio vs the baseline over co-solved instances."""
    by_solver: Dict[str, Dict[str, RunRecord]] = {}
    for rec in records:
        by_solver.setdefault(_solver_key(rec), {})[rec.instance] = rec
    base = by_solver.get(baseline, {})
    rows = []
    for solver, runs in sorted(by_solver.items()):
        if solver == baseline:
            continue
        pairs = [
            (runs[iid].flowtime, base[iid].flowtime)
            for iid in runs
            if iid in base
            and runs[iid].outcome == "solved"
            and base[iid].outcome == "solved"
        ]
        rows.append(
            {
                "solver": solver,
                "co_solved": len(pairs),
                "flowtime_ratio": (
                    sum(a / b for a, b in pairs) / len(pairs) if pairs else None
                ),
            }
        )
    return rows


def write_report(
    records: Sequence[RunRecord], out_dir: str, timeout: float, make_figures: bool = True
) -> List[str]:
    """Emit summary/ratio CSVs and matplotlib figures; returns written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    summary = summarize(records, timeout)
    spath = os.path.join(out_dir, "summary.csv")
    with open(spath, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["solver", "agents", "instances", "success_rate", "mean_time_s", "mean_flowtime"]
        )
        for row in summary:
            writer.writerow(
                [
                    row["solver"], row["agents"], row["instances"],
                    f"{row['success_rate']:.4f}", f"{row['mean_time_s']:.4f}",
                    "n/a" if row["mean_flowtime"] is None else f"{row['mean_flowtime']:.3f}",
                ]
            )
    written.append(spath)
    ratios = flowtime_ratios(records)
    rpath = os.path.join(out_dir, "flowtime_ratio.csv")
    with open(rpath, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["solver", "co_solved", "flowtime_ratio_vs_cbs"])
        for row in ratios:
            writer.writerow(
                [
                    row["solver"], row["co_solved"],
                    "n/a" if row["flowtime_ratio"] is None else f"{row['flowtime_ratio']:.4f}",
                ]
            )
    written.append(rpath)
    if make_figures:
        written.extend(_render_figures(summary, out_dir))
    return written


def _render_figures(summary: Sequence[dict], out_dir: str) -> List[str]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    solvers = sorted({row["solver"] for row in summary})
    written = []
    for metric, ylabel, fname in [
        ("success_rate", "success rate", "success_rate.png"),
        ("mean_time_s", "mean computation time [s]", "computation_time.png"),
        ("mean_flowtime", "mean flowtime (solved)", "flowtime.png"),
    ]:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for solver in solvers:
            pts = sorted(
                (row["agents"], row[metric])
                for row in summary
                if row["solver"] == solver and row[metric] is not None
            )
            if pts:
                ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=solver)
        ax.set_xlabel("number of agents")
        ax.set_ylabel(ylabel)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = os.path.join(out_dir, fname)
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def expand_instance_args(args: Sequence[str]) -> List[str]:
    paths = []
    for arg in args:
        if os.path.isdir(arg):
            paths.extend(sorted(glob.glob(os.path.join(arg, "*.txt"))))
        else:
            paths.extend(sorted(glob.glob(arg)) or [arg])
    return paths


def solve_suite(
    instance_paths: Sequence[str],
    solver: str,
    w: float,
    timeout: float,
    phi_endpoint: Optional[str] = None,
    tree_dir: Optional[str] = None,
) -> List[RunRecord]:
    records = []
    if tree_dir:
        os.makedirs(tree_dir, exist_ok=True)
    for path in instance_paths:
        iid = os.path.splitext(os.path.basename(path))[0]
        inst = read_instance(path)
        record, res = run_solver(
            inst, iid, solver, w, timeout, phi_endpoint, log_tree=tree_dir is not None
        )
        records.append(record)
        if tree_dir and res.tree_log is not None:
            with open(os.path.join(tree_dir, f"{iid}.tree.jsonl"), "w") as f:
                f.write(json.dumps({"instance": iid, "solved_id": res.solved_node_id}) + "\n")
                for rec in res.tree_log:
                    f.write(json.dumps(rec) + "\n")
    return records
