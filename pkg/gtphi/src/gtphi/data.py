"""Readers for the instance text format ("geo-mapf v1") and the sample
dataset layout ("geo-mapf-ds v1": instances/<id>.txt + samples/<id>.jsonl).

Parsing is independent of the planner package: these files are the interface.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass
from typing import Dict, List, Tuple

INSTANCE_HEADER = "geo-mapf v1"
DATASET_HEADER = "geo-mapf-ds v1"


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    positions: List[Tuple[float, float]]
    edges: List[Tuple[int, int]]  # sorted (src, dst), includes self-loops


@dataclass
class Sample:
    instance_id: str
    solution: List[List[int]]
    depth: int
    label: str  # "positive" | "negative"


def graph_from_payload(payload: dict) -> Graph:
    """Build a Graph from the wire-protocol graph object {"v": ..., "e": ...}."""
    try:
        positions = [(float(x), float(y)) for x, y in payload["v"]]
        edges = [(int(s), int(d)) for s, d in payload["e"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed graph payload: {exc}")
    n = len(positions)
    for s, d in edges:
        if not (0 <= s < n and 0 <= d < n):
            raise DataError(f"edge ({s}, {d}) references unknown vertex")
    return Graph(positions, sorted(edges))


def read_instance_graph(path: str) -> Graph:
    """Parse just the roadmap (V/E sections) out of an instance file."""
    with open(path) as f:
        lines = [ln.rstrip("\n") for ln in f if ln.strip()]
    it = iter(lines)

    def next_line(what):
        try:
            return next(it)
        except StopIteration:
            raise DataError(f"{path}: unexpected end of file, expected {what}")

    if next_line("header") != INSTANCE_HEADER:
        raise DataError(f"{path}: bad header, expected {INSTANCE_HEADER!r}")
    next_line("world")  # world kind
    next_line("bounds")
    n_rects = int(next_line("rects").split()[1])
    for _ in range(n_rects):
        next_line("rect")
    n_v = int(next_line("V").split()[1])
    positions: List[Tuple[float, float]] = [(0.0, 0.0)] * n_v
    for _ in range(n_v):
        i, x, y = next_line("vertex").split()
        positions[int(i)] = (float(x), float(y))
    n_e = int(next_line("E").split()[1])
    edges = []
    for _ in range(n_e):
        s, d = next_line("edge").split()
        edges.append((int(s), int(d)))
    return Graph(positions, sorted(edges))


def load_dataset(path: str) -> Tuple[Dict[str, Graph], List[Sample]]:
    inst_dir = os.path.join(path, "instances")
    samp_dir = os.path.join(path, "samples")
    if not os.path.isdir(inst_dir) or not os.path.isdir(samp_dir):
        raise DataError(f"{path}: not a dataset directory")
    graphs: Dict[str, Graph] = {}
    samples: List[Sample] = []
    for fname in sorted(os.listdir(samp_dir)):
        if not fname.endswith(".jsonl"):
            continue
        iid = fname[: -len(".jsonl")]
        inst_path = os.path.join(inst_dir, f"{iid}.txt")
        if not os.path.exists(inst_path):
            raise DataError(f"missing instance file for {iid!r}")
        graphs[iid] = read_instance_graph(inst_path)
        with open(os.path.join(samp_dir, fname)) as f:
            header = f.readline().rstrip("\n")
            if header != DATASET_HEADER:
                raise DataError(f"{fname}: bad header {header!r}")
            for lineno, line in enumerate(f, start=2):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    sample = Sample(iid, rec["solution"], int(rec["depth"]), rec["label"])
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise DataError(f"{fname}:{lineno}: {exc}")
                if sample.label not in ("positive", "negative"):
                    raise DataError(f"{fname}:{lineno}: bad label {sample.label!r}")
                n = len(graphs[iid].positions)
                if any(v < 0 or v >= n for p in sample.solution for v in p):
                    raise DataError(f"{fname}:{lineno}: solution references unknown vertex")
                samples.append(sample)
    return graphs, samples


def valid_pair(pos: Sample, neg: Sample) -> bool:
    """Trainable (positive, negative) pair: same instance, positive at least
    as deep as the negative."""
    return (
        pos.label == "positive"
        and neg.label == "negative"
        and pos.instance_id == neg.instance_id
        and pos.depth >= neg.depth
    )


def split_instances(instance_ids: List[str], holdout_frac: float, seed: int) -> Tuple[List[str], List[str]]:
    """Deterministic instance-level train/validation split."""
    ids = sorted(instance_ids)
    rng = random.Random(seed)
    rng.shuffle(ids)
    n_val = max(1, round(len(ids) * holdout_frac)) if len(ids) > 1 else 0
    return sorted(ids[n_val:]), sorted(ids[:n_val])
