"""Contrastive training samples from recorded CBS search trees.

Positives are the nodes on the root-to-solution chain; negatives are their
siblings that are not themselves on the chain. Failed runs yield nothing.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .envgen import Instance, read_instance, write_instance

DATASET_HEADER = "geo-mapf-ds v1"


class DatasetError(ValueError):
    pass


@dataclass
class Sample:
    instance_id: str
    solution: List[List[int]]
    depth: int
    label: str  # "positive" | "negative"


def label_tree(tree_log: Sequence[dict], solved_id: Optional[int], instance_id: str) -> List[Sample]:
    """Label nodes of one recorded CBS run; empty list for failed runs."""
    if solved_id is None:
        return []
    nodes = {rec["id"]: rec for rec in tree_log}
    if solved_id not in nodes:
        raise DatasetError(f"solved node {solved_id} not present in tree log")
    chain = []
    nid: Optional[int] = solved_id
    while nid is not None:
        rec = nodes.get(nid)
        if rec is None:
            raise DatasetError(f"dangling parent id {nid} in tree log")
        chain.append(rec)
        nid = rec["parent"]
    chain_ids = {rec["id"] for rec in chain}
    samples = [
        Sample(instance_id, rec["solution"], rec["depth"], "positive") for rec in reversed(chain)
    ]
    for rec in tree_log:
        if rec["id"] in chain_ids or rec["parent"] is None:
            continue
        if rec["parent"] in chain_ids:
            samples.append(Sample(instance_id, rec["solution"], rec["depth"], "negative"))
    return samples


def valid_pair(pos: Sample, neg: Sample) -> bool:
    """A (positive, negative) pair is trainable iff both come from the same
    instance and the positive is at least as deep."""
    assert pos.label == "positive" and neg.label == "negative"
    return pos.instance_id == neg.instance_id and pos.depth >= neg.depth


def export_dataset(
    samples: Sequence[Sample], instances: Dict[str, Instance], out_dir: str
) -> None:
    """Dataset layout: <out_dir>/instances/<id>.txt plus
    <out_dir>/samples/<id>.jsonl (header line, then one record per line)."""
    inst_dir = os.path.join(out_dir, "instances")
    samp_dir = os.path.join(out_dir, "samples")
    os.makedirs(inst_dir, exist_ok=True)
    os.makedirs(samp_dir, exist_ok=True)
    by_instance: Dict[str, List[Sample]] = {}
    for s in samples:
        if s.instance_id not in instances:
            raise DatasetError(f"sample references unknown instance {s.instance_id!r}")
        by_instance.setdefault(s.instance_id, []).append(s)
    for iid, inst in instances.items():
        write_instance(inst, os.path.join(inst_dir, f"{iid}.txt"))
        with open(os.path.join(samp_dir, f"{iid}.jsonl"), "w") as f:
            f.write(DATASET_HEADER + "\n")
            for s in by_instance.get(iid, []):
                f.write(
                    json.dumps({"solution": s.solution, "depth": s.depth, "label": s.label}) + "\n"
                )


def import_dataset(path: str) -> Tuple[Dict[str, Instance], List[Sample]]:
    inst_dir = os.path.join(path, "instances")
    samp_dir = os.path.join(path, "samples")
    if not os.path.isdir(inst_dir) or not os.path.isdir(samp_dir):
        raise DatasetError(f"{path}: not a dataset directory (missing instances/ or samples/)")
    instances: Dict[str, Instance] = {}
    for name in sorted(os.listdir(inst_dir)):
        if name.endswith(".txt"):
            instances[name[:-4]] = read_instance(os.path.join(inst_dir, name))
    samples: List[Sample] = []
    for name in sorted(os.listdir(samp_dir)):
        if not name.endswith(".jsonl"):
            continue
        iid = name[:-6]
        if iid not in instances:
            raise DatasetError(f"{name}: sample file references missing instance {iid!r}")
        fpath = os.path.join(samp_dir, name)
        with open(fpath) as f:
            header = f.readline().rstrip("\n")
            if header != DATASET_HEADER:
                raise DatasetError(f"{fpath}:1: bad header {header!r}")
            for lineno, line in enumerate(f, start=2):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as e:
                    raise DatasetError(f"{fpath}:{lineno}: {e}") from e
                if rec.get("label") not in ("positive", "negative") or rec.get("depth", -1) < 0:
                    raise DatasetError(f"{fpath}:{lineno}: bad sample record")
                roadmap = instances[iid].roadmap
                for p in rec["solution"]:
                    for a, b in zip(p, p[1:]):
                        if (a, b) not in roadmap.edges:
                            raise DatasetError(
                                f"{fpath}:{lineno}: path uses missing edge ({a},{b})"
                            )
                samples.append(Sample(iid, rec["solution"], rec["depth"], rec["label"]))
    return instances, samples
