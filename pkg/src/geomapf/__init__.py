"""Bounded-suboptimal conflict-based search for MAPF on random geometric
roadmaps, with a pluggable (optionally learned) focal heuristic."""

from .envgen import Instance, Roadmap, WorldSpec, make_instance, read_instance, write_instance
from .highlevel import (
    cbs_solve,
    count_conflicts,
    detect_first_conflict,
    focal_solve,
    psi_conflict_count,
    psi_cost,
    psi_depth_phi,
    validate_solution,
)

__all__ = [
    "Instance",
    "Roadmap",
    "WorldSpec",
    "make_instance",
    "read_instance",
    "write_instance",
    "cbs_solve",
    "focal_solve",
    "detect_first_conflict",
    "count_conflicts",
    "psi_conflict_count",
    "psi_cost",
    "psi_depth_phi",
    "validate_solution",
]

__version__ = "0.1.0"
