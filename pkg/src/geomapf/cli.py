"""Command line front end: `geomapf gen|solve|report|dataset`."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import bench


class _Parser(argparse.ArgumentParser):
    # exit code contract: 0 ok, 1 usage, 2 run failures
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="geomapf")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance suite")
    gen.add_argument("--kind", choices=["maze", "box"], required=True)
    gen.add_argument("--count", type=int, default=10)
    gen.add_argument("--agents", type=int, default=2)
    gen.add_argument("--vertices", type=int, default=100)
    gen.add_argument("--knn", type=int, default=8)
    gen.add_argument("--radius", type=float, default=0.05)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--maze-cells", type=int, default=4)
    gen.add_argument("--box-count", type=int, default=8)
    gen.add_argument("--out", required=True)

    solve = sub.add_parser("solve", help="run a solver over instances")
    solve.add_argument("instances", nargs="+", help="instance files, globs, or directories")
    solve.add_argument("--solver", choices=["cbs", "focal", "focal-phi"], required=True)
    solve.add_argument("--w", type=float, default=1.1, help="suboptimality factor (inf allowed)")
    solve.add_argument("--timeout", type=float, default=300.0)
    solve.add_argument("--phi-endpoint", default=None, help="host:port of the phi evaluator")
    solve.add_argument("--log-tree", default=None, help="directory for search tree logs")
    solve.add_argument("--out", required=True, help="run record CSV")
    solve.add_argument("--serial", action="store_true",
                       help="no-op marker for timing-sensitive single-process runs")

    report = sub.add_parser("report", help="metrics and figures from run records")
    report.add_argument("runs", nargs="+", help="run record CSV files")
    report.add_argument("--timeout", type=float, default=300.0,
                        help="timeout used when averaging failed runs")
    report.add_argument("--out", required=True, help="output directory")
    report.add_argument("--no-figures", action="store_true")

    dataset = sub.add_parser("dataset", help="extract training samples from CBS tree logs")
    dataset.add_argument("--trees", required=True, help="directory of *.tree.jsonl logs")
    dataset.add_argument("--instances", required=True, help="directory of instance files")
    dataset.add_argument("--out", required=True, help="dataset output directory")
    return parser


def _cmd_gen(args) -> int:
    written, failures = bench.generate_suite(
        args.out, args.kind, args.count, args.agents, args.vertices, args.knn,
        args.radius, args.seed, maze_cells=args.maze_cells, box_count=args.box_count,
    )
    print(f"wrote {len(written)} instances to {args.out}")
    for msg in failures:
        print(f"FAILED {msg}", file=sys.stderr)
    return 2 if failures else 0


def _cmd_solve(args) -> int:
    paths = bench.expand_instance_args(args.instances)
    if not paths:
        print("no instances matched", file=sys.stderr)
        return 1
    records = bench.solve_suite(
        paths, args.solver, args.w, args.timeout, args.phi_endpoint, args.log_tree
    )
    bench.write_runs(records, args.out)
    failures = [r for r in records if r.outcome not in ("solved",)]
    for rec in records:
        ft = rec.flowtime if rec.flowtime is not None else "-"
        print(f"{rec.instance}: {rec.outcome} flowtime={ft} time={rec.wall_time_s:.2f}s")
    return 2 if failures else 0


def _cmd_report(args) -> int:
    records = bench.read_runs(args.runs)
    written = bench.write_report(
        records, args.out, args.timeout, make_figures=not args.no_figures
    )
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_dataset(args) -> int:
    import glob
    import json
    import os

    from . import datagen
    from .envgen import read_instance

    samples = []
    instances = {}
    n_failed = 0
    for path in sorted(glob.glob(os.path.join(args.trees, "*.tree.jsonl"))):
        with open(path) as f:
            header = json.loads(f.readline())
            log = [json.loads(line) for line in f if line.strip()]
        iid = header["instance"]
        solved_id = header["solved_id"]
        if solved_id is None:
            n_failed += 1
            continue
        instances[iid] = read_instance(os.path.join(args.instances, f"{iid}.txt"))
        samples.extend(datagen.label_tree(log, solved_id, iid))
    datagen.export_dataset(samples, instances, args.out)
    print(f"exported {len(samples)} samples from {len(instances)} instances "
          f"({n_failed} failed runs skipped) to {args.out}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "solve": _cmd_solve,
        "report": _cmd_report,
        "dataset": _cmd_dataset,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
