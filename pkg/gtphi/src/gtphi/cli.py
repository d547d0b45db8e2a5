import argparse
import json
import sys


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def build_parser() -> _Parser:
    p = _Parser(prog="gtphi", description="Train and serve the solution scorer.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train on a dataset directory")
    t.add_argument("--data", required=True, help="dataset directory")
    t.add_argument("--out", required=True, help="checkpoint output path")
    t.add_argument("--epochs", type=int, default=100)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--lr", type=float, default=1e-3)
    t.add_argument("--width", type=int, default=64, help="token width (even)")
    t.add_argument("--metrics-out", help="optional JSON metrics log path")

    s = sub.add_parser("serve", help="serve a checkpoint over TCP")
    s.add_argument("--checkpoint", required=True)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=0, help="0 picks a free port")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "train":
        from .model import ModelConfig
        from .train import TrainingError, train

        config = ModelConfig(
            token_width=args.width, epochs=args.epochs, seed=args.seed, learning_rate=args.lr
        )
        try:
            metrics = train(args.data, config, args.out, log=print)
        except (TrainingError, OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        if args.metrics_out:
            with open(args.metrics_out, "w") as f:
                json.dump(metrics, f, indent=2)
        acc = metrics["best_val_accuracy"]
        print(f"best validation accuracy: {'n/a' if acc is None else f'{acc:.3f}'}")
        return 0
    if args.command == "serve":
        from .server import serve

        try:
            serve(args.checkpoint, args.host, args.port)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        return 0
    return 1


if __name__ == "__main__":
    sys.exit(main())
