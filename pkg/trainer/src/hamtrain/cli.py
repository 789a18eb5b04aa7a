"""Command-line front end: train / predict / parity."""

from __future__ import annotations

import argparse
import json
import sys


def _build_parser():
    p = argparse.ArgumentParser(prog="hamtrain", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("train", help="train the encoder-decoder model")
    s.add_argument("--dataset", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--epochs", type=int, default=50)
    s.add_argument("--lr", type=float, default=1e-4)
    s.add_argument("--batch-size", type=int, default=32)
    s.add_argument("--hidden", type=int, default=128)
    s.add_argument("--embed", type=int, default=64)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--limit", type=int)
    s.add_argument("--resume")

    s = sub.add_parser("predict", help="greedy-decode a split to JSONL")
    s.add_argument("--checkpoint", required=True)
    s.add_argument("--dataset", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--split", default="test", choices=["train", "test"])
    s.add_argument("--limit", type=int)

    s = sub.add_parser("parity", help="compare distances with hamflow dist")
    s.add_argument("--dataset", required=True)
    s.add_argument("--pairs", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "train":
        from .train import TrainConfig, train
        log = train(TrainConfig(
            dataset_dir=args.dataset, out_dir=args.out, epochs=args.epochs,
            learning_rate=args.lr, batch_size=args.batch_size,
            hidden=args.hidden, embed=args.embed, seed=args.seed,
            limit=args.limit, resume=args.resume))
        print(json.dumps({"epochs": len(log),
                          "final_loss": log[-1]["eval_loss"] if log else None}))
        return 0
    if args.command == "predict":
        from .predict import predict
        print(json.dumps(predict(args.checkpoint, args.dataset, args.out,
                                 split=args.split, limit=args.limit)))
        return 0
    from .parity import metric_parity
    report = metric_parity(args.dataset, n_pairs=args.pairs, seed=args.seed)
    print(json.dumps(report))
    return 0 if report["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
