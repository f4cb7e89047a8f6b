"""Command-line front end: train a model on a scenario dataset and export
per-scenario priors for the diagnosis toolkit."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .data import DataError, load_dataset, load_graph_spec, read_shard
from .export import export_prior, prior_for_scenario
from .model import CgcaAl, ModelConfig, load_checkpoint, save_checkpoint
from .train import TrainConfig, evaluate_f1, train


def cmd_train(args) -> int:
    spec = load_graph_spec(args.grid, args.area)
    train_set, test_sets = load_dataset(args.dataset, spec)
    model = CgcaAl(spec, ModelConfig())
    config = TrainConfig(batch_size=args.batch_size, seed=args.seed,
                         max_epochs=args.max_epochs, patience=args.patience)
    result = train(model, train_set, config)
    print(f"stopped after {result.epochs_run} epochs "
          f"(best epoch {result.best_epoch}, val F1 {result.best_val_f1:.4f})")
    per_f = {nf: evaluate_f1(model, batch) for nf, batch in sorted(test_sets.items())}
    for nf, f1 in per_f.items():
        print(f"test |F|={nf}: F1 {f1:.4f}")
    save_checkpoint(args.output, model, spec,
                    extra={"val_f1": result.best_val_f1,
                           "test_f1": {str(k): v for k, v in per_f.items()}})
    print(f"wrote {args.output}")
    return 0


def cmd_export(args) -> int:
    model, spec, _ = load_checkpoint(args.checkpoint)
    with open(args.scenario) as fh:
        record = json.load(fh)
    y = prior_for_scenario(model, spec, record)
    export_prior(args.output, spec, y)
    print(f"wrote {args.output}: y = {[round(float(v), 4) for v in y]}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cgca-al", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train on a scenario dataset")
    p.add_argument("--grid", required=True, help="canonical grid JSON")
    p.add_argument("--area", required=True, help="area description JSON")
    p.add_argument("--dataset", required=True, help="dataset directory")
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--max-epochs", type=int, default=300)
    p.add_argument("--patience", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="checkpoint path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("export", help="emit a prior file for one scenario")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--scenario", required=True, help="scenario JSON record")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_export)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
