"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 certification/assumption
failure, 3 prior or data mismatch, 4 solver failure.  The environment
variable ``PCPA_SEED`` overrides any ``--seed`` flag.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import caseparser, grid as gridmod
from .areas import AreaError, dbgs, find_area_with_line_count, load_area, save_area
from .attack import scenario_from_dict
from .dataset import DatasetConfig, DatasetError, generate_dataset, run_experiment
from .diagnosis import (DiagnosisError, PriorMismatchError, diagnose,
                        load_prior, oracle_prior, result_to_dict,
                        uniform_prior)
from .grid import GridError, build_admittance, build_incidence, partition
from .lp import LPError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CERTIFICATION = 2
EXIT_MISMATCH = 3
EXIT_SOLVER = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_grid(spec: str):
    try:
        if spec in ("ieee30", "ieee118") or spec.endswith(".m"):
            return caseparser.load_case(spec)
        return gridmod.load_grid(spec)
    except (GridError, OSError) as exc:
        raise CliError(EXIT_CONFIG, f"cannot load grid {spec!r}: {exc}")


def _seed(args) -> int:
    env = os.environ.get("PCPA_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(EXIT_CONFIG, f"PCPA_SEED={env!r} is not an integer")
    return args.seed


def _resolve_prior(spec: str, area, scenario=None):
    if spec == "uniform":
        return uniform_prior(area)
    if spec == "oracle":
        if scenario is None:
            raise CliError(EXIT_CONFIG, "oracle prior needs scenario truth")
        return oracle_prior(area, scenario.attack.line_ids_F)
    if spec.startswith("file:"):
        try:
            return load_prior(spec[5:], area)
        except PriorMismatchError as exc:
            raise CliError(EXIT_MISMATCH, str(exc))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise CliError(EXIT_MISMATCH, f"cannot read prior file: {exc}")
    raise CliError(EXIT_CONFIG, f"unknown prior source {spec!r}")


def cmd_convert_case(args) -> int:
    grid, p, loads = _load_grid(args.grid)
    gridmod.save_grid(args.output, grid, p, loads)
    print(f"wrote {args.output}: {grid.n_buses} buses, {grid.n_lines} lines")
    return EXIT_OK


def cmd_area(args) -> int:
    grid, _, _ = _load_grid(args.grid)
    try:
        if args.lines is not None:
            area = find_area_with_line_count(grid, args.size, args.lines)
        else:
            area = dbgs(grid, args.size, rng_seed=_seed(args),
                        max_retries=args.retries)
    except AreaError as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    save_area(args.output, area)
    print(f"wrote {args.output}: |V_H|={area.size}, "
          f"|E_H|={len(area.line_ids_H)}, certified={area.certified}")
    return EXIT_OK


def cmd_dataset(args) -> int:
    grid, p, loads = _load_grid(args.grid)
    area = load_area(args.area)
    if args.train <= 0 or args.test <= 0:
        raise CliError(EXIT_CONFIG, "--train and --test must be positive")
    attack_types = tuple(args.attacks.split(","))
    for kind in attack_types:
        if kind not in ("alter", "cut", "sever", "mixed"):
            raise CliError(EXIT_CONFIG, f"unknown attack type {kind!r}")
    config = DatasetConfig(train_per_type=args.train,
                           test_per_cardinality=args.test,
                           attack_types=attack_types,
                           load_sigma=args.load_sigma)
    try:
        manifest = generate_dataset(grid, area, p, loads, args.output,
                                    seed=_seed(args), config=config)
    except DatasetError as exc:
        raise CliError(EXIT_CONFIG, str(exc))
    print(f"wrote {len(manifest['shards'])} shards to {args.output}")
    return EXIT_OK


def cmd_diagnose(args) -> int:
    grid, _, _ = _load_grid(args.grid)
    area = load_area(args.area)
    with open(args.scenario) as fh:
        scn = scenario_from_dict(json.load(fh), area)
    prior = _resolve_prior(args.prior, area, scn)
    D = build_incidence(grid)
    A = build_admittance(D, grid.reactances())
    view = partition(grid, A, D, area.bus_ids_H)
    try:
        res = diagnose(grid, view, area, scn.measurements(grid), prior)
    except (DiagnosisError, LPError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if res.status != "optimal":
        print(f"solver failure: status {res.status}", file=sys.stderr)
        return EXIT_SOLVER
    doc = result_to_dict(res)
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(doc, fh, indent=1)
    print(json.dumps({"status": res.status, "objective": res.objective,
                      "x_H": doc["x_H"]}))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    grid, _, _ = _load_grid(args.grid)
    area = load_area(args.area)
    if args.prior.startswith("file:"):
        prior = _resolve_prior(args.prior, area)
    else:
        prior = args.prior
        if prior not in ("uniform", "oracle"):
            raise CliError(EXIT_CONFIG, f"unknown prior source {prior!r}")
    try:
        result = run_experiment(grid, area, args.dataset, prior,
                                out_dir=args.output)
    except DatasetError as exc:
        raise CliError(EXIT_CONFIG, str(exc))
    except (DiagnosisError, LPError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    for nf in sorted(result["by_cardinality"], key=int):
        row = result["by_cardinality"][nf]
        print(f"|F|={nf}: error {row['error_mean']:.4f} "
              f"± {row['error_std']:.4f}, F1 {row['f1_mean']:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pcpa", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert-case",
                       help="convert MATPOWER-style case text to the "
                            "canonical JSON grid file")
    p.add_argument("--grid", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_convert_case)

    p = sub.add_parser("area", help="build a certified attacked area")
    p.add_argument("--grid", required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--retries", type=int, default=50)
    p.add_argument("--lines", type=int, default=None,
                   help="require a specific |E_H| (scans seeds)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_area)

    p = sub.add_parser("dataset", help="generate train/test scenario shards")
    p.add_argument("--grid", required=True)
    p.add_argument("--area", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train", type=int, default=500)
    p.add_argument("--test", type=int, default=200)
    p.add_argument("--attacks", default="alter,cut",
                   help="comma-separated training attack types")
    p.add_argument("--load-sigma", type=float, default=0.2)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("diagnose", help="diagnose one scenario file")
    p.add_argument("--grid", required=True)
    p.add_argument("--area", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--prior", default="uniform",
                   help="uniform | oracle | file:PATH")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("evaluate", help="run diagnosis over a test dataset")
    p.add_argument("--grid", required=True)
    p.add_argument("--area", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--prior", default="uniform")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_evaluate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (GridError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
