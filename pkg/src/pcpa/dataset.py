"""Dataset generation and experiment tables.

Datasets are newline-delimited JSON records (one scenario each) plus a
manifest with checksums; experiment runs aggregate per-cardinality
mean/std of the diagnosis metrics into CSV and JSON tables.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass

import numpy as np

from .areas import AttackedArea
from .attack import (AttackScenario, RebalanceError, sample_attack,
                     sample_loads, scenario_from_dict, scenario_to_dict,
                     simulate)
from .diagnosis import (DiagnosisError, PriorVector, diagnose, oracle_prior,
                        uniform_prior)
from .dcflow import PowerFlowError
from .grid import GridTopology, build_admittance, build_incidence, partition
from .metrics import classification_metrics, labels_from_x, normalized_error

TRAIN_SAMPLES_PER_TYPE = 500
TEST_SAMPLES_PER_CARDINALITY = 200


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetConfig:
    train_per_type: int = TRAIN_SAMPLES_PER_TYPE
    test_per_cardinality: int = TEST_SAMPLES_PER_CARDINALITY
    attack_types: tuple[str, ...] = ("alter", "cut")
    test_kind: str = "mixed"
    load_sigma: float = 0.2


def _generate_batch(grid: GridTopology, area: AttackedArea,
                    base_p: np.ndarray, base_loads: np.ndarray,
                    count: int, kind: str, n_attacked,
                    rng: np.random.Generator, load_sigma: float
                    ) -> list[AttackScenario]:
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 50 * count:
            raise DatasetError("too many rejected scenarios; check the area")
        p, loads = sample_loads(base_p, base_loads, rng, sigma=load_sigma)
        nf = n_attacked if n_attacked else int(
            rng.integers(1, len(area.line_ids_H) + 1))
        attack = sample_attack(area, nf, kind, rng)
        try:
            out.append(simulate(grid, area, attack, p, loads))
        except (RebalanceError, PowerFlowError):
            continue  # infeasible shedding: resample
    return out


def _write_shard(path, scenarios, grid: GridTopology) -> str:
    with open(path, "w") as fh:
        for scn in scenarios:
            fh.write(json.dumps(scenario_to_dict(scn, grid)) + "\n")
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def generate_dataset(grid: GridTopology, area: AttackedArea,
                     base_p: np.ndarray, base_loads: np.ndarray,
                     out_dir: str, seed: int,
                     config: DatasetConfig = DatasetConfig()) -> dict:
    """Write train shards (per attack type) and test shards (per |F|)."""
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(seed)
    manifest = {
        "seed": seed,
        "area": {"bus_ids_H": list(area.bus_ids_H),
                 "line_ids_H": list(area.line_ids_H)},
        "config": {
            "train_per_type": config.train_per_type,
            "test_per_cardinality": config.test_per_cardinality,
            "attack_types": list(config.attack_types),
            "test_kind": config.test_kind,
            "load_sigma": config.load_sigma,
        },
        "shards": {},
    }
    for kind in config.attack_types:
        scns = _generate_batch(grid, area, base_p, base_loads,
                               config.train_per_type, kind, None, rng,
                               config.load_sigma)
        name = f"train_{kind}.ndjson"
        digest = _write_shard(os.path.join(out_dir, name), scns, grid)
        manifest["shards"][name] = {
            "count": len(scns), "sha256": digest, "role": "train",
            "kind": kind,
        }
    for nf in range(1, len(area.line_ids_H) + 1):
        scns = _generate_batch(grid, area, base_p, base_loads,
                               config.test_per_cardinality, config.test_kind,
                               nf, rng, config.load_sigma)
        name = f"test_F{nf}.ndjson"
        digest = _write_shard(os.path.join(out_dir, name), scns, grid)
        manifest["shards"][name] = {
            "count": len(scns), "sha256": digest, "role": "test",
            "n_attacked": nf,
        }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
    return manifest


def read_shard(path, area: AttackedArea) -> list[AttackScenario]:
    scns = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                scns.append(scenario_from_dict(json.loads(line), area))
    return scns


@dataclass(frozen=True)
class EvaluationRecord:
    n_attacked: int
    labels_true: np.ndarray
    labels_pred: np.ndarray
    x_true: np.ndarray
    x_hat: np.ndarray
    error: float
    tp: int
    fp: int
    tn: int
    fn: int


def evaluate_scenario(grid: GridTopology, area: AttackedArea,
                      scn: AttackScenario, prior: PriorVector
                      ) -> EvaluationRecord:
    D = build_incidence(grid)
    A = build_admittance(D, grid.reactances())
    view = partition(grid, A, D, area.bus_ids_H)
    res = diagnose(grid, view, area, scn.measurements(grid), prior)
    if res.status != "optimal":
        raise DiagnosisError(f"diagnosis failed with status {res.status}")
    fset = set(scn.attack.line_ids_F)
    labels_true = np.array([1 if lid in fset else 0
                            for lid in area.line_ids_H])
    labels_pred = labels_from_x(res.x_H)
    cm = classification_metrics(labels_pred, labels_true)
    return EvaluationRecord(
        n_attacked=len(fset),
        labels_true=labels_true,
        labels_pred=labels_pred,
        x_true=scn.attack.x_H,
        x_hat=res.x_H,
        error=normalized_error(res.x_H, scn.attack.x_H),
        tp=cm.tp, fp=cm.fp, tn=cm.tn, fn=cm.fn,
    )


def _prior_for(area: AttackedArea, scn: AttackScenario, source,
               index: int) -> PriorVector:
    if isinstance(source, PriorVector):
        return source
    if source == "uniform":
        return uniform_prior(area)
    if source == "oracle":
        return oracle_prior(area, scn.attack.line_ids_F)
    if isinstance(source, (list, tuple)):
        return source[index]
    raise DiagnosisError(f"unknown prior source {source!r}")


def run_experiment(grid: GridTopology, area: AttackedArea, dataset_dir: str,
                   prior_source, out_dir: str | None = None) -> dict:
    """Diagnose every test record; aggregate per-|F| mean/std metric tables.

    ``prior_source`` is 'uniform', 'oracle', a PriorVector applied to all
    records, or a dict shard-name -> list of PriorVector per record.
    """
    manifest_path = os.path.join(dataset_dir, "manifest.json")
    if not os.path.exists(manifest_path):
        raise DatasetError(f"no manifest in {dataset_dir}")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    shards = {name: info for name, info in manifest["shards"].items()
              if info["role"] == "test"}
    if not shards:
        raise DatasetError("dataset has no test shards")

    table: dict[int, dict] = {}
    for name in sorted(shards, key=lambda n: shards[n]["n_attacked"]):
        scns = read_shard(os.path.join(dataset_dir, name), area)
        source = (prior_source[name] if isinstance(prior_source, dict)
                  else prior_source)
        records = [
            evaluate_scenario(grid, area, scn,
                              _prior_for(area, scn, source, i))
            for i, scn in enumerate(scns)
        ]
        errors = np.array([r.error for r in records])
        accs, fars, mdrs, f1s = [], [], [], []
        for r in records:
            cm = classification_metrics(r.labels_pred, r.labels_true)
            accs.append(cm.accuracy)
            fars.append(cm.far)
            mdrs.append(cm.mdr)
            f1s.append(cm.f1)
        table[shards[name]["n_attacked"]] = {
            "count": len(records),
            "error_mean": float(errors.mean()),
            "error_std": float(errors.std()),
            "accuracy_mean": float(np.mean(accs)),
            "far_mean": float(np.mean(fars)),
            "mdr_mean": float(np.mean(mdrs)),
            "f1_mean": float(np.mean(f1s)),
        }
    result = {"prior": getattr(prior_source, "provenance", str(prior_source))
              if not isinstance(prior_source, dict) else "per-shard",
              "by_cardinality": table}
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "metrics.json"), "w") as fh:
            json.dump(result, fh, indent=1, sort_keys=True)
        with open(os.path.join(out_dir, "metrics.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n_attacked", "count", "error_mean", "error_std",
                        "accuracy_mean", "far_mean", "mdr_mean", "f1_mean"])
            for nf in sorted(table):
                row = table[nf]
                w.writerow([nf, row["count"], row["error_mean"],
                            row["error_std"], row["accuracy_mean"],
                            row["far_mean"], row["mdr_mean"], row["f1_mean"]])
    return result
