"""Loading of the toolkit's file formats into training tensors.

This package talks to the diagnosis toolkit only through its documented
files: the canonical grid JSON, the area description JSON, the NDJSON
scenario shards with their manifest, and the prior exchange JSON it emits
back.  Nothing here imports the toolkit.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

import numpy as np
import torch


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class GraphSpec:
    """Static description of one (grid, attacked area) configuration."""
    bus_ids: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]   # (line id, from bus, to bus)
    bus_ids_H: tuple[int, ...]
    line_ids_H: tuple[int, ...]

    @property
    def n_buses(self) -> int:
        return len(self.bus_ids)

    def bus_index(self, bus_id: int) -> int:
        return self.bus_ids.index(bus_id)

    def adjacency(self) -> torch.Tensor:
        """Dense (N, N) adjacency with self-loops, float {0,1}."""
        n = self.n_buses
        idx = {b: i for i, b in enumerate(self.bus_ids)}
        A = torch.eye(n)
        for _, u, v in self.edges:
            A[idx[u], idx[v]] = 1.0
            A[idx[v], idx[u]] = 1.0
        return A

    def h_indices(self) -> torch.Tensor:
        idx = {b: i for i, b in enumerate(self.bus_ids)}
        return torch.tensor([idx[b] for b in self.bus_ids_H], dtype=torch.long)

    def edge_endpoint_indices(self) -> torch.Tensor:
        """(|E_H|, 2) endpoint positions for each attacked-area line, in
        the area's canonical line order."""
        idx = {b: i for i, b in enumerate(self.bus_ids)}
        by_id = {lid: (u, v) for lid, u, v in self.edges}
        rows = []
        for lid in self.line_ids_H:
            if lid not in by_id:
                raise DataError(f"area line {lid} not present in grid")
            u, v = by_id[lid]
            rows.append((idx[u], idx[v]))
        return torch.tensor(rows, dtype=torch.long)

    def area_id(self) -> str:
        payload = json.dumps([list(self.bus_ids_H), list(self.line_ids_H)])
        return hashlib.sha1(payload.encode()).hexdigest()[:12]


def load_graph_spec(grid_path: str, area_path: str) -> GraphSpec:
    with open(grid_path) as fh:
        grid_doc = json.load(fh)
    with open(area_path) as fh:
        area_doc = json.load(fh)
    try:
        bus_ids = tuple(int(b["id"]) for b in grid_doc["buses"])
        edges = tuple((int(l["id"]), int(l["from"]), int(l["to"]))
                      for l in grid_doc["lines"])
        bus_ids_H = tuple(area_doc["bus_ids_H"])
        line_ids_H = tuple(area_doc["line_ids_H"])
    except (KeyError, TypeError) as exc:
        raise DataError(f"malformed grid or area document: {exc}") from exc
    unknown = set(bus_ids_H) - set(bus_ids)
    if unknown:
        raise DataError(f"area buses {sorted(unknown)} not in grid")
    return GraphSpec(bus_ids, edges, bus_ids_H, line_ids_H)


N_FEATURES = 6


def scenario_features(rec: dict, spec: GraphSpec) -> np.ndarray:
    """Per-bus feature rows for one scenario record.

    Six channels: pre-attack angle, injection and load, post-attack angle
    and injection, and the blinding mask (1 = attacked area, measurements
    reconstructed rather than observed).  Post-attack angles inside the
    area are recoverable exactly from the healthy measurements, so the
    record's truth values are legitimate model inputs.
    """
    n = spec.n_buses
    theta = np.asarray(rec["theta"], dtype=np.float32)
    p = np.asarray(rec["p"], dtype=np.float32)
    loads = np.asarray(rec["loads"], dtype=np.float32)
    theta_post = np.asarray(rec["theta_post"], dtype=np.float32)
    p_post = np.asarray(rec["p_post"], dtype=np.float32)
    if not all(a.shape == (n,) for a in (theta, p, loads, theta_post, p_post)):
        raise DataError("record fields do not match the grid size")
    mask = np.zeros(n, dtype=np.float32)
    h_set = set(spec.bus_ids_H)
    for i, b in enumerate(spec.bus_ids):
        if b in h_set:
            mask[i] = 1.0
    feats = np.stack([theta, p, loads, theta_post, p_post, mask], axis=1)
    if not np.all(np.isfinite(feats)):
        raise DataError("non-finite feature value")
    return feats


@dataclass(frozen=True)
class ScenarioBatch:
    features: torch.Tensor    # (B, N, F)
    labels: torch.Tensor      # (B, |E_H|)
    n_attacked: torch.Tensor  # (B,)


def read_shard(path: str, spec: GraphSpec) -> ScenarioBatch:
    feats, labels, nf = [], [], []
    m = len(spec.line_ids_H)
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            if tuple(rec["area"]["line_ids_H"]) != spec.line_ids_H:
                raise DataError(f"shard {path} was generated for another area")
            lab = np.asarray(rec["labels"], dtype=np.float32)
            if lab.shape != (m,):
                raise DataError("label dimension mismatch")
            feats.append(scenario_features(rec, spec))
            labels.append(lab)
            nf.append(int(lab.sum()))
    if not feats:
        raise DataError(f"shard {path} is empty")
    return ScenarioBatch(
        features=torch.from_numpy(np.stack(feats)),
        labels=torch.from_numpy(np.stack(labels)),
        n_attacked=torch.tensor(nf, dtype=torch.long),
    )


def load_dataset(dataset_dir: str, spec: GraphSpec
                 ) -> tuple[ScenarioBatch, dict[int, ScenarioBatch]]:
    """Training batch (all train shards pooled) and test batches keyed by
    attack cardinality, as laid out by the dataset manifest."""
    manifest_path = os.path.join(dataset_dir, "manifest.json")
    if not os.path.exists(manifest_path):
        raise DataError(f"no manifest in {dataset_dir}")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    train_parts, test = [], {}
    for name, info in sorted(manifest["shards"].items()):
        shard = read_shard(os.path.join(dataset_dir, name), spec)
        if info["role"] == "train":
            train_parts.append(shard)
        else:
            test[int(info["n_attacked"])] = shard
    if not train_parts:
        raise DataError("dataset has no train shards")
    train = ScenarioBatch(
        features=torch.cat([s.features for s in train_parts]),
        labels=torch.cat([s.labels for s in train_parts]),
        n_attacked=torch.cat([s.n_attacked for s in train_parts]),
    )
    return train, test


def normalization_stats(batch: ScenarioBatch) -> tuple[torch.Tensor, torch.Tensor]:
    """Per-channel mean/std over buses and samples (mask channel untouched)."""
    flat = batch.features.reshape(-1, batch.features.shape[-1])
    mean = flat.mean(dim=0)
    std = flat.std(dim=0).clamp_min(1e-6)
    mean[-1] = 0.0
    std[-1] = 1.0
    return mean, std
