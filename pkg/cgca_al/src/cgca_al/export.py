"""Prior exchange: write the model's per-line probabilities in the
diagnosis toolkit's prior file schema
``{area_id, edges: [line ids in E_H order], y: [floats in [0, 1]]}``."""

from __future__ import annotations

import json

import numpy as np

from .data import DataError, GraphSpec, scenario_features
from .model import CgcaAl
from .train import predict


def prior_document(spec: GraphSpec, y: np.ndarray) -> dict:
    y = np.asarray(y, dtype=float)
    if y.shape != (len(spec.line_ids_H),):
        raise DataError(
            f"prior has {y.shape} entries for {len(spec.line_ids_H)} lines")
    y = np.clip(y, 0.0, 1.0)
    return {
        "area_id": spec.area_id(),
        "edges": list(spec.line_ids_H),
        "y": [float(v) for v in y],
    }


def export_prior(path, spec: GraphSpec, y: np.ndarray) -> None:
    with open(path, "w") as fh:
        json.dump(prior_document(spec, y), fh, indent=1)


def prior_for_scenario(model: CgcaAl, spec: GraphSpec, record: dict
                       ) -> np.ndarray:
    """Per-line attack probabilities for one scenario record."""
    import torch
    feats = torch.from_numpy(scenario_features(record, spec)).unsqueeze(0)
    return predict(model, feats)[0]


def load_prior(path, spec: GraphSpec) -> np.ndarray:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("area_id") != spec.area_id():
        raise DataError("prior file belongs to a different area")
    if list(doc.get("edges", [])) != list(spec.line_ids_H):
        raise DataError("prior file edge order mismatch")
    y = np.asarray(doc["y"], dtype=float)
    if y.shape != (len(spec.line_ids_H),):
        raise DataError("prior dimension mismatch")
    return y
