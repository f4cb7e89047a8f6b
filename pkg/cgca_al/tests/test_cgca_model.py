import json

import numpy as np
import pytest
import torch

import cgca_al as c
from cgca_al.data import DataError


class TestGraphSpec:
    def test_dimensions(self, spec):
        assert spec.n_buses == 30
        assert len(spec.edges) == 41
        assert len(spec.line_ids_H) == 8
        assert len(spec.bus_ids_H) == 8

    def test_adjacency_symmetric_with_self_loops(self, spec):
        A = spec.adjacency()
        assert torch.equal(A, A.T)
        assert torch.equal(torch.diagonal(A), torch.ones(30))

    def test_edge_endpoints_inside_area(self, spec):
        idx = spec.edge_endpoint_indices()
        h = set(spec.h_indices().tolist())
        assert idx.shape == (8, 2)
        assert set(idx.flatten().tolist()) <= h

    def test_area_mismatch_rejected(self, workspace, spec):
        doc = json.loads((workspace / "area.json").read_text())
        doc["bus_ids_H"] = [9999]
        bad = workspace / "bad_area.json"
        bad.write_text(json.dumps(doc))
        with pytest.raises(DataError, match="not in grid"):
            c.load_graph_spec(workspace / "grid.json", bad)


class TestDataLoading:
    def test_shapes_and_labels(self, dataset, spec):
        train, test = dataset
        assert train.features.shape[1:] == (30, c.N_FEATURES)
        assert train.labels.shape[1] == 8
        assert sorted(test) == list(range(1, 9))
        for nf, batch in test.items():
            assert torch.equal(batch.labels.sum(1),
                               torch.full((len(batch.n_attacked),), float(nf)))

    def test_mask_channel_marks_area(self, dataset, spec):
        train, _ = dataset
        mask = train.features[0, :, -1]
        on = {spec.bus_ids[i] for i in torch.nonzero(mask).flatten().tolist()}
        assert on == set(spec.bus_ids_H)

    def test_wrong_area_shard_rejected(self, workspace, spec, tmp_path):
        line = (workspace / "ds" / "test_F1.ndjson").read_text().splitlines()[0]
        rec = json.loads(line)
        rec["area"]["line_ids_H"] = rec["area"]["line_ids_H"][:-1]
        bad = tmp_path / "bad.ndjson"
        bad.write_text(json.dumps(rec) + "\n")
        with pytest.raises(DataError, match="another area"):
            c.read_shard(bad, spec)


class TestModel:
    def test_output_in_unit_interval(self, spec, dataset):
        train, _ = dataset
        model = c.CgcaAl(spec)
        with torch.no_grad():
            y = model(train.features[:8])
        assert y.shape == (8, 8)          # batch x |E_H|, 30-bus area
        assert float(y.min()) >= 0.0 and float(y.max()) <= 1.0

    def test_default_architecture(self, spec):
        model = c.CgcaAl(spec)
        assert len(model.layers) == 3
        assert model.mhca.heads == 4
        assert model.mhca.head_dim == 64
        widths = [m.out_features for m in model.head
                  if isinstance(m, torch.nn.Linear)]
        assert widths == [256, 128, 128, 1]

    def test_checkpoint_round_trip(self, spec, dataset, tmp_path):
        train, _ = dataset
        model = c.CgcaAl(spec)
        model.set_normalization(*c.normalization_stats(train))
        path = tmp_path / "model.pt"
        c.save_checkpoint(path, model, spec, extra={"note": 1})
        model2, spec2, extra = c.load_checkpoint(path)
        assert spec2 == spec
        assert extra == {"note": 1}
        x = train.features[:4]
        assert torch.allclose(model(x), model2(x), atol=1e-7)


class TestPriorExchange:
    def test_document_schema(self, spec):
        y = np.linspace(0, 1, 8)
        doc = c.prior_document(spec, y)
        assert set(doc) == {"area_id", "edges", "y"}
        assert doc["edges"] == list(spec.line_ids_H)
        assert all(0.0 <= v <= 1.0 for v in doc["y"])

    def test_out_of_range_clipped(self, spec):
        doc = c.prior_document(spec, np.array([-0.5, 2.0] + [0.5] * 6))
        assert doc["y"][0] == 0.0 and doc["y"][1] == 1.0

    def test_round_trip_bit_exact(self, spec, tmp_path):
        y = np.round(np.random.default_rng(0).random(8), 6)
        path = tmp_path / "prior.json"
        c.export_prior(path, spec, y)
        assert np.array_equal(c.load_prior(path, spec), y)

    def test_dimension_mismatch_rejected(self, spec):
        with pytest.raises(DataError):
            c.prior_document(spec, np.zeros(5))

    def test_wrong_area_refused(self, spec, tmp_path):
        path = tmp_path / "prior.json"
        c.export_prior(path, spec, np.zeros(8))
        other = c.GraphSpec(spec.bus_ids, spec.edges,
                            spec.bus_ids_H[:-1], spec.line_ids_H[:-1])
        with pytest.raises(DataError, match="different area"):
            c.load_prior(path, other)
