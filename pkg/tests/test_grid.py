import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import pcpa
from pcpa.grid import (GridError, GridTopology, Line, admittance_from_topology,
                       build_admittance, build_incidence, partition)

from gridgen import random_connected_grid


def tiny_grid():
    return GridTopology(
        (1, 2, 3, 4),
        (Line(0, 1, 2, 0.1), Line(1, 2, 3, 0.2), Line(2, 3, 4, 0.25),
         Line(3, 4, 1, 0.5)),
    )


class TestTopologyValidation:
    def test_duplicate_bus_rejected(self):
        with pytest.raises(GridError, match="duplicate"):
            GridTopology((1, 1, 2), ())

    def test_self_loop_rejected(self):
        with pytest.raises(GridError, match="itself"):
            GridTopology((1, 2), (Line(0, 1, 1, 0.1),))

    def test_unknown_bus_rejected(self):
        with pytest.raises(GridError, match="unknown bus"):
            GridTopology((1, 2), (Line(0, 1, 3, 0.1),))

    def test_nonpositive_reactance_rejected(self):
        with pytest.raises(GridError, match="reactance"):
            GridTopology((1, 2), (Line(0, 1, 2, 0.0),))

    def test_disconnected_rejected(self):
        with pytest.raises(GridError, match="not connected"):
            GridTopology((1, 2, 3, 4), (Line(0, 1, 2, 0.1), Line(1, 3, 4, 0.1)))

    def test_bus_index_lookup(self):
        g = tiny_grid()
        assert [g.bus_index(b) for b in g.buses] == [0, 1, 2, 3]
        with pytest.raises(GridError):
            g.bus_index(99)


class TestIncidence:
    def test_tiny_grid_entries(self):
        # oracle: written out by hand for the 4-cycle
        D = build_incidence(tiny_grid())
        expected = np.array([
            [1, 0, 0, -1],
            [-1, 1, 0, 0],
            [0, -1, 1, 0],
            [0, 0, -1, 1],
        ], dtype=float)
        assert np.array_equal(D, expected)

    def test_columns_sum_to_zero(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            g = random_connected_grid(rng, int(rng.integers(2, 15)),
                                      extra_lines=int(rng.integers(0, 5)))
            D = build_incidence(g)
            assert np.array_equal(D.sum(axis=0), np.zeros(g.n_lines))
            assert np.array_equal(np.abs(D).sum(axis=0), 2 * np.ones(g.n_lines))


class TestAdmittance:
    def test_matches_entrywise_construction(self):
        # oracle: independent entrywise build (off-diagonal -1/r, zero row sums)
        rng = np.random.default_rng(1)
        for _ in range(50):
            g = random_connected_grid(rng, int(rng.integers(2, 20)),
                                      extra_lines=int(rng.integers(0, 8)))
            D = build_incidence(g)
            A = build_admittance(D, g.reactances())
            assert np.allclose(A, admittance_from_topology(g), atol=1e-12)

    def test_laplacian_properties(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            g = random_connected_grid(rng, int(rng.integers(3, 15)), extra_lines=2)
            A = build_admittance(build_incidence(g), g.reactances())
            assert np.allclose(A, A.T)
            assert np.allclose(A.sum(axis=1), 0.0, atol=1e-12)
            eig = np.linalg.eigvalsh(A)
            assert eig[0] > -1e-10          # positive semidefinite
            assert eig[1] > 1e-10           # connected: single zero eigenvalue

    def test_dimension_mismatch(self):
        g = tiny_grid()
        with pytest.raises(GridError, match="mismatch"):
            build_admittance(build_incidence(g), np.ones(3))


class TestPartition:
    def test_blocks_reassemble(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            g = random_connected_grid(rng, int(rng.integers(4, 16)), extra_lines=3)
            D = build_incidence(g)
            A = build_admittance(D, g.reactances())
            k = int(rng.integers(1, g.n_buses))
            h = rng.choice(g.buses, size=k, replace=False).tolist()
            view = partition(g, A, D, h)
            assert np.array_equal(view.reassemble(), A)

    def test_internal_lines_have_both_endpoints_in_H(self):
        g = tiny_grid()
        D = build_incidence(g)
        A = build_admittance(D, g.reactances())
        view = partition(g, A, D, [1, 2])
        assert view.line_ids_H == (0,)
        assert view.bus_ids_Hbar == (3, 4)
        view2 = partition(g, A, D, [1, 3])      # no internal line
        assert view2.line_ids_H == ()
        assert view2.D_H.shape == (2, 0)

    def test_invalid_sets_rejected(self):
        g = tiny_grid()
        D = build_incidence(g)
        A = build_admittance(D, g.reactances())
        with pytest.raises(GridError):
            partition(g, A, D, [])
        with pytest.raises(GridError):
            partition(g, A, D, [1, 2, 3, 4])
        with pytest.raises(GridError):
            partition(g, A, D, [99])


class TestCanonicalFile:
    def test_round_trip(self, tmp_path):
        g = tiny_grid()
        p = np.array([0.4, -0.1, -0.5, 0.2])
        loads = np.array([0.0, 0.1, 0.5, 0.0])
        path = tmp_path / "grid.json"
        pcpa.save_grid(path, g, p, loads)
        g2, p2, loads2 = pcpa.load_grid(path)
        assert g2 == g
        assert np.array_equal(p2, p)
        assert np.array_equal(loads2, loads)

    def test_malformed_document(self):
        with pytest.raises(GridError, match="malformed"):
            pcpa.grid_from_dict({"buses": [{"id": 1}], "lines": []})


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=2, max_value=12), st.integers(min_value=0, max_value=6),
       st.integers(min_value=0, max_value=2**31))
def test_admittance_psd_property(n, extra, seed):
    rng = np.random.default_rng(seed)
    g = random_connected_grid(rng, n, extra_lines=extra)
    A = build_admittance(build_incidence(g), g.reactances())
    v = rng.normal(size=n)
    assert float(v @ A @ v) >= -1e-9
