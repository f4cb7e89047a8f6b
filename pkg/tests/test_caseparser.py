import numpy as np
import pytest

import pcpa
from pcpa.caseparser import bundled_case_text, load_case, parse_case_file
from pcpa.grid import GridError

MINI_CASE = """\
function mpc = mini
mpc.baseMVA = 100;
mpc.bus = [
 1 3 0    0 0 0 1 1 0 135 1 1.05 0.95;
 2 1 21.7 0 0 0 1 1 0 135 1 1.05 0.95;  % comment
 3 1 30.0 0 0 0 1 1 0 135 1 1.05 0.95;
];
mpc.gen = [
 1 51.7 0 10 -10 1 100 1 100 0;
];
mpc.branch = [
 1 2 0.02 0.06 0.03 130 130 130 0 0 1 -360 360;
 2 3 0.05 0.19 0.02 130 130 130 0 0 1 -360 360;
 1 3 0.05 0.17 0.02 130 130 130 0 0 0 -360 360;
];
"""


class TestMiniCase:
    def test_parse(self):
        grid, p, loads = parse_case_file(MINI_CASE)
        assert grid.buses == (1, 2, 3)
        # status-0 branch skipped, ids follow the branch row index
        assert [(l.id, l.from_bus, l.to_bus) for l in grid.lines] == [
            (0, 1, 2), (1, 2, 3)]
        assert np.allclose(grid.reactances(), [0.06, 0.19])
        # per-unit on baseMVA, p = gen - load
        assert np.allclose(loads, [0.0, 0.217, 0.30])
        assert np.allclose(p, [0.517, -0.217, -0.30])
        assert abs(p.sum()) < 1e-12

    def test_missing_table(self):
        with pytest.raises(GridError, match="no bus table"):
            parse_case_file("mpc.branch = [1 2 0 0.1;];")

    def test_malformed_row(self):
        bad = MINI_CASE.replace("2 3 0.05 0.19", "2 x 0.05 0.19")
        with pytest.raises(GridError, match="malformed"):
            parse_case_file(bad)

    def test_nonpositive_reactance(self):
        bad = MINI_CASE.replace("1 2 0.02 0.06", "1 2 0.02 0.00")
        with pytest.raises(GridError, match="reactance"):
            parse_case_file(bad)


class TestBundledCases:
    def test_ieee30_shape_and_balance(self, case30):
        grid, p, loads = case30
        assert grid.n_buses == 30
        assert grid.n_lines == 41
        assert abs(p.sum()) < 1e-9           # generation matches load
        assert loads.min() >= 0.0
        assert np.isclose(loads.sum(), 2.834)   # 283.4 MW on a 100 MVA base

    def test_ieee118_shape_and_balance(self, case118):
        grid, p, loads = case118
        assert grid.n_buses == 118
        assert grid.n_lines == 186
        assert abs(p.sum()) < 1e-9

    def test_bundled_name_errors(self):
        with pytest.raises(GridError, match="no bundled case"):
            bundled_case_text("ieee300")

    def test_load_case_from_path(self, tmp_path):
        path = tmp_path / "mini.m"
        path.write_text(MINI_CASE)
        grid, p, _ = load_case(str(path))
        assert grid.n_buses == 3

    def test_convert_round_trip(self, tmp_path, case30):
        grid, p, loads = case30
        path = tmp_path / "case30.json"
        pcpa.save_grid(path, grid, p, loads)
        grid2, p2, loads2 = pcpa.load_grid(path)
        assert grid2 == grid
        assert np.allclose(p2, p)
        assert np.allclose(loads2, loads)
