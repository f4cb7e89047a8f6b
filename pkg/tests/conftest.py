import numpy as np
import pytest

import pcpa
from pcpa.areas import _certify
from pcpa.grid import GridTopology, Line


@pytest.fixture(scope="session")
def case30():
    return pcpa.load_case("ieee30")


@pytest.fixture(scope="session")
def case118():
    return pcpa.load_case("ieee118")


@pytest.fixture(scope="session")
def area30(case30):
    grid, _, _ = case30
    return pcpa.find_area_with_line_count(grid, 8, 8)


@pytest.fixture(scope="session")
def area118(case118):
    grid, _, _ = case118
    return pcpa.dbgs(grid, 20, rng_seed=3)


@pytest.fixture
def bridge_grid():
    """Six-bus grid whose single E_H line (0) is a bridge: severing it
    splits the system into islands {1,3,5} and {2,4,6}.  Buses 5 and 6 sit
    outside the boundary-neighbor group and absorb the shed power."""
    grid = GridTopology(
        (1, 2, 3, 4, 5, 6),
        (Line(0, 1, 2, 0.1), Line(1, 1, 3, 0.2), Line(2, 2, 4, 0.15),
         Line(3, 3, 5, 0.1), Line(4, 4, 6, 0.1)),
    )
    p = np.array([0.5, -0.3, -0.4, 0.2, -0.05, 0.05])
    D = pcpa.build_incidence(grid)
    A = pcpa.build_admittance(D, grid.reactances())
    area = _certify(grid, A, D, [1, 2], seed=0)
    assert area.certified
    return grid, p, area
