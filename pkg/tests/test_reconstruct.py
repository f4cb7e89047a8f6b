import numpy as np
import pytest

import pcpa
from pcpa.areas import _certify
from pcpa.attack import sample_attack, simulate
from pcpa.grid import GridTopology, Line, build_admittance, build_incidence, partition
from pcpa.reconstruct import (ReconstructionError, detect_islanding,
                              localize_attacked_buses, reconstruct,
                              reconstruct_p_H, reconstruct_theta_H)


def _setup(case, area):
    grid, p, loads = case
    D = build_incidence(grid)
    A = build_admittance(D, grid.reactances())
    view = partition(grid, A, D, area.bus_ids_H)
    return grid, p, loads, D, A, view


class TestBusLocalization:
    def test_support_confined_to_attacked_area(self, case30, area30):
        # the nonzero residual support lies inside V_H regardless of attack
        grid, p, loads, D, A, view = _setup(case30, area30)
        rng = np.random.default_rng(50)
        for _ in range(30):
            att = sample_attack(area30, int(rng.integers(1, 9)), "mixed", rng)
            scn = simulate(grid, area30, att, p, loads)
            touched = localize_attacked_buses(A, scn.theta, scn.theta_post,
                                              scn.delta, grid.buses)
            assert touched <= set(area30.bus_ids_H)
            assert touched     # a real attack touches someone

    def test_no_attack_means_empty_support(self, case30):
        grid, p, _ = case30
        A = build_admittance(build_incidence(grid), grid.reactances())
        theta = pcpa.solve_dc(A, p, grid)
        assert localize_attacked_buses(A, theta, theta, np.zeros(len(p)),
                                       grid.buses) == set()


class TestThetaRecovery:
    def test_exact_on_simulated_scenarios(self, case30, area30):
        grid, p, loads, D, A, view = _setup(case30, area30)
        rng = np.random.default_rng(51)
        for _ in range(50):
            att = sample_attack(area30, int(rng.integers(1, 9)), "mixed", rng)
            scn = simulate(grid, area30, att, p, loads)
            meas = scn.measurements(grid)
            delta_Hbar = meas.p[view.idx_Hbar] - meas.p_post_Hbar
            theta_H, resid = reconstruct_theta_H(view, meas.theta,
                                                 meas.theta_post_Hbar,
                                                 delta_Hbar)
            assert np.max(np.abs(theta_H - scn.theta_post[view.idx_H])) < 1e-8
            assert resid < 1e-8

    def test_exact_on_118_bus(self, case118, area118):
        grid, p, loads, D, A, view = _setup(case118, area118)
        rng = np.random.default_rng(52)
        for _ in range(20):
            att = sample_attack(area118, int(rng.integers(1, 10)), "mixed", rng)
            scn = simulate(grid, area118, att, p, loads)
            meas = scn.measurements(grid)
            delta_Hbar = meas.p[view.idx_Hbar] - meas.p_post_Hbar
            theta_H, _ = reconstruct_theta_H(view, meas.theta,
                                             meas.theta_post_Hbar, delta_Hbar)
            assert np.max(np.abs(theta_H - scn.theta_post[view.idx_H])) < 1e-8

    def test_uncovered_bus_rejected(self):
        # bus 2 has no boundary line once H = {1, 2} on a path 3-1-2 plus
        # a pendant: its angle cannot be recovered
        g = GridTopology((1, 2, 3, 4),
                         (Line(0, 1, 2, 0.1), Line(1, 1, 3, 0.1),
                          Line(2, 3, 4, 0.1)))
        D = build_incidence(g)
        A = build_admittance(D, g.reactances())
        view = partition(g, A, D, [1, 2])
        with pytest.raises(ReconstructionError, match="no boundary line"):
            reconstruct_theta_H(view, np.zeros(4), np.zeros(2), np.zeros(2))


class TestIslandingDetection:
    def test_flags_follow_healthy_injection_change(self):
        p = np.array([0.5, -0.5])
        assert not detect_islanding(p, p.copy())
        assert detect_islanding(p, p * 0.9)

    def test_scenarios(self, case30, area30, bridge_grid):
        grid, p, loads, D, A, view = _setup(case30, area30)
        rng = np.random.default_rng(53)
        att = sample_attack(area30, 3, "cut", rng)
        scn = simulate(grid, area30, att, p, loads)
        meas = scn.measurements(grid)
        assert not detect_islanding(meas.p[view.idx_Hbar], meas.p_post_Hbar)

        bgrid, bp, barea = bridge_grid
        att = sample_attack(barea, 1, "sever", rng)
        bscn = simulate(bgrid, barea, att, bp)
        bD = build_incidence(bgrid)
        bA = build_admittance(bD, bgrid.reactances())
        bview = partition(bgrid, bA, bD, barea.bus_ids_H)
        bmeas = bscn.measurements(bgrid)
        assert detect_islanding(bmeas.p[bview.idx_Hbar], bmeas.p_post_Hbar)


class TestInjectionRecovery:
    def test_exact_ratio_recovery(self, bridge_grid):
        grid, p, area = bridge_grid
        rng = np.random.default_rng(54)
        att = sample_attack(area, 1, "sever", rng)
        scn = simulate(grid, area, att, p)
        D = build_incidence(grid)
        A = build_admittance(D, grid.reactances())
        view = partition(grid, A, D, area.bus_ids_H)
        meas = scn.measurements(grid)
        p_post_H, delta_H, alpha = reconstruct_p_H(grid, view, meas.p,
                                                   meas.p_post_Hbar)
        assert abs(alpha - scn.alpha) < 1e-12
        assert np.max(np.abs(p_post_H - scn.p_post[view.idx_H])) < 1e-12
        assert np.allclose(delta_H, scn.delta[view.idx_H], atol=1e-12)

    def test_no_usable_neighbor_rejected(self, bridge_grid):
        grid, p, area = bridge_grid
        D = build_incidence(grid)
        A = build_admittance(D, grid.reactances())
        view = partition(grid, A, D, area.bus_ids_H)
        # healthy injections unchanged: nothing to read a ratio from
        with pytest.raises(ReconstructionError, match="no boundary neighbor"):
            reconstruct_p_H(grid, view, p, p[view.idx_Hbar])


class TestFullPipeline:
    def test_non_islanding_report(self, case30, area30):
        grid, p, loads, D, A, view = _setup(case30, area30)
        rng = np.random.default_rng(55)
        att = sample_attack(area30, 2, "cut", rng)
        scn = simulate(grid, area30, att, p, loads)
        rep = reconstruct(grid, view, scn.measurements(grid))
        assert not rep.islanding
        assert rep.alpha == 1.0
        assert np.array_equal(rep.delta_H, np.zeros(len(view.idx_H)))
        assert np.array_equal(rep.p_post_H, p[view.idx_H])

    def test_islanding_report(self, bridge_grid):
        grid, p, area = bridge_grid
        att = sample_attack(area, 1, "sever", np.random.default_rng(56))
        scn = simulate(grid, area, att, p)
        D = build_incidence(grid)
        A = build_admittance(D, grid.reactances())
        view = partition(grid, A, D, area.bus_ids_H)
        rep = reconstruct(grid, view, scn.measurements(grid))
        assert rep.islanding
        assert abs(rep.alpha - scn.alpha) < 1e-12
        assert np.max(np.abs(rep.p_post_H - scn.p_post[view.idx_H])) < 1e-12
        assert np.max(np.abs(rep.theta_post_H
                             - scn.theta_post[view.idx_H])) < 1e-9
