"""PCPA scenario generation: physical line attacks plus cyber blinding.

A physical attack multiplies a line's impedance by a factor f, removing
the fraction x = 1 - 1/f of its admittance; x = 1 models an exact
disconnection.  The cyber side hides all post-attack measurements of the
attacked area from the observer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .areas import AttackedArea
from .dcflow import find_islands, solve_dc
from .grid import GridTopology, build_admittance, build_incidence

ALTER_FACTOR_RANGE = (1.5, 5.0)
CUT_FACTOR_RANGE = (100.0, 1000.0)


class AttackError(ValueError):
    pass


class RebalanceError(ValueError):
    """No feasible shedding ratio exists for the islanded configuration."""


@dataclass(frozen=True)
class AttackSample:
    """The physical-attack part of a scenario, over the area's E_H order."""
    line_ids_F: tuple[int, ...]
    x_H: np.ndarray
    factors: np.ndarray          # impedance factor per attacked line (inf = severed)
    kinds: tuple[str, ...]


@dataclass(frozen=True)
class MeasurementSet:
    """Pre-attack full measurements; post-attack ones blinded to V_Hbar."""
    bus_ids_Hbar: tuple[int, ...]
    theta: np.ndarray            # pre-attack, all buses
    p: np.ndarray                # pre-attack, all buses
    theta_post_Hbar: np.ndarray  # post-attack, V_Hbar only
    p_post_Hbar: np.ndarray      # post-attack, V_Hbar only


@dataclass(frozen=True)
class AttackScenario:
    area: AttackedArea
    attack: AttackSample
    loads: np.ndarray
    p: np.ndarray
    theta: np.ndarray
    p_post: np.ndarray           # truth, all buses
    theta_post: np.ndarray       # truth, all buses
    islands: tuple[tuple[int, ...], ...]
    alpha: float                 # shedding ratio applied to V_H (1.0 = none)

    @property
    def islanded(self) -> bool:
        return len(self.islands) > 1

    @property
    def delta(self) -> np.ndarray:
        return self.p - self.p_post

    def measurements(self, grid: GridTopology) -> MeasurementSet:
        h_set = set(self.area.bus_ids_H)
        hbar = tuple(b for b in grid.buses if b not in h_set)
        idx = np.array([grid.bus_index(b) for b in hbar])
        return MeasurementSet(
            bus_ids_Hbar=hbar,
            theta=self.theta.copy(),
            p=self.p.copy(),
            theta_post_Hbar=self.theta_post[idx].copy(),
            p_post_Hbar=self.p_post[idx].copy(),
        )


def factor_to_x(f: float) -> float:
    """x = 1 - 1/f: the fraction of line admittance removed by an impedance
    factor f, so the attacked admittance is (1-x)/r = 1/(f r)."""
    return 1.0 - 1.0 / f


def sample_attack(area: AttackedArea, n_attacked: int, kind: str,
                  rng: np.random.Generator) -> AttackSample:
    """Sample |F| attacked lines uniformly from E_H with per-kind factors.

    ``kind`` is 'alter', 'cut', 'sever' (exact disconnection, x = 1) or
    'mixed' (each attacked line alter/cut with equal probability).
    """
    m = len(area.line_ids_H)
    if not (1 <= n_attacked <= m):
        raise AttackError(f"|F| = {n_attacked} outside [1, {m}]")
    pos = sorted(rng.choice(m, size=n_attacked, replace=False).tolist())
    kinds = []
    for _ in pos:
        if kind == "mixed":
            kinds.append("alter" if rng.random() < 0.5 else "cut")
        elif kind in ("alter", "cut", "sever"):
            kinds.append(kind)
        else:
            raise AttackError(f"unknown attack kind {kind!r}")
    x = np.zeros(m)
    factors = []
    for j, k in zip(pos, kinds):
        if k == "sever":
            f = np.inf
        else:
            lo, hi = ALTER_FACTOR_RANGE if k == "alter" else CUT_FACTOR_RANGE
            f = float(rng.uniform(lo, hi))
        factors.append(f)
        x[j] = 1.0 if np.isinf(f) else factor_to_x(f)
    return AttackSample(
        line_ids_F=tuple(area.line_ids_H[j] for j in pos),
        x_H=x,
        factors=np.array(factors),
        kinds=tuple(kinds),
    )


def apply_attack(A: np.ndarray, D: np.ndarray, reactances: np.ndarray,
                 x: np.ndarray) -> np.ndarray:
    """Post-attack admittance A' = A - D Gamma [x] D^T."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != D.shape[1]:
        raise AttackError("x dimension does not match line count")
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise AttackError("attack entries must lie in [0, 1]")
    return A - (D * (x / reactances)) @ D.T


def rebalance_injections(p: np.ndarray, grid: GridTopology, area: AttackedArea,
                         islands: list[list[int]]
                         ) -> tuple[np.ndarray, float]:
    """Assumption-3 rebalancing after islanding.

    All V_H buses and their direct V_Hbar neighbors shed with one common
    ratio alpha in [0, 1] (proportional load shedding / generation
    reduction extended across the boundary, which is what makes the
    neighbor-ratio recovery of p'_H exact).  The remaining V_Hbar buses of
    each island absorb the residual with a per-island uniform ratio in
    [0, 1].  Raises :class:`RebalanceError` when no such ratios exist.
    """
    n = len(p)
    if len(islands) == 1:
        return p.copy(), 1.0

    h_set = set(area.bus_ids_H)
    adj = grid.adjacency_lists()
    neighbors = {v for u in h_set for v in adj[u] if v not in h_set}
    alpha_group = h_set | neighbors

    # per-island sums over the alpha group (T) and the rest (R)
    rows = []
    for comp in islands:
        idx_a = [grid.bus_index(b) for b in comp if b in alpha_group]
        idx_r = [grid.bus_index(b) for b in comp if b not in alpha_group]
        T = float(p[idx_a].sum()) if idx_a else 0.0
        R = float(p[idx_r].sum()) if idx_r else 0.0
        rows.append((comp, idx_a, idx_r, T, R))

    alpha = 1.0
    for comp, _, idx_r, T, R in rows:
        if abs(T) < 1e-12:
            continue
        if not idx_r or abs(R) < 1e-12:
            raise RebalanceError(
                f"island {comp[:4]} has no buses to absorb its imbalance"
            )
        rho = -T / R
        if rho < 0.0:
            raise RebalanceError(
                f"island {comp[:4]} would need a sign-flipping compensation"
            )
        if rho > 0.0:
            alpha = min(alpha, 1.0 / rho)

    p_post = np.zeros(n)
    for comp, idx_a, idx_r, T, R in rows:
        for i in idx_a:
            p_post[i] = alpha * p[i]
        if idx_r:
            beta = 0.0 if abs(R) < 1e-12 else -alpha * T / R
            if beta < -1e-12 or beta > 1.0 + 1e-12:
                raise RebalanceError(f"compensation ratio {beta:.4f} outside [0, 1]")
            for i in idx_r:
                p_post[i] = beta * p[i]
    return p_post, alpha


def simulate(grid: GridTopology, area: AttackedArea, attack: AttackSample,
             p: np.ndarray, loads: np.ndarray | None = None) -> AttackScenario:
    """Run one PCPA scenario end to end and return the ground truth."""
    loads = np.zeros(grid.n_buses) if loads is None else np.asarray(loads)
    D = build_incidence(grid)
    r = grid.reactances()
    A = build_admittance(D, r)
    theta = solve_dc(A, p, grid)

    eidx_H = [j for j, ln in enumerate(grid.lines) if ln.id in set(area.line_ids_H)]
    x_full = np.zeros(grid.n_lines)
    x_full[eidx_H] = attack.x_H
    A_post = apply_attack(A, D, r, x_full)

    severed = {grid.lines[j].id for j in np.nonzero(x_full == 1.0)[0]}
    islands = find_islands(grid, severed)
    p_post, alpha = rebalance_injections(p, grid, area, islands)
    theta_post = solve_dc(A_post, p_post, grid, islands)

    return AttackScenario(
        area=area,
        attack=attack,
        loads=loads,
        p=p.copy(),
        theta=theta,
        p_post=p_post,
        theta_post=theta_post,
        islands=tuple(tuple(c) for c in islands),
        alpha=alpha,
    )


def sample_loads(base_p: np.ndarray, base_loads: np.ndarray,
                 rng: np.random.Generator, sigma: float = 0.2
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Random balanced injections: lognormal multipliers on each base load,
    generation rescaled uniformly so the grid stays balanced."""
    base_gen = base_p + base_loads
    loads = base_loads * rng.lognormal(mean=0.0, sigma=sigma, size=len(base_loads))
    total_gen = base_gen.sum()
    if total_gen <= 0.0:
        raise AttackError("case has no generation to balance against")
    gen = base_gen * (loads.sum() / total_gen)
    return gen - loads, loads


# ---------------------------------------------------------------------------
# Scenario record (the dataset record format)

def scenario_to_dict(scn: AttackScenario, grid: GridTopology) -> dict:
    meas = scn.measurements(grid)
    labels = [1 if lid in set(scn.attack.line_ids_F) else 0
              for lid in scn.area.line_ids_H]
    return {
        "area": {"bus_ids_H": list(scn.area.bus_ids_H),
                 "line_ids_H": list(scn.area.line_ids_H)},
        "attack": {
            "line_ids_F": list(scn.attack.line_ids_F),
            "x_H": scn.attack.x_H.tolist(),
            "factors": [None if np.isinf(f) else f for f in scn.attack.factors],
            "kinds": list(scn.attack.kinds),
        },
        "labels": labels,
        "loads": scn.loads.tolist(),
        "p": scn.p.tolist(),
        "theta": scn.theta.tolist(),
        "p_post": scn.p_post.tolist(),
        "theta_post": scn.theta_post.tolist(),
        "blinded": {
            "bus_ids_Hbar": list(meas.bus_ids_Hbar),
            "theta_post_Hbar": meas.theta_post_Hbar.tolist(),
            "p_post_Hbar": meas.p_post_Hbar.tolist(),
        },
        "islands": [list(c) for c in scn.islands],
        "alpha": scn.alpha,
    }


def scenario_from_dict(doc: dict, area: AttackedArea) -> AttackScenario:
    att = doc["attack"]
    factors = np.array([np.inf if f is None else f for f in att["factors"]])
    islands = tuple(tuple(c) for c in doc["islands"])
    return AttackScenario(
        area=area,
        attack=AttackSample(
            line_ids_F=tuple(att["line_ids_F"]),
            x_H=np.array(att["x_H"]),
            factors=factors,
            kinds=tuple(att["kinds"]),
        ),
        loads=np.array(doc["loads"]),
        p=np.array(doc["p"]),
        theta=np.array(doc["theta"]),
        p_post=np.array(doc["p_post"]),
        theta_post=np.array(doc["theta_post"]),
        islands=islands,
        alpha=float(doc["alpha"]),
    )


def save_scenario(path, scn: AttackScenario, grid: GridTopology) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(scn, grid), fh)
