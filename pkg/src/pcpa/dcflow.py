"""Linearized (DC) power flow: A theta = p, line flows, island detection."""

from __future__ import annotations

import numpy as np

from .grid import GridTopology

BALANCE_TOL = 1e-9


class PowerFlowError(ValueError):
    """Raised for unbalanced islands or singular reduced systems."""


def find_islands(grid: GridTopology, removed_line_ids: set[int] | None = None
                 ) -> list[list[int]]:
    """Connected components (lists of bus ids, each sorted ascending).

    ``removed_line_ids`` optionally excludes lines, so the post-attack
    graph can be analyzed without rebuilding the topology.
    """
    removed = removed_line_ids or set()
    adj: dict[int, list[int]] = {b: [] for b in grid.buses}
    for ln in grid.lines:
        if ln.id in removed:
            continue
        adj[ln.from_bus].append(ln.to_bus)
        adj[ln.to_bus].append(ln.from_bus)
    seen: set[int] = set()
    comps: list[list[int]] = []
    for start in grid.buses:
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    comp.append(v)
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def islands_from_admittance(A: np.ndarray, bus_ids, tol: float = 1e-12
                            ) -> list[list[int]]:
    """Connected components read off the sparsity pattern of A."""
    bus_ids = list(bus_ids)
    n = len(bus_ids)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for v in np.nonzero(np.abs(A[u]) > tol)[0]:
                if v != u and not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    stack.append(int(v))
        comps.append(sorted(bus_ids[i] for i in comp))
    return comps


def solve_dc(A: np.ndarray, p: np.ndarray, grid: GridTopology,
             islands: list[list[int]] | None = None) -> np.ndarray:
    """Solve A theta = p with the lowest-id bus of each island as reference.

    Per island the injections must balance to :data:`BALANCE_TOL`; the
    reduced system (reference row/column deleted) is solved directly.
    """
    if islands is None:
        islands = islands_from_admittance(A, grid.buses)
    theta = np.zeros(grid.n_buses)
    for comp in islands:
        idx = np.array([grid.bus_index(b) for b in comp])
        imbalance = abs(float(p[idx].sum()))
        if imbalance > BALANCE_TOL:
            raise PowerFlowError(
                f"island {comp[:5]}{'...' if len(comp) > 5 else ''} is "
                f"unbalanced by {imbalance:.3e} p.u."
            )
        if len(idx) == 1:
            continue  # reference angle 0
        red = idx[1:]  # comp sorted: idx[0] is the lowest-id reference bus
        A_red = A[np.ix_(red, red)]
        try:
            theta[red] = np.linalg.solve(A_red, p[red])
        except np.linalg.LinAlgError as exc:
            raise PowerFlowError(f"singular reduced system: {exc}") from exc
    return theta


def line_flows(theta: np.ndarray, grid: GridTopology) -> np.ndarray:
    """Per-line flow p_uv = (theta_u - theta_v) / r_uv, signed by line direction."""
    if theta.shape[0] != grid.n_buses:
        raise ValueError("theta dimension does not match grid")
    flows = np.empty(grid.n_lines)
    for j, ln in enumerate(grid.lines):
        du = theta[grid.bus_index(ln.from_bus)] - theta[grid.bus_index(ln.to_bus)]
        flows[j] = du / ln.reactance
    return flows
